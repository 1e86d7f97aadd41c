import io
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symsq import arith, eigenform as ef
from symsq.errors import (
    CapacityError,
    DegenerateAngleError,
    DomainError,
    ParseError,
    ValidationError,
)

ORACLE_N = 300


def _poly_mul(a, b, n):
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for j, bj in enumerate(b[: n - i]):
                out[i + j] += ai * bj
    return out


def eta24_schoolbook(n):
    """Independent oracle: expand prod (1-q^m)^24 by repeated schoolbook
    multiplication of the truncated factors."""
    series = [1] + [0] * (n - 1)
    for m in range(1, n):
        factor = [0] * n
        factor[0] = 1
        factor[m] = -1
        for _ in range(24):
            series = _poly_mul(series, factor, n)
    return series


TAU_ORACLE = eta24_schoolbook(ORACLE_N)  # tau(k+1) = TAU_ORACLE[k]


def test_oracle_head_values():
    # sanity of the oracle itself: hand expansion to q^3 gives 1 - 24q + 252q^2
    assert TAU_ORACLE[:4] == [1, -24, 252, -1472]


def test_delta_examples():
    q = ef.delta_qexpansion(6)
    assert q.level == 1 and q.weight == 12
    assert q.a[1] == 1
    assert q.a[2] == TAU_ORACLE[1] == -24
    assert q.a[3] == TAU_ORACLE[2] == 252
    assert q.a[6] == q.a[2] * q.a[3] == -6048
    assert q.a[6] == TAU_ORACLE[5]


def test_delta_matches_oracle_prefix():
    q = ef.delta_qexpansion(ORACLE_N)
    assert q.a[1:] == TAU_ORACLE
    assert all(isinstance(v, int) for v in q.a[1:])


def test_delta_capacity():
    with pytest.raises(CapacityError):
        ef.delta_qexpansion(100, exact_limit=50)


def _render(q):
    lines = [f"# level={q.level} weight={q.weight} n_max={q.n_max}"]
    lines += [f"{n}\t{q.a[n]}" for n in range(1, q.n_max + 1)]
    return ("\n".join(lines) + "\n").encode()


def test_load_roundtrip_against_builtin():
    q = ef.delta_qexpansion(3)
    q2 = ef.load_qexpansion(io.BytesIO(_render(q)))
    assert (q2.level, q2.weight, q2.n_max, q2.a) == (q.level, q.weight, q.n_max, q.a)


def test_load_header_errors():
    with pytest.raises(ParseError) as e:
        ef.load_qexpansion(b"level=1 weight=12 n_max=1\n1\t1\n")
    assert e.value.line == 1
    with pytest.raises(ValidationError):
        ef.load_qexpansion(b"# level=4 weight=12 n_max=1\n1\t1\n")  # level not square-free
    with pytest.raises(ValidationError):
        ef.load_qexpansion(b"# level=1 weight=11 n_max=1\n1\t1\n")  # odd weight


def test_load_coefficient_errors():
    with pytest.raises(ValidationError) as e:
        ef.load_qexpansion(b"# level=1 weight=12 n_max=2\n1\t2\n2\t-24\n")
    assert e.value.line == 2  # a(1) != 1
    with pytest.raises(ParseError) as e:
        ef.load_qexpansion(b"# level=1 weight=12 n_max=3\n1\t1\n3\t252\n")
    assert e.value.line == 3  # gap: n=2 missing
    with pytest.raises(ParseError) as e:
        ef.load_qexpansion(b"# level=1 weight=12 n_max=2\n1\t1\n2\tx\n")
    assert e.value.line == 3
    with pytest.raises(ParseError):
        ef.load_qexpansion(b"# level=1 weight=12 n_max=1\n1\t1\nextra\n")
    with pytest.raises(ParseError) as e:
        ef.load_qexpansion(b"# level=1 weight=12 n_max=3\n1\t1\n2\t-24\n")
    assert e.value.line == 4  # file ends early


def test_normalize_values():
    ev = ef.normalize(ef.delta_qexpansion(4))
    assert ev.lam[1] == 1.0
    assert abs(ev.lam[2] - (-24 / 2**5.5)) < 1e-15
    assert abs(ev.lam[2] + 0.530330086) < 1e-9
    assert ev.lam[4] == -0.71875  # -1472 / 2^11, exact in binary


def test_extend_hecke_degenerate_cases():
    assert np.allclose(ef.extend_hecke(2.0, 5), np.arange(1, 7), atol=1e-12)
    assert np.allclose(ef.extend_hecke(0.0, 4), [1, 0, -1, 0, 1], atol=0)


def test_extend_hecke_delta_p2():
    lam2 = -24 / 2**5.5
    seq = ef.extend_hecke(lam2, 4)
    assert abs(seq[4] - 0.2353515625) < 1e-12


def test_extend_hecke_domain():
    with pytest.raises(DomainError):
        ef.extend_hecke(2.5, 3)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-2.0, max_value=2.0), st.integers(min_value=1, max_value=30))
def test_extend_hecke_chebyshev_bound(lam_p, e_max):
    # |U_e(cos t)| <= e + 1 for real angles
    seq = ef.extend_hecke(lam_p, e_max)
    assert np.all(np.abs(seq) <= np.arange(1, e_max + 2) + 1e-9)


def test_sym_square_examples(delta_ev_1e5, sym2_1e5):
    s2 = sym2_1e5
    assert s2.lam2[1] == 1.0
    assert s2.lam2[2] == -0.71875  # single term: lam(4) = tau(4)/2^11
    lam16 = ef.extend_hecke(float(delta_ev_1e5.lam[2]), 4)[4]
    assert abs(s2.lam2[4] - (lam16 + 1.0)) < 1e-15
    assert abs(s2.lam2[4] - 1.2353515625) < 1e-12


def test_sym_square_multiplicative(sym2_1e5):
    rng = np.random.default_rng(6)
    lam2 = sym2_1e5.lam2
    checked = 0
    while checked < 3000:
        m = int(rng.integers(2, 300))
        n = int(rng.integers(2, 10**5 // m))
        if gcd(m, n) != 1:
            continue
        checked += 1
        lhs = lam2[m * n]
        rhs = lam2[m] * lam2[n]
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))


def test_sym_square_divisor_bound_sampled(sym2_1e5, sieve_1e5):
    # |lam_sym2(n)| <= d(n^2) = prod(2e+1), a consequence of the two-sided
    # eigenvalue bound
    rng = np.random.default_rng(12)
    for n in rng.integers(1, 10**5, size=2000):
        n = int(n)
        dsq = 1
        for _, e in arith.factorize(n, sieve_1e5):
            dsq *= 2 * e + 1
        assert abs(sym2_1e5.lam2[n]) <= dsq + 1e-9


def test_sym_square_capacity(delta_ev_1e5):
    with pytest.raises(CapacityError):
        ef.sym_square(delta_ev_1e5, 10**5 + 1)


def _synthetic_level6_table(n_max=500):
    lam = np.zeros(n_max + 1)
    t = arith.build_factor_sieve(n_max)
    lam[t.primes] = 1.2
    return ef.EigenvalueTable(level=6, weight=2, n_max=n_max, lam=lam)


def test_sym_square_undefined_marker():
    s2 = ef.sym_square(_synthetic_level6_table(), 500)
    for n in range(1, 501):
        if gcd(n, 6) > 1:
            assert np.isnan(s2.lam2[n])
            assert not s2.is_defined(n)
        else:
            assert not np.isnan(s2.lam2[n])


def test_chebyshev_check_examples(delta_ev_1e5):
    assert ef.chebyshev_check(delta_ev_1e5, 2, 1) <= 1e-12
    worst = 0.0
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97):
        worst = max(worst, ef.chebyshev_check(delta_ev_1e5, p, 6))
    assert worst <= 1e-9


def test_chebyshev_degenerate_errors():
    lam = np.zeros(10)
    lam[1] = 1.0
    ev = ef.EigenvalueTable(1, 12, 9, lam)
    with pytest.raises(DegenerateAngleError):
        ef.chebyshev_check(ev, 2, 2)  # lam(2) = 0: sin(2t) = 0 at t = pi/2
    lam2 = lam.copy()
    lam2[2] = 2.0
    with pytest.raises(DegenerateAngleError):
        ef.chebyshev_check(ef.EigenvalueTable(1, 12, 9, lam2), 2, 2)


def test_verify_eigenform(delta_ev_1e5):
    rep = ef.verify_eigenform(delta_ev_1e5, 3000)
    assert rep.ok
    assert rep.max_hecke_deviation <= 1e-9
    lam = delta_ev_1e5.lam
    # spec identities
    assert abs(lam[2] * lam[3] - lam[6]) < 1e-15
    assert abs(lam[4] * lam[6] - (lam[24] + lam[6])) < 1e-15
    assert lam[1] * lam[7] == lam[7]


def test_delta_eigenvalue_table_matches_exact():
    ev = ef.delta_eigenvalue_table(2000)
    q = ef.normalize(ef.delta_qexpansion(2000))
    assert np.allclose(ev.lam, q.lam, rtol=1e-13, atol=0)
