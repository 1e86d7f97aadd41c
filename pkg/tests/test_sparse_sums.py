from math import exp

import numpy as np
import pytest

from symsq import arith, eigenform as ef, quadforms as qf, sparse_sums as ss
from symsq.errors import CapacityError, DomainError, FitError
from symsq.sigma_dde import StepBeta


@pytest.fixture(scope="module")
def beta25():
    return StepBeta(25)


def test_sparse_sum_single_term(sym2_1e5, cg_m4):
    assert ss.sparse_sum(sym2_1e5, cg_m4, 1) == 4.0


def test_sparse_sum_small_values(sym2_1e5, cg_m4):
    # n=2 term: lam_sym2(2) = tau(4)/2^11 = -0.71875 exactly, r*(2) = 1
    assert abs(ss.sparse_sum(sym2_1e5, cg_m4, 2) - 1.125) < 1e-12
    # r*_{-4}(3) = 0 kills the n=3 term
    assert ss.sparse_sum(sym2_1e5, cg_m4, 3) == ss.sparse_sum(sym2_1e5, cg_m4, 2)


def test_sparse_sum_capacity(sym2_1e5, cg_m4):
    with pytest.raises(CapacityError):
        ss.sparse_sum(sym2_1e5, cg_m4, 10**5 + 1)


def test_sum_series_matches_pointwise(sym2_1e5, cg_m4):
    grid = [1, 2, 4, 8, 16, 64, 256, 1024, 4096]
    series = ss.sum_series(sym2_1e5, cg_m4, grid)
    assert list(series.grid) == grid
    for x, s in zip(grid, series.S):
        assert abs(s - ss.sparse_sum(sym2_1e5, cg_m4, x)) < 1e-9


def test_sum_series_single_point(sym2_1e5, cg_m3):
    series = ss.sum_series(sym2_1e5, cg_m3, [1])
    assert series.S[0] == 6.0  # w_D for D = -3


def test_sum_increment_property(sym2_1e5, cg_m4, sieve_1e5):
    rng = np.random.default_rng(9)
    sf = arith.squarefree_mask(sieve_1e5)
    for X in rng.integers(2, 10**4, size=200):
        X = int(X)
        delta = ss.sparse_sum(sym2_1e5, cg_m4, X) - ss.sparse_sum(sym2_1e5, cg_m4, X - 1)
        if sf[X]:
            expect = 4.0 * sym2_1e5.lam2[X] * qf.r_star(X, -4)
        else:
            expect = 0.0
        assert abs(delta - expect) < 1e-9


def test_sum_absolute_bound(sym2_1e5, cg_m4, sieve_1e5):
    # crude divisor bound: |S(X)| <= w_D * sum_{n<=X} d(n^2), d(n^2) = prod(2e+1)
    X = 1000
    bound = 0.0
    for n in range(1, X + 1):
        prod = 1
        for _, e in arith.factorize(n, sieve_1e5):
            prod *= 2 * e + 1
        bound += prod
    assert abs(ss.sparse_sum(sym2_1e5, cg_m4, X)) <= 4.0 * bound


def test_exponent_fit_synthetic_power_law():
    grid = np.array([10, 100, 1000, 10000, 100000], dtype=np.int64)
    series = ss.SumSeries(-4, 1, grid, grid.astype(float) ** (2.0 / 3.0))
    assert abs(ss.exponent_fit(series) - 2.0 / 3.0) < 1e-6
    series = ss.SumSeries(-4, 1, grid, np.full(5, 7.0))
    assert abs(ss.exponent_fit(series)) < 1e-12


def test_exponent_fit_errors():
    grid = np.array([10, 100, 1000], dtype=np.int64)
    with pytest.raises(FitError):
        ss.exponent_fit(ss.SumSeries(-4, 1, grid, np.ones(3)))
    grid4 = np.array([10, 100, 1000, 10000], dtype=np.int64)
    with pytest.raises(FitError):
        ss.exponent_fit(ss.SumSeries(-4, 1, grid4, np.zeros(4)))


def test_first_negative_examples(sym2_1e5, cg_m4):
    assert ss.first_negative(sym2_1e5, 10**5) == 2
    assert ss.first_negative_sparse(sym2_1e5, cg_m4, 10**5) == 2
    assert ss.first_negative(sym2_1e5, 1) is None


def test_first_negative_sparse_minus3_brute_oracle(sym2_1e5, cg_m3):
    got = ss.first_negative_sparse(sym2_1e5, cg_m3, 10**4)
    # independent linear scan using the per-n scalar operations
    expect = None
    for n in range(1, 10**4 + 1):
        if sym2_1e5.lam2[n] < -1e-10 and qf.r_formula(n, -3) > 0:
            expect = n
            break
    assert got == expect == 3


def test_first_negative_ordering(sym2_1e5):
    base = ss.first_negative(sym2_1e5, 10**4)
    for D in (-3, -4, -7, -8, -11, -19, -43, -67, -163, -12, -16, -27, -28):
        cg = qf.enumerate_reduced(D)
        nd = ss.first_negative_sparse(sym2_1e5, cg, 10**4)
        if nd is not None:
            assert base <= nd


def test_first_negative_squarefree_flag(sym2_1e5, cg_m4):
    # the default search has no square-free restriction; the flag adds it
    n_all = ss.first_negative_sparse(sym2_1e5, cg_m4, 10**5)
    n_sf = ss.first_negative_sparse(sym2_1e5, cg_m4, 10**5, squarefree_only=True)
    assert n_sf >= n_all


def test_exceptional_set_empty_for_delta(delta_ev_1e5):
    nf = ss.exceptional_set(delta_ev_1e5, 100.0, 10**4)
    assert nf.primes == frozenset()


def test_exceptional_set_level_divisors_always_included():
    lam = np.zeros(501)
    ev = ef.EigenvalueTable(level=6, weight=2, n_max=500, lam=lam)
    nf = ss.exceptional_set(ev, 10.0, 500)
    assert {2, 3} <= nf.primes


def test_exceptional_set_single_target_at_Y_e():
    # log Y = 1: only nu = 1, target 2 cos(pi/3) = 1
    lam = np.zeros(501)
    lam[7] = 1.0  # exact hit
    lam[11] = 2 * np.cos(np.pi / 4)  # nu = 2 target: must NOT be collected
    ev = ef.EigenvalueTable(level=1, weight=2, n_max=500, lam=lam)
    nf = ss.exceptional_set(ev, exp(1.0), 500)
    assert 7 in nf.primes and 11 not in nf.primes


def test_hy_table_values(beta25):
    nf = ss.ExceptionalSet(10.0, frozenset())
    hy = ss.h_Y_table(10.0, 1000, nf, beta25)
    # log 3 / log 10 = 0.477 lies in the m = 2 band: 3 - 4 sin^2(pi/4) = 1
    assert abs(hy.values[3] - 1.0) < 1e-12
    assert hy.values[11] == -1.0
    assert hy.values[4] == 0.0
    assert abs(hy.values[6] - hy.values[2] * hy.values[3]) < 1e-12


def test_hy_table_exceptional_zero(beta25):
    nf = ss.ExceptionalSet(10.0, frozenset({3}))
    hy = ss.h_Y_table(10.0, 100, nf, beta25)
    assert hy.values[3] == 0.0
    assert hy.values[6] == 0.0


def test_hy_table_domain(beta25):
    with pytest.raises(DomainError):
        ss.h_Y_table(2.0, 100, ss.ExceptionalSet(2.0, frozenset()), beta25)


def test_hy_invariants(beta25, sieve_1e4):
    nf = ss.ExceptionalSet(50.0, frozenset())
    hy = ss.h_Y_table(50.0, 10**4, nf, beta25, table=sieve_1e4)
    v = hy.values
    primes = sieve_1e4.primes
    hp = v[primes]
    assert np.all((hp >= -1 - 1e-12) & (hp <= 3 + 1e-12))
    assert np.all(hp[primes >= 50] == -1.0)
    sf = arith.squarefree_mask(sieve_1e4)
    assert np.all(v[~sf] == 0.0)
    # multiplicativity along the smallest-prime split, exhaustively
    for n in range(2, 10**4 + 1):
        if not sf[n]:
            continue
        p = int(sieve_1e4.spf[n])
        m = n // p
        assert abs(v[n] - v[p] * v[m]) <= 1e-12 * max(1.0, abs(v[n]))


def test_lower_bound_sum_basics(beta25, delta_ev_1e5):
    nf = ss.ExceptionalSet(50.0, frozenset())
    hy = ss.h_Y_table(50.0, 1000, nf, beta25)
    assert ss.lower_bound_sum(hy, -4, 1, 1) == 1.0
    # with every prime exceptional only n = 1 survives
    allp = frozenset(int(p) for p in arith.build_factor_sieve(1000).primes)
    hy0 = ss.h_Y_table(50.0, 1000, ss.ExceptionalSet(50.0, allp), beta25)
    for X in (1, 10, 100, 1000):
        assert ss.lower_bound_sum(hy0, -4, 1, X) == 1.0


def test_lower_bound_sandwich_on_engineered_table(beta25):
    # lam(p) = 1.99 at every prime puts lam_sym2(p) = 2.9601 above every band
    # value, so the minorant sum can never exceed S(X)/w_D
    n_max = 2000
    tab = arith.build_factor_sieve(n_max)
    lam = np.zeros(n_max + 1)
    lam[tab.primes] = 1.99
    ev = ef.EigenvalueTable(level=1, weight=2, n_max=n_max, lam=lam)
    s2 = ef.sym_square(ev, n_max, table=tab)
    cg = qf.enumerate_reduced(-4)
    nf = ss.ExceptionalSet(50.0, frozenset())
    hy = ss.h_Y_table(50.0, n_max, nf, beta25, table=tab)
    for X in (10, 100, 500, 2000):
        lower = ss.lower_bound_sum(hy, -4, 1, X, table=tab)
        upper = ss.sparse_sum(s2, cg, X, table=tab) / 4.0
        assert lower <= upper + 1e-9


def test_convolution_positivity_delta(sym2_1e5, beta25, delta_ev_1e5, sieve_1e4):
    nf = ss.exceptional_set(delta_ev_1e5, 50.0, 10**4)
    hy = ss.h_Y_table(50.0, 10**4, nf, beta25, table=sieve_1e4)
    rep = ss.convolution_positivity_check(sym2_1e5, hy, -4, 10**3)
    assert rep.ok
    assert rep.checked_tail > 0 and rep.checked_band > 0


def test_convolution_positivity_extremal_boundary(beta25):
    # lam_sym2(p) = -1 exactly (theta = pi/2) sits on the tail boundary g = 0
    n_max = 200
    tab = arith.build_factor_sieve(n_max)
    lam = np.zeros(n_max + 1)  # lam(p) = 0 => lam_sym2(p) = -1
    ev = ef.EigenvalueTable(level=1, weight=2, n_max=n_max, lam=lam)
    s2 = ef.sym_square(ev, n_max, table=tab)
    nf = ss.ExceptionalSet(50.0, frozenset())
    hy = ss.h_Y_table(50.0, n_max, nf, beta25, table=tab)
    rep = ss.convolution_positivity_check(s2, hy, -4, n_max)
    assert not rep.tail_violations


def test_mean_value_examples():
    v, _ = ss.mean_value_sum(1, 1, -4, 1)
    assert v == 1.0
    value, predicted = ss.mean_value_sum(1, 10**5, -4, 1)
    assert 0.9 <= value / predicted <= 1.1
    v3, p3 = ss.mean_value_sum(3, 10**5, -4, 1)
    assert np.isfinite(v3 / p3) and v3 > 0


def test_mean_value_matches_direct_sum(sieve_1e4):
    # independent slow evaluation of the finite sum itself
    val, _ = ss.mean_value_sum(2, 3000, -4, 1)
    direct = 0.0
    for n in range(1, 3001):
        mu_sq, omega, _ = arith.arith_stats(n, sieve_1e4)
        direct += mu_sq * 2.0**omega * qf.r_star(n, -4)
    assert abs(val - direct) < 1e-9


def test_factorization_diagnostic(delta_ev_1e5):
    d = ss.factorization_diagnostic(delta_ev_1e5, -4, 2.0, 10**4)
    for x in (d.lhs, d.rhs, d.rel_dev, d.series_plain, d.series_twisted, d.correction):
        assert np.isfinite(x)
    assert d.rel_dev >= 0


def test_factorization_prime_coefficient_identity(delta_ev_1e5, sym2_1e5, sieve_1e4):
    # Dirichlet coefficient of the sparse series at prime p is
    # lam_sym2(p) * (1 + chi_D(p)), exactly, for p not dividing N|D|
    rst = qf.r_star_table(-4, sieve_1e4)
    for p in sieve_1e4.primes[:500]:
        p = int(p)
        if p == 2:
            continue
        chi = arith.kronecker(-4, p)
        assert rst[p] == 1 + chi
        assert sym2_1e5.lam2[p] * rst[p] == sym2_1e5.lam2[p] * (1 + chi)


def test_factorization_lhs_matches_own_euler_product(delta_ev_1e5, sym2_1e5, sieve_1e5):
    # the truncated sparse series must agree with its own Euler product over
    # p <= cutoff; this validates the series accumulation independently of
    # the three-factor model
    d = ss.factorization_diagnostic(delta_ev_1e5, -4, 2.0, 10**5)
    primes = sieve_1e5.primes
    chi = arith.chi_pattern(-4)[primes % 4].astype(np.float64)
    prod = float(np.prod(1.0 + sym2_1e5.lam2[primes] * (1.0 + chi) * primes.astype(float) ** -2.0))
    assert abs(d.lhs - prod) / abs(d.lhs) < 1e-7


def test_factorization_domain(delta_ev_1e5):
    with pytest.raises(DomainError):
        ss.factorization_diagnostic(delta_ev_1e5, -4, 1.0, 100)
