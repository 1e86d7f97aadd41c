"""First-moment sums of symmetric-square coefficients over represented
integers, first-negative-index searches, and the minorant machinery.

Every sum here runs over square-free n coprime to the level, weighted by the
representation character sum r*_D(n).  Bulk tables (square-free mask, r*,
the multiplicative minorant h_Y) are assembled once per call from a shared
factor sieve, so all operations are single linear passes.
"""

from dataclasses import dataclass
from math import gamma, log

import numpy as np

from .arith import (
    FactorTable,
    build_factor_sieve,
    chi_pattern,
    coprime_mask,
    multiplicative_table,
    squarefree_mask,
)
from .eigenform import ZERO_TOL, EigenvalueTable, SymSquareTable, sym_square
from .errors import CapacityError, DomainError, FitError
from .quadforms import (
    ClassGroup,
    dirichlet_L1,
    is_fundamental_discriminant,
    r_star_table,
    chi_table,
    unit_weight,
)
from .sigma_dde import StepBeta, beta_eval


@dataclass
class SumSeries:
    """S(X) sampled on an ascending grid of X values."""

    D: int
    level: int
    grid: np.ndarray
    S: np.ndarray


@dataclass
class ExceptionalSet:
    """Primes excluded from the minorant: level divisors plus the finitely
    many p whose eigenvalue hits 2 cos(pi/(nu+2)) for some nu <= log Y."""

    Y: float
    primes: frozenset


@dataclass
class HYTable:
    """Values of the square-free-supported multiplicative minorant h_Y."""

    Y: float
    n_max: int
    values: np.ndarray
    nf: ExceptionalSet
    beta: StepBeta


@dataclass
class PositivityReport:
    checked_tail: int
    checked_band: int
    tail_violations: list
    band_violations: list

    @property
    def ok(self) -> bool:
        return not self.tail_violations and not self.band_violations


@dataclass
class FactorizationDiagnostic:
    lhs: float
    rhs: float
    rel_dev: float
    series_plain: float
    series_twisted: float
    correction: float


def _table_for(X: int, table: FactorTable | None) -> FactorTable:
    if table is not None and table.limit == X:
        return table
    return build_factor_sieve(max(X, 2))


def _contributions(sym2: SymSquareTable, cg: ClassGroup, X: int, table: FactorTable) -> np.ndarray:
    """w_D * lam_sym2(n) * r*_D(n) over square-free n coprime to the level,
    zero elsewhere, for n = 0..X."""
    lam2 = sym2.lam2[: X + 1]
    rst = r_star_table(cg.D, table)[: X + 1]
    mask = squarefree_mask(table)[: X + 1] & ~np.isnan(lam2)
    return unit_weight(cg.D) * np.where(mask, lam2 * rst, 0.0)


def sparse_sum(
    sym2: SymSquareTable, cg: ClassGroup, X: int, *, table: FactorTable | None = None
) -> float:
    """S(sym^2 f, D; X): one-point evaluation of the sparse first moment."""
    X = int(X)
    if X > sym2.n_max:
        raise CapacityError(f"X={X} beyond symmetric-square table limit {sym2.n_max}")
    if X < 1:
        raise DomainError("X must be at least 1")
    return float(_contributions(sym2, cg, X, _table_for(X, table)).sum())


def sum_series(
    sym2: SymSquareTable, cg: ClassGroup, grid, *, table: FactorTable | None = None
) -> SumSeries:
    """S(X) on an ascending grid, in one accumulation pass."""
    grid = np.asarray(sorted(int(x) for x in grid), dtype=np.int64)
    if len(grid) == 0 or grid[0] < 1:
        raise DomainError("grid must contain positive X values")
    x_max = int(grid[-1])
    if x_max > sym2.n_max:
        raise CapacityError(f"grid reaches {x_max}, table covers {sym2.n_max}")
    contrib = _contributions(sym2, cg, x_max, _table_for(x_max, table))
    cum = np.cumsum(contrib)
    return SumSeries(cg.D, sym2.level, grid, cum[grid])


def exponent_fit(series: SumSeries) -> float:
    """Least-squares slope of log(running sup |S|) against log X.

    The running supremum tames sign oscillation; the result estimates the
    growth exponent of the sum.
    """
    if len(series.grid) < 4:
        raise FitError("need at least 4 grid points")
    run = np.maximum.accumulate(np.abs(series.S))
    keep = run > 0
    if np.count_nonzero(keep) < 4:
        raise FitError("series is zero on almost the whole grid")
    x = np.log(series.grid[keep].astype(np.float64))
    y = np.log(run[keep])
    return float(np.polyfit(x, y, 1)[0])


def first_negative(
    sym2: SymSquareTable,
    cap: int,
    *,
    squarefree_only: bool = False,
    table: FactorTable | None = None,
) -> int | None:
    """Least n <= cap, coprime to the level, with lam_sym2(n) < -1e-10.

    Returns None when no such n exists below the cap.  With squarefree_only
    the search is restricted to square-free n.
    """
    cap = int(cap)
    if cap > sym2.n_max:
        raise CapacityError(f"cap={cap} beyond table limit {sym2.n_max}")
    lam2 = sym2.lam2[: cap + 1]
    mask = lam2 < -ZERO_TOL  # NaN compares False, so undefined n drop out
    if squarefree_only:
        mask &= squarefree_mask(_table_for(cap, table))[: cap + 1]
    idx = int(np.argmax(mask))
    return idx if mask[idx] else None


def first_negative_sparse(
    sym2: SymSquareTable,
    cg: ClassGroup,
    cap: int,
    *,
    squarefree_only: bool = False,
    table: FactorTable | None = None,
) -> int | None:
    """As first_negative, additionally requiring r_D(n) > 0 (n represented)."""
    cap = int(cap)
    if cap > sym2.n_max:
        raise CapacityError(f"cap={cap} beyond table limit {sym2.n_max}")
    tab = _table_for(cap, table)
    lam2 = sym2.lam2[: cap + 1]
    mask = (lam2 < -ZERO_TOL) & (r_star_table(cg.D, tab)[: cap + 1] > 0.5)
    if squarefree_only:
        mask &= squarefree_mask(tab)[: cap + 1]
    idx = int(np.argmax(mask))
    return idx if mask[idx] else None


def exceptional_set(
    ev: EigenvalueTable, Y: float, p_max: int, *, table: FactorTable | None = None
) -> ExceptionalSet:
    """Level divisors plus primes p <= p_max with lam(p) within 1e-9 of
    2 cos(pi/(nu+2)) for some 1 <= nu <= log Y."""
    if p_max > ev.n_max:
        raise CapacityError(f"p_max={p_max} beyond table limit {ev.n_max}")
    members = set()
    lvl = ev.level
    p = 2
    while p * p <= lvl:
        if lvl % p == 0:
            members.add(p)
            while lvl % p == 0:
                lvl //= p
        p += 1
    if lvl > 1:
        members.add(lvl)

    nu_max = int(log(Y)) if Y > 1 else 0
    if nu_max >= 1:
        tab = _table_for(p_max, table)
        primes = tab.primes
        lam_p = ev.lam[primes]
        targets = 2.0 * np.cos(np.pi / (np.arange(1, nu_max + 1) + 2.0))
        hit = np.zeros(len(primes), dtype=bool)
        for t in targets:
            hit |= np.abs(lam_p - t) < 1e-9
        members.update(int(p) for p in primes[hit])
    return ExceptionalSet(float(Y), frozenset(members))


def h_Y_table(
    Y: float,
    n_max: int,
    nf: ExceptionalSet,
    beta: StepBeta,
    *,
    table: FactorTable | None = None,
) -> HYTable:
    """Square-free-supported multiplicative minorant.

    At primes: the band value beta(log p / log Y) below Y, -1 from Y on, and
    0 on the exceptional set; extended multiplicatively with support exactly
    the square-free integers.
    """
    if Y <= 2:
        raise DomainError(f"Y must exceed 2, got {Y}")
    n_max = int(n_max)
    tab = _table_for(n_max, table)
    primes = tab.primes
    off = tab.pp_offsets
    logy = log(Y)
    t = np.log(primes.astype(np.float64)) / logy
    band = beta.chi[np.searchsorted(beta.x, t, side="right")]
    hp = np.where(primes >= Y, -1.0, band)
    if nf.primes:
        hp[np.isin(primes, np.fromiter(nf.primes, dtype=np.int64))] = 0.0
    pp = np.zeros(off[-1], dtype=np.float64)
    pp[off[:-1]] = hp
    values = multiplicative_table(tab, pp)
    values[0] = 0.0
    return HYTable(float(Y), n_max, values, nf, beta)


def lower_bound_sum(
    hy: HYTable, D: int, level: int, X, *, table: FactorTable | None = None
) -> float:
    """Sum of h_Y(n) r*_D(n) over square-free n <= X coprime to the level."""
    X = int(X)
    if X > hy.n_max:
        raise CapacityError(f"X={X} beyond h_Y table limit {hy.n_max}")
    tab = _table_for(X, table)
    rst = r_star_table(D, tab)[: X + 1]
    cop = coprime_mask(X, level)
    return float(np.sum(hy.values[: X + 1] * rst * cop))


def convolution_positivity_check(
    sym2: SymSquareTable,
    hy: HYTable,
    D: int,
    p_max: int,
    *,
    table: FactorTable | None = None,
) -> PositivityReport:
    """Verify the two prime-level facts that make the minorant argument work.

    Tail (p >= Y, p coprime to the level): the convolution coefficient
    (lam_sym2(p) - h_Y(p)) r*_D(p) is nonnegative, since lam_sym2(p) >= -1
    and h_Y(p) = -1.  Band (p < Y, p not exceptional): whenever
    lam_sym2(p^j) >= 0 for every p^j <= Y, the prime value dominates its band
    floor beta(log p / log Y).  Violations are reported, not raised.
    """
    if p_max > sym2.n_max:
        raise CapacityError(f"p_max={p_max} beyond symmetric-square table {sym2.n_max}")
    tab = _table_for(p_max, table)
    primes = tab.primes
    pattern = chi_pattern(D)
    Y = hy.Y
    logy = log(Y)
    lam2 = sym2.lam2
    tail_viol = []
    band_viol = []
    checked_tail = checked_band = 0
    exceptional = hy.nf.primes
    for p in primes:
        p = int(p)
        if sym2.level % p == 0:
            continue
        if p >= Y:
            checked_tail += 1
            g = (lam2[p] - hy.values[p]) * float(1 + pattern[p % (-D)])
            if g < -ZERO_TOL:
                tail_viol.append((p, float(g)))
        elif p not in exceptional:
            q = p
            hypothesis = True
            while q <= Y:
                if q <= sym2.n_max and lam2[q] < -ZERO_TOL:
                    hypothesis = False
                    break
                q *= p
            if not hypothesis:
                continue
            checked_band += 1
            floor = beta_eval(log(p) / logy, hy.beta)
            if lam2[p] < floor - 1e-9:
                band_viol.append((p, float(lam2[p]), float(floor)))
    return PositivityReport(checked_tail, checked_band, tail_viol, band_viol)


def mean_value_sum(
    eta: int, X: int, D: int, level: int, *, table: FactorTable | None = None
) -> tuple[float, float]:
    """Exact sum of mu^2(n) eta^omega(n) r*_D(n) against its main-term model.

    The model is P(1) L(1, chi_D)^eta / Gamma(eta) * X (log X)^(eta-1) with
    P(1) evaluated as a truncated Euler product over primes <= 1e6.
    """
    if eta < 1:
        raise DomainError("eta must be a positive integer")
    X = int(X)
    tab = _table_for(X, table)
    off = tab.pp_offsets
    pp = np.zeros(off[-1], dtype=np.float64)
    pp[off[:-1]] = float(eta)
    weights = multiplicative_table(tab, pp)  # mu^2(n) * eta^omega(n)
    rst = r_star_table(D, tab)[: X + 1]
    cop = coprime_mask(X, level)
    value = float(np.sum(weights[: X + 1] * rst * cop))

    ptab = tab if tab.limit == 10**6 else build_factor_sieve(10**6)
    primes = ptab.primes.astype(np.float64)
    chi = chi_pattern(D)[ptab.primes % (-D)].astype(np.float64)
    inv = 1.0 / primes
    divides_level = np.isin(ptab.primes, [p for p, _ in _factor_pairs(level)])
    factors = np.where(
        divides_level,
        ((1.0 - inv) * (1.0 - chi * inv)) ** eta,
        (1.0 - inv) ** eta * (1.0 - chi * inv) ** eta * (1.0 + eta * (1.0 + chi) * inv),
    )
    p1 = float(np.prod(factors))
    method = "class_number_formula" if is_fundamental_discriminant(D) else "partial_sum"
    l1 = dirichlet_L1(D, method)
    predicted = p1 * l1**eta / gamma(eta) * X * log(X) ** (eta - 1)
    return value, predicted


def _factor_pairs(n: int):
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            yield p, e
        p += 1
    if n > 1:
        yield n, 1


def factorization_diagnostic(
    ev: EigenvalueTable,
    D: int,
    s: float,
    cutoff: int,
    *,
    table: FactorTable | None = None,
) -> FactorizationDiagnostic:
    """Compare the sparse Dirichlet series against its three-factor model.

    lhs is the truncated series sum of lam_sym2(n) r*_D(n) n^-s over
    square-free coprime n; rhs multiplies the plain and twisted
    symmetric-square series by a correction Euler product over p <= cutoff.
    This is a diagnostic: deviations are returned, never asserted.
    """
    if s < 1.5:
        raise DomainError("s must be at least 1.5 for comfortable convergence")
    cutoff = int(cutoff)
    if cutoff > ev.n_max:
        raise CapacityError(f"cutoff={cutoff} beyond eigenvalue table {ev.n_max}")
    tab = _table_for(cutoff, table)
    sym2 = sym_square(ev, cutoff, table=tab)
    n = np.arange(cutoff + 1, dtype=np.float64)
    n[0] = 1.0
    npow = n**-s
    lam2 = sym2.lam2[: cutoff + 1]
    defined = ~np.isnan(lam2)
    lam2z = np.where(defined, lam2, 0.0)
    rst = r_star_table(D, tab)[: cutoff + 1]
    sf = squarefree_mask(tab)[: cutoff + 1]
    chin = chi_table(D, tab)[: cutoff + 1]

    lhs = float(np.sum(np.where(sf & defined, lam2z * rst, 0.0)[1:] * npow[1:]))
    f_plain = float(np.sum(lam2z[1:] * npow[1:]))
    f_twist = float(np.sum(lam2z[1:] * chin[1:] * npow[1:]))

    primes = tab.primes
    lam_p = ev.lam[primes]
    chi_p = chi_pattern(D)[primes % (-D)].astype(np.float64)
    ps = primes.astype(np.float64) ** -s
    lam_sq = lam_p * lam_p
    ramified = np.zeros(len(primes), dtype=bool)
    for q, _ in _factor_pairs(ev.level * D * D):
        ramified |= primes == q
    generic = (
        1.0
        + (2.0 - 2.0 * lam_sq - lam_sq * chi_p) * ps**2
        + lam_p * (1.0 + chi_p) * (1.0 + lam_sq * chi_p) * ps**3
        + (1.0 - 2.0 * lam_sq * (1.0 + chi_p)) * ps**4
        + lam_p * (1.0 + chi_p) * ps**5
    )
    factors = np.where(ramified, 1.0 - lam_p * ps, generic)
    correction = float(np.prod(factors))
    rhs = f_plain * f_twist * correction
    denom = max(abs(lhs), abs(rhs), 1e-300)
    return FactorizationDiagnostic(
        lhs, rhs, abs(lhs - rhs) / denom, f_plain, f_twist, correction
    )
