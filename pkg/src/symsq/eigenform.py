"""Hecke eigenforms: exact q-expansions, eigenvalue tables, symmetric squares.

The built-in form is the discriminant cusp form Delta (level 1, weight 12,
coefficients tau(n)); arbitrary eigenforms of square-free level enter through
the q-expansion text format documented in ``load_qexpansion``.  Eigenvalue
tables are plain float64 arrays normalised by n^((k-1)/2); symmetric-square
tables are defined only at indices coprime to the level and carry NaN
elsewhere.
"""

import re
from dataclasses import dataclass
from math import acos, gcd, isqrt, sin

import numpy as np

from . import _eta
from .arith import FactorTable, build_factor_sieve, coprime_mask, multiplicative_table
from .errors import (
    CapacityError,
    DegenerateAngleError,
    DomainError,
    ParseError,
    ValidationError,
)

DEFAULT_EXACT_LIMIT = 10**6

#: floats in (-ZERO_TOL, ZERO_TOL) are treated as zero in sign decisions
ZERO_TOL = 1e-10

_HECKE_REL_TOL = 1e-9


def _is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1
    return True


@dataclass
class QExpansion:
    """Exact integer Fourier coefficients a(1..n_max); a[0] is a 0 sentinel."""

    level: int
    weight: int
    n_max: int
    a: list


@dataclass
class EigenvalueTable:
    """Normalised eigenvalues lam[n] = a(n) / n^((weight-1)/2); lam[0] = 0."""

    level: int
    weight: int
    n_max: int
    lam: np.ndarray


@dataclass
class SymSquareTable:
    """Symmetric-square coefficients; NaN marks gcd(n, level) > 1 (undefined)."""

    level: int
    n_max: int
    lam2: np.ndarray

    def is_defined(self, n: int) -> bool:
        return not np.isnan(self.lam2[n])


def delta_qexpansion(n_max: int, *, exact_limit: int = DEFAULT_EXACT_LIMIT) -> QExpansion:
    """Exact tau(1..n_max) as the q-expansion of Delta = q * prod(1-q^m)^24."""
    if n_max < 1:
        raise DomainError("n_max must be positive")
    if n_max > exact_limit:
        raise CapacityError(
            f"n_max={n_max} exceeds the exact-arithmetic limit {exact_limit}"
        )
    return QExpansion(level=1, weight=12, n_max=n_max, a=_eta.tau_exact(n_max))


def delta_eigenvalue_table(n_max: int) -> EigenvalueTable:
    """Normalised Delta eigenvalues to n_max, computed exactly then rounded.

    Unlike delta_qexpansion this never materialises big integers per
    coefficient, so it scales to the 1e7 range used by the sparse sums.
    """
    if n_max < 1:
        raise DomainError("n_max must be positive")
    return EigenvalueTable(1, 12, n_max, _eta.delta_lambda(n_max))


_HEADER_RE = re.compile(r"^# level=(\d+) weight=(\d+) n_max=(\d+)$")
_COEFF_RE = re.compile(r"^(\d+)\t(-?\d+)$")


def load_qexpansion(source) -> QExpansion:
    """Parse the q-expansion text format.

    Line 1: ``# level=<N> weight=<k> n_max=<M>``; then exactly M lines
    ``<n><TAB><a_n>`` with n ascending from 1 and a_n a decimal integer.
    Raises ParseError/ValidationError carrying the offending line number.
    """
    data = source.read() if hasattr(source, "read") else bytes(source)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(1, f"not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "empty input")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ParseError(1, "malformed header (expected '# level=<N> weight=<k> n_max=<M>')")
    level, weight, n_max = (int(g) for g in m.groups())
    if not _is_squarefree(level):
        raise ValidationError(f"level {level} is not square-free", line=1)
    if weight < 2 or weight % 2:
        raise ValidationError(f"weight must be an even integer >= 2, got {weight}", line=1)
    if n_max < 1:
        raise ValidationError("n_max must be positive", line=1)
    a = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        lineno = n + 1
        if lineno > len(lines):
            raise ParseError(lineno, f"missing coefficient line for n={n}")
        cm = _COEFF_RE.match(lines[lineno - 1])
        if cm is None:
            raise ParseError(lineno, f"expected '<n><TAB><integer>', got {lines[lineno - 1]!r}")
        idx = int(cm.group(1))
        if idx != n:
            raise ParseError(lineno, f"coefficient index {idx} where n={n} was expected")
        a[n] = int(cm.group(2))
    if len(lines) > n_max + 1:
        raise ParseError(n_max + 2, "unexpected content after the last coefficient")
    if a[1] != 1:
        raise ValidationError(f"a(1) must equal 1 for a normalised eigenform, got {a[1]}", line=2)
    return QExpansion(level, weight, n_max, a)


def normalize(q: QExpansion) -> EigenvalueTable:
    """lam(n) = a(n) / n^((weight-1)/2) in double precision."""
    expo = (q.weight - 1) / 2.0
    lam = np.zeros(q.n_max + 1, dtype=np.float64)
    for n in range(1, q.n_max + 1):
        lam[n] = float(q.a[n]) / float(n) ** expo
    return EigenvalueTable(q.level, q.weight, q.n_max, lam)


def extend_hecke(lam_p: float, e_max: int) -> np.ndarray:
    """lam(p^0..p^e_max) from lam(p^(r+1)) = lam(p)lam(p^r) - lam(p^(r-1))."""
    if abs(lam_p) > 2.0 + 1e-6:
        raise DomainError(f"|lam_p| = {abs(lam_p)} violates the two-sided bound 2")
    out = np.empty(e_max + 1, dtype=np.float64)
    out[0] = 1.0
    if e_max >= 1:
        out[1] = lam_p
    for e in range(2, e_max + 1):
        out[e] = lam_p * out[e - 1] - out[e - 2]
    return out


def _sym2_prime_powers(lam_p: float, e_max: int) -> np.ndarray:
    """Symmetric-square values at p^1..p^e_max: s_e = lam(p^(2e)) + s_(e-2)."""
    u = extend_hecke(lam_p, 2 * e_max)
    s = np.empty(e_max + 1, dtype=np.float64)
    s[0] = 1.0
    for e in range(1, e_max + 1):
        s[e] = u[2 * e] + (s[e - 2] if e >= 2 else 0.0)
    return s[1:]


def sym_square(
    ev: EigenvalueTable, n_max: int, *, table: FactorTable | None = None
) -> SymSquareTable:
    """Symmetric-square coefficient table to n_max.

    Prime values lam(p) are read from ev for every p <= n_max, extended to
    prime powers by the Hecke recurrence and multiplicatively to all n
    coprime to the level.  Indices sharing a factor with the level are NaN.
    """
    if n_max > ev.n_max:
        raise CapacityError(
            f"eigenvalue table covers n <= {ev.n_max}, need primes to {n_max}"
        )
    if n_max == 1:
        return SymSquareTable(ev.level, 1, np.array([np.nan, 1.0]))
    if table is None or table.limit != n_max:
        table = build_factor_sieve(n_max)
    primes = table.primes
    off = table.pp_offsets
    lam_p = ev.lam[primes]
    pp = np.empty(off[-1], dtype=np.float64)
    pp[off[:-1]] = lam_p * lam_p - 1.0
    counts = np.diff(off)
    for j in np.nonzero(counts > 1)[0]:
        pp[off[j] : off[j + 1]] = _sym2_prime_powers(float(lam_p[j]), int(counts[j]))
    if ev.level > 1:
        lvl = ev.level
        q = 2
        while q <= lvl:
            if lvl % q == 0:
                if q <= n_max:
                    j = int(table.prime_index[q])
                    pp[off[j] : off[j + 1]] = np.nan
                while lvl % q == 0:
                    lvl //= q
            q += 1
    lam2 = multiplicative_table(table, pp)
    lam2[0] = np.nan
    return SymSquareTable(ev.level, n_max, lam2)


def chebyshev_check(ev: EigenvalueTable, p: int, nu_max: int) -> float:
    """Max deviation over 1 <= nu <= nu_max between the recurrence value of
    the symmetric square at p^nu and its closed angular form
    sin((nu+2)t) sin((nu+1)t) / (sin(t) sin(2t)) with t = arccos(lam(p)/2).
    """
    if ev.level % p == 0:
        raise DomainError(f"p={p} divides the level {ev.level}")
    if p > ev.n_max:
        raise CapacityError(f"p={p} beyond table limit {ev.n_max}")
    lam_p = float(ev.lam[p])
    if abs(lam_p) >= 2.0 - 1e-12:
        raise DegenerateAngleError(f"|lam(p)| = {abs(lam_p)} leaves no angle margin")
    theta = acos(lam_p / 2.0)
    denom = sin(theta) * sin(2.0 * theta)
    if abs(denom) < 1e-12:
        raise DegenerateAngleError("sin(t) sin(2t) vanishes; identity is degenerate here")
    s = _sym2_prime_powers(lam_p, nu_max)
    dev = 0.0
    for nu in range(1, nu_max + 1):
        ident = sin((nu + 2) * theta) * sin((nu + 1) * theta) / denom
        dev = max(dev, abs(float(s[nu - 1]) - ident))
    return dev


def divisor_count_table(table: FactorTable) -> np.ndarray:
    """d(n) for n = 0..limit as float64 (values are small exact integers)."""
    off = table.pp_offsets
    pp = np.empty(off[-1], dtype=np.float64)
    pp[off[:-1]] = 2.0
    counts = np.diff(off)
    for j in np.nonzero(counts > 1)[0]:
        pp[off[j] : off[j + 1]] = np.arange(2, counts[j] + 2, dtype=np.float64)
    return multiplicative_table(table, pp)


def _divisors_of(g: int) -> list:
    out = []
    d = 1
    while d * d <= g:
        if g % d == 0:
            out.append(d)
            if d * d != g:
                out.append(g // d)
        d += 1
    return sorted(out)


@dataclass
class EigenformReport:
    trials: int
    max_hecke_deviation: float
    hecke_violations: list
    deligne_violations: list

    @property
    def ok(self) -> bool:
        return not self.hecke_violations and not self.deligne_violations


def verify_eigenform(ev: EigenvalueTable, trials: int, *, seed: int = 0) -> EigenformReport:
    """Sample Hecke-relation identities and check the divisor bound.

    Each trial draws (m, n) with m*n <= n_max and gcd(m*n, level) = 1 and
    tests lam(m)lam(n) = sum over d | gcd(m,n) of lam(mn/d^2) to relative
    tolerance 1e-9.  |lam(n)| <= d(n) is checked for every coprime n.
    Violations are collected in the report, never raised.
    """
    rng = np.random.default_rng(seed)
    lam = ev.lam
    n_max = ev.n_max
    hecke_viol = []
    max_dev = 0.0
    done = 0
    while done < trials:
        m = int(rng.integers(1, isqrt(n_max) + 1))
        n = int(rng.integers(1, n_max // m + 1))
        if gcd(m * n, ev.level) != 1:
            continue
        done += 1
        lhs = lam[m] * lam[n]
        rhs = 0.0
        for d in _divisors_of(gcd(m, n)):
            rhs += lam[m * n // (d * d)]
        dev = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        max_dev = max(max_dev, dev)
        if dev > _HECKE_REL_TOL:
            hecke_viol.append((m, n, float(lhs), float(rhs)))

    table = build_factor_sieve(max(n_max, 2))
    dcount = divisor_count_table(table)[: n_max + 1]
    cop = coprime_mask(n_max, ev.level)
    bad = np.nonzero(cop & (np.abs(lam) > dcount + 1e-9))[0]
    deligne_viol = [(int(n), float(lam[n]), float(dcount[n])) for n in bad]
    return EigenformReport(trials, float(max_dev), hecke_viol, deligne_viol)
