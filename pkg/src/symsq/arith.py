"""Elementary number-theoretic primitives shared by every other module.

A single smallest-prime-factor sieve (``FactorTable``) backs all bulk
factorisation work: square-free detection, distinct-prime counts, divisor
counts, and the assembly of arbitrary multiplicative tables from their
prime-power values.
"""

from dataclasses import dataclass
from functools import cached_property
from math import isqrt

import numpy as np

from ._kernels import kernels
from .errors import CapacityError, DomainError

SIEVE_LIMIT_MAX = 10**8


@dataclass
class FactorTable:
    """Smallest-prime-factor table for 2..limit.

    spf[n] divides n, equals n exactly when n is prime, and is otherwise
    at most sqrt(n).  Immutable after construction; shared freely.
    """

    limit: int
    spf: np.ndarray

    @cached_property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1, dtype=np.uint32)
        return np.nonzero(self.spf == idx)[0][2:].astype(np.int64)

    @cached_property
    def prime_index(self) -> np.ndarray:
        pidx = np.zeros(self.limit + 1, dtype=np.int32)
        pidx[self.primes] = np.arange(len(self.primes), dtype=np.int32)
        return pidx

    @cached_property
    def pp_offsets(self) -> np.ndarray:
        """CSR offsets: prime j owns slots for exponents 1..e_max(p_j)."""
        counts = np.ones(len(self.primes) + 1, dtype=np.int64)
        counts[0] = 0
        root = isqrt(self.limit)
        for j, p in enumerate(self.primes):
            if p > root:
                break
            q, e = int(p), 1
            while q <= self.limit // p:
                q *= int(p)
                e += 1
            counts[j + 1] = e
        return np.cumsum(counts)


def build_factor_sieve(limit: int) -> FactorTable:
    """Sieve smallest prime factors up to ``limit`` (2 <= limit <= 1e8)."""
    if not 2 <= limit <= SIEVE_LIMIT_MAX:
        raise CapacityError(f"sieve limit must be in [2, {SIEVE_LIMIT_MAX}], got {limit}")
    return FactorTable(limit, kernels.spf_sieve(limit))


def factorize(n: int, table: FactorTable):
    """Yield (p, e) pairs of the prime factorisation of n <= table.limit."""
    if n > table.limit:
        raise CapacityError(f"{n} exceeds sieve limit {table.limit}")
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    spf = table.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        yield p, e


def arith_stats(n: int, table: FactorTable) -> tuple[int, int, int]:
    """(mu^2(n), omega(n), d(n)): square-free flag, distinct-prime count,
    divisor count."""
    mu_sq, omega, d = 1, 0, 1
    for _, e in factorize(n, table):
        omega += 1
        d *= e + 1
        if e >= 2:
            mu_sq = 0
    return mu_sq, omega, d


def _jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd m > 0."""
    a %= m
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                t = -t
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a discriminant D and n >= 0.

    Completely multiplicative in n and periodic with period |D|; zero exactly
    when n shares a prime with D.  n = 0 maps to 1 iff |D| = 1.
    """
    if D % 4 not in (0, 1):
        raise DomainError(f"{D} is not a discriminant (D mod 4 must be 0 or 1)")
    if n < 0:
        raise DomainError("kronecker is defined here for n >= 0 only")
    if n == 0:
        return 1 if abs(D) == 1 else 0
    t = 1
    if n % 2 == 0:
        if D % 2 == 0:
            return 0
        e2 = 0
        while n % 2 == 0:
            n //= 2
            e2 += 1
        if e2 % 2 == 1 and D % 8 in (3, 5):
            t = -t
    return t * _jacobi(D, n)


def chi_pattern(D: int) -> np.ndarray:
    """chi_D on residues 0..|D|-1 as int8 (chi_D is periodic mod |D|)."""
    mod = abs(D)
    return np.array([kronecker(D, r) for r in range(mod)], dtype=np.int8)


def chi_on_primes(D: int, table: FactorTable) -> np.ndarray:
    """chi_D(p) for every prime p <= table.limit, via the mod-|D| pattern."""
    pattern = chi_pattern(D)
    return pattern[table.primes % abs(D)]


def multiplicative_table(table: FactorTable, pp_flat: np.ndarray) -> np.ndarray:
    """Dense f(0..limit) for multiplicative f given prime-power values.

    pp_flat is laid out by table.pp_offsets: slot pp_offsets[j] + e - 1 holds
    f(p_j^e).  NaN values propagate to every multiple of their prime.
    """
    off = table.pp_offsets
    if len(pp_flat) != off[-1]:
        raise ValueError("prime-power value array does not match pp_offsets")
    return kernels.multiplicative_table(
        table.spf, table.primes, table.prime_index, pp_flat, off
    )


def squarefree_mask(table: FactorTable) -> np.ndarray:
    """Boolean mask m with m[n] = (n is square-free); m[0] = False."""
    mask = np.ones(table.limit + 1, dtype=bool)
    mask[0] = False
    for p in range(2, isqrt(table.limit) + 1):
        if table.spf[p] == p:
            mask[p * p :: p * p] = False
    return mask


def coprime_mask(limit: int, level: int) -> np.ndarray:
    """Boolean mask m with m[n] = (gcd(n, level) == 1); m[0] = level == 1."""
    mask = np.ones(limit + 1, dtype=bool)
    n = level
    p = 2
    while p * p <= n:
        if n % p == 0:
            mask[p::p] = False
            while n % p == 0:
                n //= p
        p += 1
    if n > 1 and n <= limit:
        mask[n::n] = False
    mask[0] = level == 1
    return mask
