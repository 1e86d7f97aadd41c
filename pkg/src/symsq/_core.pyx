# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: sieve, multiplicative tables, lattice counts, DDE.

Semantics match symsq._core_py exactly; tests/test_backends.py keeps the two
in lockstep.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow as cpow

cnp.import_array()

BACKEND_NAME = "cython"


def spf_sieve(long limit):
    """Smallest-prime-factor table for 0..limit as uint32."""
    spf_arr = np.zeros(limit + 1, dtype=np.uint32)
    cdef unsigned int[::1] spf = spf_arr
    cdef long p, m
    if limit >= 1:
        spf[1] = 1
    p = 2
    while p * p <= limit:
        if spf[p] == 0:
            m = p * p
            while m <= limit:
                if spf[m] == 0:
                    spf[m] = <unsigned int> p
                m += p
        p += 1
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p] = <unsigned int> p
    return spf_arr


def multiplicative_table(spf_arr, primes_arr, prime_index_arr, pp_flat_arr, pp_off_arr):
    """Assemble f(n) from prime-power values f(p_j^e) = pp_flat[pp_off[j]+e-1]."""
    cdef unsigned int[::1] spf = spf_arr
    cdef int[::1] prime_index = prime_index_arr
    cdef double[::1] pp_flat = pp_flat_arr
    cdef long[::1] pp_off = pp_off_arr
    cdef long limit = len(spf_arr) - 1
    out_arr = np.ones(limit + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    out[0] = 0.0
    cdef long n, m, p, e
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        e = 1
        while m % p == 0:
            m //= p
            e += 1
        out[n] = out[m] * pp_flat[pp_off[prime_index[p]] + e - 1]
    return out_arr


def box_count(long a, long b, long c, long disc, long n):
    """Count integer (x1, x2) with a*x1^2 + b*x1*x2 + c*x2^2 = n by box scan."""
    cdef long absd = -disc
    cdef long bx1 = <long> ((4.0 * c * n / absd) ** 0.5) + 2
    cdef long bx2 = <long> ((4.0 * a * n / absd) ** 0.5) + 2
    cdef long x1, x2, q, cnt = 0
    for x2 in range(-bx2, bx2 + 1):
        for x1 in range(-bx1, bx1 + 1):
            q = a * x1 * x1 + b * x1 * x2 + c * x2 * x2
            if q == n:
                cnt += 1
    return cnt


cdef long _segment(double[::1] nodes, double t, long nn) nogil:
    """searchsorted(nodes, t, side='right') - 1 via binary search."""
    cdef long lo = 0, hi = nn, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if nodes[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    return lo - 1


cdef double _hist(double[::1] nodes, double[::1] sigma, long nn,
                  double x1, double chi0m1, double t) nogil:
    """History lookup: 0 for t <= 0, exact power on (0, x1], else cubic."""
    cdef long seg, st, i, j
    cdef double num, den, acc, w
    if t <= 0.0:
        return 0.0
    if t <= x1:
        return cpow(t, chi0m1)
    seg = _segment(nodes, t, nn)
    st = seg - 1
    if st < 0:
        st = 0
    if st > nn - 4:
        st = nn - 4
    acc = 0.0
    for i in range(4):
        num = 1.0
        den = 1.0
        for j in range(4):
            if j != i:
                num *= t - nodes[st + j]
                den *= nodes[st + i] - nodes[st + j]
        acc += sigma[st + i] * num / den
    return acc


def dde_rk4(nodes_arr, delays_arr, jumps_arr, double chi0):
    """Fixed-step RK4 for the delayed ODE; see _core_py.dde_rk4."""
    cdef double[::1] nodes = nodes_arr
    cdef double[::1] delays = delays_arr
    cdef double[::1] jumps = jumps_arr
    cdef long nn = len(nodes_arr)
    cdef long nk = len(delays_arr)
    sigma_arr = np.zeros(nn, dtype=np.float64)
    cdef double[::1] sigma = sigma_arr
    cdef double x1 = nodes[0]
    cdef double chi0m1 = chi0 - 1.0
    cdef double one_m_chi0 = 1.0 - chi0
    cdef long i, k
    cdef double h, y, u, um, ue, d0, dm, de, k1, k2, k3, k4

    sigma[0] = cpow(x1, chi0m1)
    for i in range(nn - 1):
        u = nodes[i]
        h = nodes[i + 1] - u
        um = u + 0.5 * h
        ue = u + h
        y = sigma[i]
        d0 = 0.0
        dm = 0.0
        de = 0.0
        for k in range(nk):
            d0 += jumps[k] * _hist(nodes, sigma, nn, x1, chi0m1, u - delays[k])
            dm += jumps[k] * _hist(nodes, sigma, nn, x1, chi0m1, um - delays[k])
            de += jumps[k] * _hist(nodes, sigma, nn, x1, chi0m1, ue - delays[k])
        k1 = -(one_m_chi0 * y + d0) / u
        k2 = -(one_m_chi0 * (y + 0.5 * h * k1) + dm) / um
        k3 = -(one_m_chi0 * (y + 0.5 * h * k2) + dm) / um
        k4 = -(one_m_chi0 * (y + h * k3) + de) / ue
        sigma[i + 1] = y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return sigma_arr
