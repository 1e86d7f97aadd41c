"""Pure-Python (numpy) implementations of the hot kernels.

This module mirrors the compiled extension ``symsq._core`` function by
function; the active implementation is chosen at import time by
``symsq._kernels``.  Everything here is vectorised numpy, so it stays usable
without a C compiler, just slower than the Cython core (see
``benchmarks/bench_kernels.py``).
"""

from math import isqrt

import numpy as np

BACKEND_NAME = "python"


def spf_sieve(limit):
    """Smallest-prime-factor table for 0..limit as uint32.

    spf[0] = 0 and spf[1] = 1 are sentinels; spf[n] for n >= 2 is the least
    prime dividing n (= n exactly when n is prime).
    """
    spf = np.zeros(limit + 1, dtype=np.uint32)
    spf[1] = 1
    if limit >= 2:
        spf[2::2] = 2
    for p in range(3, isqrt(limit) + 1, 2):
        if spf[p] == 0:
            sl = spf[p * p :: 2 * p]
            sl[sl == 0] = p
    # everything still unmarked is prime
    left = np.nonzero(spf[3:] == 0)[0] + 3
    spf[left] = left.astype(np.uint32)
    return spf


def multiplicative_table(spf, primes, prime_index, pp_flat, pp_off):
    """Assemble f(n) for a multiplicative f from its prime-power values.

    pp_flat[pp_off[j] + e - 1] must hold f(p_j^e) for every exponent e with
    p_j^e <= limit.  f(1) = 1; out[0] is set to 0.  NaN prime-power values
    propagate, which is how callers mark undefined residue classes.
    """
    limit = len(spf) - 1
    out = np.ones(limit + 1, dtype=np.float64)
    out[0] = 0.0
    if limit < 2:
        return out
    pfac = np.empty(limit + 1, dtype=np.float64)
    # descending, so each n accumulates factors largest prime first: this is
    # bit-identical to the compiled core's smallest-prime-factor recursion
    for j in range(len(primes) - 1, -1, -1):
        p = int(primes[j])
        vals = pp_flat[pp_off[j] : pp_off[j + 1]]
        q = p
        for e in range(len(vals)):
            pfac[q::q] = vals[e]
            if q > limit // p:
                break
            q *= p
        out[p::p] *= pfac[p::p]
    return out


def box_count(a, b, c, disc, n):
    """Number of integer pairs (x1, x2) with a*x1^2 + b*x1*x2 + c*x2^2 = n.

    Complete by construction: any solution satisfies |D| x2^2 <= 4an, and for
    each x2 the x1 values are the integer roots of a quadratic whose
    discriminant is D x2^2 + 4an.
    """
    absd = -disc
    bx2 = isqrt(4 * a * n // absd) + 1
    x2 = np.arange(-bx2, bx2 + 1, dtype=np.int64)
    discx = disc * x2 * x2 + 4 * a * n
    keep = discx >= 0
    x2 = x2[keep]
    discx = discx[keep]
    s = np.floor(np.sqrt(discx.astype(np.float64))).astype(np.int64)
    # repair float sqrt rounding
    for _ in range(2):
        s += (s + 1) * (s + 1) <= discx
        s -= s * s > discx
    is_sq = s * s == discx
    two_a = 2 * a
    num_plus = -b * x2 + s
    num_minus = -b * x2 - s
    cnt = int(np.count_nonzero(is_sq & (num_plus % two_a == 0)))
    cnt += int(np.count_nonzero(is_sq & (s > 0) & (num_minus % two_a == 0)))
    return cnt


def _interp_weights(nodes, t):
    """4-point Lagrange stencil (start index, weights) for targets t."""
    t = np.asarray(t, dtype=np.float64)
    seg = np.searchsorted(nodes, t, side="right") - 1
    st = np.clip(seg - 1, 0, len(nodes) - 4)
    z = nodes[st[..., None] + np.arange(4)]
    w = np.empty(z.shape, dtype=np.float64)
    tt = t[..., None]
    for i in range(4):
        num = 1.0
        den = 1.0
        for j in range(4):
            if j != i:
                num = num * (tt[..., 0] - z[..., j])
                den = den * (z[..., i] - z[..., j])
        w[..., i] = num / den
    return st, w


def interp_cubic(nodes, values, t):
    """Cubic Lagrange interpolation of tabulated values at targets t."""
    st, w = _interp_weights(nodes, np.asarray(t, dtype=np.float64))
    idx = st[..., None] + np.arange(4)
    return np.sum(values[idx] * w, axis=-1)


def dde_rk4(nodes, delays, jumps, chi0):
    """Integrate u*s'(u) + (1-chi0)*s(u) + sum_k jumps[k]*s(u-delays[k]) = 0.

    nodes must start at the shortest delay x1 and be sorted; the history on
    (0, x1] is the exact power u**(chi0-1) and 0 for u <= 0.  Delayed values
    inside the computed range are read back by cubic interpolation.  Returns
    s on the nodes.
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    delays = np.asarray(delays, dtype=np.float64)
    jumps = np.asarray(jumps, dtype=np.float64)
    x1 = nodes[0]
    nn = len(nodes)
    sigma = np.zeros(nn, dtype=np.float64)
    sigma[0] = x1 ** (chi0 - 1.0)

    # Stage abscissae u, u+h/2, u+h for every step; all delayed arguments are
    # known in advance, so classify and precompute stencils once.
    h = np.diff(nodes)
    u0 = nodes[:-1]
    stage_u = np.stack([u0, u0 + 0.5 * h, u0 + h], axis=1)  # (steps, 3)
    targets = stage_u[:, :, None] - delays[None, None, :]  # (steps, 3, K)

    analytic = (targets > 0.0) & (targets <= x1)
    gridded = targets > x1
    base = np.zeros_like(targets)
    base[analytic] = targets[analytic] ** (chi0 - 1.0)
    st, w = _interp_weights(nodes, np.where(gridded, targets, x1))
    idx = st[..., None] + np.arange(4)  # (steps, 3, K, 4)

    one_m_chi0 = 1.0 - chi0
    for i in range(nn - 1):
        hi = h[i]
        y = sigma[i]
        hist = base[i].copy()
        g = gridded[i]
        if g.any():
            hist[g] = np.sum(sigma[idx[i][g]] * w[i][g], axis=-1)
        dsum = hist @ jumps  # (3,)
        uu = stage_u[i]
        k1 = -(one_m_chi0 * y + dsum[0]) / uu[0]
        k2 = -(one_m_chi0 * (y + 0.5 * hi * k1) + dsum[1]) / uu[1]
        k3 = -(one_m_chi0 * (y + 0.5 * hi * k2) + dsum[1]) / uu[1]
        k4 = -(one_m_chi0 * (y + hi * k3) + dsum[2]) / uu[2]
        sigma[i + 1] = y + hi * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return sigma
