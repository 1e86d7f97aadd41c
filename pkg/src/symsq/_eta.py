"""Exact integer coefficients of eta(q)^24 = Delta(q)/q at bulk scale.

The truncated eta series (pentagonal-number expansion, coefficients in
{-1, 0, 1}) is raised to the 24th power by binary exponentiation through the
chain 1 -> 2 -> 3 -> 6 -> 12 -> 24, i.e. five truncated series products.
Each product is done exactly by Kronecker substitution: coefficients are
packed into fixed-width slots of one big integer, multiplied with gmpy2/GMP,
and the signed slots recovered afterwards.  Slot widths are chosen per level
from a rigorous convolution bound, so no coefficient ever overflows its slot.

Series between steps live as (sign, magnitude-words) numpy arrays; nothing
here is backend-dependent.
"""

from dataclasses import dataclass
from math import ceil, log2

import gmpy2
import numpy as np

if not np.little_endian:  # pragma: no cover
    raise RuntimeError("eta packing assumes a little-endian platform")

_TWO64 = float(2**64)


@dataclass
class SeriesWords:
    """Signed fixed-width integer series: value_i = (-1)^neg[i] * words[i]."""

    words: np.ndarray  # (n, W) uint64, little-endian limbs
    neg: np.ndarray  # (n,) bool

    def __len__(self):
        return self.words.shape[0]


def eta_series(n_terms: int) -> np.ndarray:
    """Coefficients of prod_{m>=1} (1 - q^m) up to degree n_terms - 1."""
    eta = np.zeros(n_terms, dtype=np.int64)
    eta[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n_terms and g2 >= n_terms:
            break
        s = -1 if k % 2 else 1
        if g1 < n_terms:
            eta[g1] += s
        if g2 < n_terms:
            eta[g2] += s
        k += 1
    return eta


def from_int64(arr: np.ndarray) -> SeriesWords:
    neg = arr < 0
    words = np.abs(arr).astype(np.uint64)[:, None]
    return SeriesWords(words, neg)


def magnitudes_f64(words: np.ndarray) -> np.ndarray:
    """Float approximation of each slot magnitude (relative error ~W ulp)."""
    w = words.shape[1]
    val = words[:, w - 1].astype(np.float64)
    for j in range(w - 2, -1, -1):
        val = val * _TWO64 + words[:, j].astype(np.float64)
    return val


def to_floats(s: SeriesWords) -> np.ndarray:
    val = magnitudes_f64(s.words)
    val[s.neg] = -val[s.neg]
    return val


def slot_ints(s: SeriesWords, lo: int, hi: int) -> list:
    """Exact Python integers for slots lo..hi-1."""
    wb = s.words.shape[1] * 8
    buf = s.words[lo:hi].tobytes()
    out = []
    for i in range(hi - lo):
        v = int.from_bytes(buf[i * wb : (i + 1) * wb], "little")
        out.append(-v if s.neg[lo + i] else v)
    return out


def _pack(s: SeriesWords, w_dst: int) -> gmpy2.mpz:
    n, w_src = s.words.shape
    buf = np.zeros((n, w_dst), dtype=np.uint64)
    buf[:, :w_src] = s.words
    pos = np.where(s.neg[:, None], np.uint64(0), buf)
    npos = gmpy2.mpz.from_bytes(pos.tobytes(), "little")
    buf[~s.neg] = 0
    nneg = gmpy2.mpz.from_bytes(buf.tobytes(), "little")
    return npos - nneg


def _recover(words: np.ndarray) -> SeriesWords:
    """Balanced-digit recovery: raw base-2^b digits -> signed magnitudes.

    Valid when every true coefficient satisfies |c| < 2^(b-3): raw digits then
    sit either below 2^(b-3) (coefficient >= 0, borrow-in included) or above
    2^b - 2^(b-3) - 2 (negative), so the top three bits of the top limb decide
    the sign and the inter-slot borrow without any sequential scan.
    """
    w = words.shape[1]
    neg = (words[:, w - 1] >> np.uint64(61)) != 0
    borrow_in = np.zeros(len(words), dtype=np.uint64)
    borrow_in[1:] = neg[:-1].astype(np.uint64)
    out = words.copy()
    out[neg] = ~out[neg]
    # magnitude = digit + borrow_in (>=0 slots) or NOT(digit) + 1 - borrow_in
    add = np.where(neg, np.uint64(1) - borrow_in, borrow_in)
    for j in range(w):
        prev = out[:, j].copy()
        out[:, j] += add
        add = (out[:, j] < prev).astype(np.uint64)
        if not add.any():
            break
    return SeriesWords(out, neg)


def multiply(a: SeriesWords, b: SeriesWords, n_out: int) -> SeriesWords:
    """First n_out coefficients of the series product a*b, exactly."""
    mag_a = magnitudes_f64(a.words)
    mag_b = magnitudes_f64(b.words)
    bound = min(mag_a.sum() * mag_b.max(), mag_b.sum() * mag_a.max())
    bound = max(bound * 1.01, 4.0)
    slot_bits = 64 * ceil((ceil(log2(bound)) + 5) / 64)
    w = slot_bits // 64

    if a is b:
        z = _pack(a, w)
        prod = z * z
    else:
        prod = _pack(a, w) * _pack(b, w)
    guard_slots = len(a) + len(b) + 2
    if prod < 0:
        prod += gmpy2.mpz(1) << (slot_bits * guard_slots)
    raw = prod.to_bytes((guard_slots + 1) * w * 8, "little")
    words = np.frombuffer(raw[: n_out * w * 8], dtype=np.uint64).reshape(n_out, w)
    return _recover(words)


def eta24_words(n_terms: int) -> SeriesWords:
    """eta^24 truncated to n_terms coefficients, via 5 exact products."""
    e1 = from_int64(eta_series(n_terms))
    e2 = multiply(e1, e1, n_terms)
    e3 = multiply(e2, e1, n_terms)
    e6 = multiply(e3, e3, n_terms)
    e12 = multiply(e6, e6, n_terms)
    return multiply(e12, e12, n_terms)


def tau_exact(n_max: int) -> list:
    """[0, tau(1), ..., tau(n_max)] as exact integers."""
    s = eta24_words(n_max)
    return [0] + slot_ints(s, 0, n_max)


def delta_lambda(n_max: int) -> np.ndarray:
    """Normalised eigenvalues tau(n)/n^5.5 for n = 0..n_max as float64."""
    s = eta24_words(n_max)
    vals = to_floats(s)
    lam = np.zeros(n_max + 1, dtype=np.float64)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    lam[1:] = vals / n**5.5
    return lam
