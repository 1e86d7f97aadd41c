"""The band step kernel and the delayed equation for its density sigma(u).

sigma solves  u s'(u) + (1 - chi_0) s(u) + sum_k (chi_{k-1} - chi_k) s(u - x_k) = 0
for u > x_1, with history s(u) = u^(chi_0 - 1) on (0, x_1] and 0 for u <= 0.
Equivalently, u s(u) = integral_0^u s(t) beta(u - t) dt for the step kernel
beta; ``sigma_residual`` measures how well the integrated solution satisfies
that equation.  Integration is a fixed-step classical RK4 marching forward by
the method of steps, with grid nodes aligned to the images of the kernel
breakpoints so no step straddles a derivative kink.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import ceil, pi, sin

import numpy as np

from ._core_py import interp_cubic
from ._kernels import kernels
from .errors import DomainError, ResolutionError


@dataclass
class StepBeta:
    """Step kernel with breakpoints 1/m, truncated to m_bands bands.

    x[k-1] = 1/(M-k+1) for k = 1..M ascending (x_1 = 1/M, x_M = 1);
    chi[k] = 3 - 4 sin^2(pi/(M-k+2)) for k = 0..M, so chi[M] = -1.  The kernel
    value is chi[k] on [x_k, x_{k+1}), chi[0] below x_1 (including t = 0), and
    -1 from 1 on.
    """

    m_bands: int = 25
    x: np.ndarray = field(init=False, repr=False)
    chi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = self.m_bands
        if m < 2:
            raise DomainError("need at least 2 bands")
        k = np.arange(1, m + 1, dtype=np.float64)
        self.x = 1.0 / (m - k + 1.0)
        kk = np.arange(0, m + 1, dtype=np.float64)
        self.chi = 3.0 - 4.0 * np.sin(pi / (m - kk + 2.0)) ** 2

    @property
    def chi0(self) -> float:
        return float(self.chi[0])

    @property
    def x1(self) -> float:
        return float(self.x[0])


def beta_eval(t: float, sb: StepBeta) -> float:
    """Band lookup; t = 0 and the sub-x_1 truncation band both give chi_0."""
    if t < 0:
        raise DomainError(f"kernel argument must be nonnegative, got {t}")
    return float(sb.chi[np.searchsorted(sb.x, t, side="right")])


@dataclass
class SigmaSolution:
    """sigma on a stored grid starting at x_1; analytic below x_1."""

    chi0: float
    step: float
    grid: np.ndarray
    sigma: np.ndarray
    M: int

    @property
    def x1(self) -> float:
        return float(self.grid[0])

    @property
    def u_max(self) -> float:
        return float(self.grid[-1])

    def at(self, u: float) -> float:
        """Evaluate sigma anywhere in (-inf, u_max]."""
        if u <= 0.0:
            return 0.0
        if u <= self.x1:
            return float(u ** (self.chi0 - 1.0))
        if u > self.u_max + 1e-12:
            raise DomainError(f"u={u} beyond computed range {self.u_max}")
        return float(interp_cubic(self.grid, self.sigma, min(u, self.u_max)))


def _breakpoint_images(sb: StepBeta, u_max: float) -> np.ndarray:
    """Sums of up to three breakpoints in (x_1, u_max): the loci where the
    delayed terms switch on and where earlier kinks re-enter the equation."""
    xs = [float(v) for v in sb.x]
    vals = set()
    for r in (1, 2, 3):
        for combo in combinations_with_replacement(xs, r):
            v = sum(combo)
            if sb.x1 < v < u_max:
                vals.add(v)
    if not vals:
        return np.empty(0)
    arr = np.array(sorted(vals))
    keep = np.concatenate([[True], np.diff(arr) > 1e-12])
    return arr[keep]


def solve_sigma(sb: StepBeta, u_max: float, step: float) -> SigmaSolution:
    """Integrate the delayed equation on [x_1, u_max] with steps <= step."""
    if not 0.0 < step <= 1e-3:
        raise DomainError(f"step must lie in (0, 1e-3], got {step}")
    if not sb.x1 < u_max <= 3.0:
        raise DomainError(f"u_max must lie in (x_1, 3], got {u_max}")
    if step > sb.x1 / 8.0:
        raise ResolutionError(
            f"step {step} cannot resolve the shortest delay x_1 = {sb.x1}"
        )
    events = np.concatenate([[sb.x1], _breakpoint_images(sb, u_max), [u_max]])
    nodes = []
    for a, b in zip(events[:-1], events[1:]):
        nseg = max(1, ceil((b - a) / step))
        nodes.append(np.linspace(a, b, nseg + 1)[:-1])
    nodes.append([u_max])
    grid = np.concatenate(nodes)
    jumps = sb.chi[:-1] - sb.chi[1:]  # chi_{k-1} - chi_k aligned with x_k
    sigma = kernels.dde_rk4(grid, np.ascontiguousarray(sb.x), np.ascontiguousarray(jumps), sb.chi0)
    return SigmaSolution(sb.chi0, step, grid, sigma, sb.m_bands)


def _cumulative_integral(sol: SigmaSolution) -> np.ndarray:
    """Trapezoid cumulative of sigma over the stored grid (0 at x_1)."""
    dg = np.diff(sol.grid)
    seg = 0.5 * (sol.sigma[:-1] + sol.sigma[1:]) * dg
    return np.concatenate([[0.0], np.cumsum(seg)])


def sigma_residual(sol: SigmaSolution, sb: StepBeta, samples: int) -> float:
    """Max |u sigma(u) - integral_0^u sigma(t) beta(u-t) dt| on sample points.

    The integral is split at the kernel breakpoints so beta is constant on
    each piece; sigma integrates exactly on the analytic head and by the
    trapezoid rule (with interpolated partial segments) on the grid.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    x1 = sol.x1
    chi0 = sol.chi0
    phi_grid = _cumulative_integral(sol)
    phi_head = x1**chi0 / chi0
    grid = sol.grid

    def phi(t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t <= x1:
            return t**chi0 / chi0
        j = min(int(np.searchsorted(grid, t, side="right")) - 1, len(grid) - 1)
        base = phi_head + phi_grid[j]
        if t > grid[j]:
            base += 0.5 * (sol.sigma[j] + sol.at(t)) * (t - grid[j])
        return base

    bounds = np.concatenate([[0.0], sb.x])  # x_0 = 0, then x_1..x_M
    worst = 0.0
    us = x1 + (sol.u_max - x1) * np.arange(1, samples + 1) / samples
    for u in us:
        total = 0.0
        for k in range(len(sb.chi)):
            hi = u - bounds[k]
            if hi <= 0.0:
                break
            lo = u - bounds[k + 1] if k + 1 < len(bounds) else 0.0
            lo = max(lo, 0.0)
            total += float(sb.chi[k]) * (phi(hi) - phi(lo))
        worst = max(worst, abs(u * sol.at(float(u)) - total))
    return worst


def sigma_min_on(sol: SigmaSolution, lo: float, hi: float) -> tuple[float, float]:
    """(min value, argmin) of the stored solution on [lo, hi] by grid scan."""
    if not (sol.x1 <= lo <= hi <= sol.u_max + 1e-12):
        raise DomainError(f"[{lo}, {hi}] outside computed range [{sol.x1}, {sol.u_max}]")
    us = [lo, hi]
    inside = (sol.grid >= lo) & (sol.grid <= hi)
    cand_u = np.concatenate([[lo, hi], sol.grid[inside]])
    cand_v = np.array([sol.at(float(u)) for u in (lo, hi)])
    cand_v = np.concatenate([cand_v, sol.sigma[inside]])
    i = int(np.argmin(cand_v))
    return float(cand_v[i]), float(cand_u[i])
