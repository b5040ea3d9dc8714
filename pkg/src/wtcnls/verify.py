"""Independent verification of a computed coefficient series.

Nothing here reuses the recursion's internal quantities: the coefficient
residual re-derives every order-by-order equation from the raw triple
convolution, the pointwise check discretizes the PDE itself on a real (x, t)
grid, and the growth fit measures the geometric coefficient decay that
controls the convergence region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .jets import Jet
from .potential import PotentialExpansion, PotentialSpec
from .recursion import WTCSeries, relative_conjugacy_defect


class GridError(ValueError):
    """The sampling grid violates a precondition of the pointwise check."""


# --------------------------------------------------------------------------
# coefficient-level residuals


def cubic_triples(j: int) -> list:
    """All ordered triples (a, b, c) with a+b+c = j and a, b, c < j."""
    return [
        (a, b, j - a - b)
        for a in range(j)
        for b in range(j)
        if 0 <= j - a - b < j
    ]


def cubic_convolution_bruteforce(j: int, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    """Plain triple-loop evaluation of the sub-leading cubic interaction,
    kept deliberately naive as an oracle for the production convolution."""
    total = None
    for a, b, c in cubic_triples(j):
        term = 2 * (u[a] * u[b] * v[c])
        total = term if total is None else total + term
    return total


def _cubic_total(j: int, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    # Full convolution 2*sum u_a u_b v_c over ALL triples a+b+c=j, including
    # those touching index j; makes no use of u_0 v_0 = 1.
    total = None
    for a in range(j + 1):
        for b in range(j + 1 - a):
            term = 2 * (u[a] * u[b] * v[j - a - b])
            total = term if total is None else total + term
    return total


def coefficient_residual(series: WTCSeries, exp: PotentialExpansion) -> np.ndarray:
    """Max absolute defect of each order's coefficient equation, both lanes.

    For every j <= n the equation matched at that order is rebuilt from
    scratch and the largest coefficient of (left side - right side) is
    recorded.  A series produced by the recursion should sit at roundoff
    level; a tampered coefficient shows up at its own order.
    """
    u, v = series.u, series.v
    psip = exp.psi_prime
    a_u = (exp.a0, exp.a1, exp.a2)
    a_v = (exp.a0_conj, exp.a1_conj, exp.a2_conj)
    defects = np.zeros(series.n + 1)
    for j in range(series.n + 1):
        lhs1 = (j - 1) * (j - 2) * u[j]
        lhs2 = (j - 1) * (j - 2) * v[j]
        if j >= 1:
            lhs1 = lhs1 + 1j * (j - 2) * (u[j - 1] * psip)
            lhs2 = lhs2 - 1j * (j - 2) * (v[j - 1] * psip)
        if j >= 2:
            lhs1 = lhs1 + 1j * u[j - 2].derivative()
            lhs2 = lhs2 - 1j * v[j - 2].derivative()
        rhs1 = _cubic_total(j, u, v)
        rhs2 = _cubic_total(j, v, u)
        for k in range(0, min(j - 2, 2) + 1):
            rhs1 = rhs1 + a_u[k] * u[j - k - 2]
            rhs2 = rhs2 + a_v[k] * v[j - k - 2]
        defects[j] = max((lhs1 - rhs1).max_abs(), (lhs2 - rhs2).max_abs())
    return defects


def conjugacy_defect(series: WTCSeries) -> float:
    """Largest relative defect of conj(u_j) = v_j over the whole series."""
    return max(
        relative_conjugacy_defect(uj, vj) for uj, vj in zip(series.u, series.v)
    )


# --------------------------------------------------------------------------
# growth / convergence radius


@dataclass(frozen=True)
class GrowthEstimate:
    """Least-squares fit of log|u_j(t0)| against j over the tail window.

    growth_c is the fitted geometric ratio, radius its reciprocal (the
    estimated convergence radius in Psi at the base point), r_squared the
    linearity score.  A terminating tail reports radius = inf; fewer than 4
    nonzero tail coefficients mark the fit unreliable.
    """

    growth_c: float
    radius: float
    r_squared: float
    n_points: int
    reliable: bool


def estimate_growth(series: WTCSeries) -> GrowthEstimate:
    lo = math.ceil(series.n / 2)
    js, logs = [], []
    for j in range(lo, series.n + 1):
        mag = abs(complex(series.u[j].coeffs[0]))
        if mag > 0.0:
            js.append(float(j))
            logs.append(math.log(mag))
    if not js:
        return GrowthEstimate(0.0, math.inf, 1.0, 0, True)
    if len(js) < 2:
        return GrowthEstimate(math.nan, math.nan, math.nan, len(js), False)
    jarr = np.array(js)
    yarr = np.array(logs)
    slope, intercept = np.polyfit(jarr, yarr, 1)
    pred = slope * jarr + intercept
    ss_res = float(np.sum((yarr - pred) ** 2))
    ss_tot = float(np.sum((yarr - yarr.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return GrowthEstimate(
        growth_c=math.exp(slope),
        radius=math.exp(-slope),
        r_squared=r2,
        n_points=len(js),
        reliable=len(js) >= 4,
    )


# --------------------------------------------------------------------------
# pointwise PDE residual on a real grid


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, t) sampling window.

    rmin/rmax bound the allowed distance |Psi| from the singular curve;
    trust_tau bounds |t - t0| for jet evaluation (when None it defaults to
    0.25 divided by the input coefficient scale).
    """

    x_min: float
    x_max: float
    t_min: float
    t_max: float
    dx: float
    dt: float
    rmin: float
    rmax: float
    trust_tau: Optional[float] = None

    def axes(self):
        nx = int(round((self.x_max - self.x_min) / self.dx)) + 1
        nt = int(round((self.t_max - self.t_min) / self.dt)) + 1
        if nx < 5 or nt < 3:
            raise GridError(
                f"grid too small for the stencils: {nx} x-points, {nt} t-points"
            )
        return (
            self.x_min + self.dx * np.arange(nx),
            self.t_min + self.dt * np.arange(nt),
        )


def evaluate_series_grid(series: WTCSeries, spec: PotentialSpec, grid: GridSpec,
                         n_used: int):
    """Evaluate the truncated solution and the potential on the grid.

    Returns (xs, ts, Psi, u, a) with Psi, u, a of shape (nt, nx); u is the
    Horner sum of the first n_used+1 coefficients divided by Psi.
    """
    if n_used > series.n:
        raise ValueError(f"n_used={n_used} exceeds computed index {series.n}")
    xs, ts = grid.axes()
    psi_t = spec.psi(ts)
    big_psi = xs[None, :] + psi_t[:, None]
    cj = [series.u[j](ts)[:, None] for j in range(n_used + 1)]
    acc = np.broadcast_to(cj[-1], big_psi.shape).copy()
    for c in cj[-2::-1]:
        acc = acc * big_psi + c
    u = acc / big_psi
    quad = spec.q.derivative()(ts) / 2 - spec.q(ts) ** 2
    a = (
        xs[None, :] ** 2 * quad[:, None]
        + xs[None, :] * spec.p1(ts)[:, None]
        + spec.p0(ts)[:, None]
        + 1j * spec.q(ts)[:, None]
    )
    return xs, ts, big_psi, u, a


def residual_grid(series: WTCSeries, spec: PotentialSpec, grid: GridSpec,
                  n_used: int):
    """Discrete PDE residual |i u_t + u_xx - 2|u|^2 u - a u| on the grid.

    Central differences: 4th order in x, 2nd order in t.  Entries without a
    full stencil, or whose stencil touches a point with |Psi| < rmin, are
    NaN.  Returns (xs, ts, Psi, u, residual_magnitude).
    """
    xs, ts, big_psi, u, a = evaluate_series_grid(series, spec, grid, n_used)
    nt, nx = u.shape
    res = np.full((nt, nx), np.nan)
    if nx >= 5 and nt >= 3:
        u_t = (u[2:, 2:-2] - u[:-2, 2:-2]) / (2 * grid.dt)
        u_xx = (
            -u[1:-1, :-4] + 16 * u[1:-1, 1:-3] - 30 * u[1:-1, 2:-2]
            + 16 * u[1:-1, 3:-1] - u[1:-1, 4:]
        ) / (12 * grid.dx**2)
        core = u[1:-1, 2:-2]
        pde = (
            1j * u_t + u_xx
            - 2.0 * (core * np.conj(core)) * core
            - a[1:-1, 2:-2] * core
        )
        ok = np.abs(big_psi) >= grid.rmin
        support = (
            ok[1:-1, :-4] & ok[1:-1, 1:-3] & ok[1:-1, 2:-2]
            & ok[1:-1, 3:-1] & ok[1:-1, 4:] & ok[2:, 2:-2] & ok[:-2, 2:-2]
        )
        block = np.abs(pde)
        block[~support] = np.nan
        res[1:-1, 2:-2] = block
    return xs, ts, big_psi, u, res


def pointwise_residual(series: WTCSeries, spec: PotentialSpec, grid: GridSpec,
                       n_used: int) -> float:
    """Max discrete-PDE residual over the grid interior.

    Preconditions: every grid point keeps rmin <= |Psi| <= rmax (away from
    the singular curve, inside the sampled window) and the t-range stays in
    the jet trust region.
    """
    tau = grid.trust_tau
    if tau is None:
        tau = 0.25 / spec.input_scale()
    t_reach = max(abs(grid.t_min - spec.base), abs(grid.t_max - spec.base))
    if t_reach > tau + 1e-12:
        raise GridError(
            f"t-range reaches {t_reach:.4g} from the base point; "
            f"trust region is {tau:.4g}"
        )
    xs, ts, big_psi, _, res = residual_grid(series, spec, grid, n_used)
    mags = np.abs(big_psi)
    if mags.min() < grid.rmin or mags.max() > grid.rmax:
        raise GridError(
            f"|Psi| spans [{mags.min():.4g}, {mags.max():.4g}], outside "
            f"[{grid.rmin:.4g}, {grid.rmax:.4g}]"
        )
    return float(np.nanmax(res))


# --------------------------------------------------------------------------
# combined report


@dataclass(frozen=True)
class VerificationReport:
    coeff_residual_max: tuple
    conjugacy_defect: float
    res3_mismatch: float
    res3_imag: float
    res4_sum: float
    res4_real: float
    growth: GrowthEstimate
    pointwise: tuple  # rows (n_used, dx, max_residual)

    def worst_coeff_residual(self) -> float:
        return max(self.coeff_residual_max)

    def to_dict(self) -> dict:
        return {
            "coeff_residual_max": [float(x) for x in self.coeff_residual_max],
            "conjugacy_defect": float(self.conjugacy_defect),
            "compat": {
                "res3_mismatch": self.res3_mismatch,
                "res3_imag": self.res3_imag,
                "res4_sum": self.res4_sum,
                "res4_real": self.res4_real,
            },
            "growth": {
                "growth_c": self.growth.growth_c,
                "radius": self.growth.radius,
                "r_squared": self.growth.r_squared,
                "n_points": self.growth.n_points,
                "reliable": self.growth.reliable,
            },
            "pointwise": [
                {"n_used": n, "dx": dx, "max_residual": r}
                for n, dx, r in self.pointwise
            ],
        }


def compat_defects(series: WTCSeries):
    """The four resonance-compatibility defects (0.0 where not computed)."""
    d = series.diagnostics
    res3_mismatch = res3_imag = res4_sum = res4_real = 0.0
    if d.res3_value is not None:
        res3_mismatch = (d.res3_value - d.res3_check).max_abs()
        res3_imag = d.res3_value.max_imag()
    if d.res4_value is not None:
        res4_sum = (d.res4_value + d.res4_check).max_abs()
        res4_real = d.res4_value.max_real()
    return res3_mismatch, res3_imag, res4_sum, res4_real


def build_report(series: WTCSeries, spec: PotentialSpec, exp: PotentialExpansion,
                 grid: Optional[GridSpec] = None,
                 n_used_list: Optional[Sequence[int]] = None) -> VerificationReport:
    res3_mismatch, res3_imag, res4_sum, res4_real = compat_defects(series)
    rows = []
    if grid is not None:
        if n_used_list is None:
            n_used_list = sorted({min(5, series.n), min(10, series.n),
                                  min(20, series.n), series.n})
        for n_used in n_used_list:
            rows.append(
                (n_used, grid.dx, pointwise_residual(series, spec, grid, n_used))
            )
    return VerificationReport(
        coeff_residual_max=tuple(coefficient_residual(series, exp)),
        conjugacy_defect=conjugacy_defect(series),
        res3_mismatch=res3_mismatch,
        res3_imag=res3_imag,
        res4_sum=res4_sum,
        res4_real=res4_real,
        growth=estimate_growth(series),
        pointwise=tuple(rows),
    )
