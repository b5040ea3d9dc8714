"""Coefficient recursion for the singular series solution.

The ansatz is u = sum_{j>=0} u_j(t) Psi^{j-1} with Psi = x + psi(t), coupled
with a partner series v (equal to the coefficient-conjugate of u on the real
domain).  Matching powers of Psi in the system

    i u_t + u_xx = 2 u^2 v + a u
   -i v_t + v_xx = 2 u v^2 + conj(a) v

fixes (u_j, v_j) order by order: closed forms through j = 2, a solvability
constraint plus one free real function at each of j = 3 and j = 4, and an
invertible 2x2 solve for every j >= 5.

The two resonance constraints are each evaluated twice, once per equation of
the system, along independent algebraic routes; disagreement beyond roundoff
is raised as :class:`InternalInconsistencyError` because the admitted
potential form guarantees exact compatibility.  Likewise the v-lane is
computed from its own formulas for j >= 5 and only *checked* against the
conjugate of the u-lane, so the conjugacy test is a genuine cross-validation
rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .jets import InsufficientOrderError, Jet
from .potential import PotentialExpansion, PotentialSpec, expand_potential

# Exceeding these means the implementation (not the input) is wrong: the
# constraints below hold exactly for every admissible potential.
COMPAT_ABS_TOL = 1e-10
CONJUGACY_REL_TOL = 1e-9


class InternalInconsistencyError(RuntimeError):
    """A structurally guaranteed identity failed beyond roundoff tolerance."""


@dataclass(frozen=True)
class FreeData:
    """Free parameters of the solution family.

    theta fixes the unit-modulus leading coefficient u_0 = exp(i*theta).
    s3 and s4 are the arbitrary real functions entering at the two
    resonances: s3 = Im(u_3 conj(u_0)) and s4 = Re(u_4 conj(u_0)).
    """

    theta: float
    s3: Jet
    s4: Jet

    def __post_init__(self):
        for name in ("s3", "s4"):
            f = getattr(self, name)
            if not f.is_real(0.0):
                raise ValueError(f"{name} must be a real-valued jet")
        if self.s3.base != self.s4.base:
            raise ValueError("s3 and s4 must share a base point")

    def u0(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class ResonanceDiagnostics:
    """Both independently computed right-hand sides of each resonance
    constraint, retained for reporting.

    res3_value must equal res3_check and be real-valued; res4_value must
    equal -res4_check and be purely imaginary-valued.  Fields are None when
    the series was truncated before the corresponding resonance.
    """

    res3_value: Optional[Jet] = None
    res3_check: Optional[Jet] = None
    res4_value: Optional[Jet] = None
    res4_check: Optional[Jet] = None


@dataclass(frozen=True)
class WTCSeries:
    """Computed coefficient pairs through index n, plus diagnostics."""

    n: int
    u: tuple
    v: tuple
    valid_order: tuple
    diagnostics: ResonanceDiagnostics

    @property
    def base(self) -> float:
        return self.u[0].base


def plan_order_budget(n: int, k_target: int) -> int:
    """Initial jet order so every coefficient through index n keeps at least
    k_target valid orders.

    Each step j >= 5 differentiates lane j-2 once, so one order is lost per
    two indices; two more cover the setup derivatives (psi', q', phi', u_2')
    and the conservative rounding.
    """
    if n < 0 or k_target < 0:
        raise ValueError("n and k_target must be nonnegative")
    return k_target + (n + 1) // 2 + 2


def cubic_convolution(j: int, u: Sequence[Jet], v: Sequence[Jet]) -> Jet:
    """Sum of 2 u_a u_b v_c over ordered triples a+b+c=j with a, b, c < j.

    Exploits the a<->b symmetry (weight 4 off the diagonal, 2 on it); the
    summation set has (j-1)(j+4)/2 ordered triples.
    """
    if j < 2:
        raise ValueError(f"cubic convolution is defined for j >= 2, got {j}")
    total = None
    for a in range(j):
        for b in range(a, min(j - a, j - 1) + 1):
            c = j - a - b
            if c >= j:
                continue
            term = (u[a] * u[b]) * v[c] * (2 if a == b else 4)
            total = term if total is None else total + term
    return total


def seed_low_orders(exp: PotentialExpansion, free: FreeData):
    """Coefficients below the first resonance: u_0 = exp(i*theta) constant,
    u_1 = -u_0 phi, and the closed form for u_2 (v-lane analogous)."""
    u0 = free.u0()
    v0 = u0.conjugate()
    ambient = exp.a0.order
    base = exp.a0.base
    phi = exp.phi
    u2 = (u0 / 6) * (2 * (phi * phi) - 2 * exp.a0 + exp.a0_conj)
    v2 = (v0 / 6) * (2 * (phi * phi) + exp.a0 - 2 * exp.a0_conj)
    return (
        Jet.constant(u0, base, ambient),
        Jet.constant(v0, base, ambient),
        -u0 * phi,
        v0 * phi,
        u2,
        v2,
    )


def solve_resonance3(exp, free, u, v, *, tol_scale: float = 1.0):
    """Order-3 resonance: the constraint fixes Re(u_3 conj u_0); s3 supplies
    the free imaginary part.

    The constraint value is computed from its closed form
    i phi' - a0 phi + conj(a0) phi + a1 and, independently, from the full
    second-equation formula; both are returned along with (u_3, v_3).
    """
    u0 = free.u0()
    phi, psip = exp.phi, exp.psi_prime
    r_value = 1j * phi.derivative() - exp.a0 * phi + exp.a0_conj * phi + exp.a1
    r_check = (
        1j * u0 * v[1].derivative()
        + 1j * u0 * (v[2] * psip)
        + u0 * cubic_convolution(3, v, u)
        + u0 * (exp.a0_conj * v[1])
        + exp.a1_conj
    )
    tol = COMPAT_ABS_TOL * tol_scale
    mismatch = (r_value - r_check).max_abs()
    if mismatch > tol:
        raise InternalInconsistencyError(
            f"order-3 resonance cross-check differs by {mismatch:.3e}"
        )
    if r_value.max_imag() > tol:
        raise InternalInconsistencyError(
            f"order-3 constraint has imaginary part {r_value.max_imag():.3e}"
        )
    u3 = u0 * (-0.25 * r_value + 1j * free.s3)
    return u3, u3.conjugate(), r_value, r_check


def solve_resonance4(exp, free, u, v, *, tol_scale: float = 1.0):
    """Order-4 resonance: the constraint fixes Im(u_4 conj u_0); s4 supplies
    the free real part.

    Both right-hand sides are computed from their full defining formulas;
    their sum must vanish and the first must be purely imaginary.
    """
    u0 = free.u0()
    v0 = u0.conjugate()
    psip = exp.psi_prime
    r_value = (
        -1j * v0 * u[2].derivative()
        - 2j * v0 * (u[3] * psip)
        + v0 * cubic_convolution(4, u, v)
        + v0 * (exp.a0 * u[2] + exp.a1 * u[1] + exp.a2 * u[0])
    )
    r_check = (
        1j * u0 * v[2].derivative()
        + 2j * u0 * (v[3] * psip)
        + u0 * cubic_convolution(4, v, u)
        + u0 * (exp.a0_conj * v[2] + exp.a1_conj * v[1] + exp.a2_conj * v[0])
    )
    tol = COMPAT_ABS_TOL * tol_scale
    defect = (r_value + r_check).max_abs()
    if defect > tol:
        raise InternalInconsistencyError(
            f"order-4 resonance sum is {defect:.3e}, expected 0"
        )
    if r_value.max_real() > tol:
        raise InternalInconsistencyError(
            f"order-4 constraint has real part {r_value.max_real():.3e}"
        )
    m4 = -0.25j * r_value  # real-valued since r_value is purely imaginary
    u4 = u0 * (free.s4 + 1j * m4)
    return u4, u4.conjugate(), r_value, r_check


def step(j: int, exp: PotentialExpansion, u, v):
    """Non-resonant step j >= 5: assemble both driving terms and apply the
    inverse of the 2x2 coefficient matrix, whose determinant
    (j+1) j (j-3) (j-4) is nonzero exactly when j is past both resonances."""
    if j < 5:
        raise ValueError(f"direct step needs j >= 5 (determinant vanishes), got {j}")
    psip = exp.psi_prime
    f = (
        cubic_convolution(j, u, v)
        - 1j * u[j - 2].derivative()
        - 1j * (j - 2) * (u[j - 1] * psip)
        + exp.a0 * u[j - 2] + exp.a1 * u[j - 3] + exp.a2 * u[j - 4]
    )
    g = (
        cubic_convolution(j, v, u)
        + 1j * v[j - 2].derivative()
        + 1j * (j - 2) * (v[j - 1] * psip)
        + exp.a0_conj * v[j - 2] + exp.a1_conj * v[j - 3] + exp.a2_conj * v[j - 4]
    )
    det = (j + 1) * j * (j - 3) * (j - 4)
    diag = (j * j - 3 * j - 2) / det
    u0 = complex(u[0].coeffs[0])
    v0 = complex(v[0].coeffs[0])
    return diag * f + (2 * u0 * u0 / det) * g, (2 * v0 * v0 / det) * f + diag * g


def relative_conjugacy_defect(uj: Jet, vj: Jet) -> float:
    d = (uj.conjugate() - vj).max_abs()
    return d / max(1.0, uj.max_abs())


def generate(spec: PotentialSpec, free: FreeData, n: int, k_target: int) -> WTCSeries:
    """Run the full recursion through index n.

    Input jets must carry at least plan_order_budget(n, k_target) orders.
    Every structural identity (resonance compatibility, conjugacy of the two
    lanes) is checked as it becomes available; a violation raises
    :class:`InternalInconsistencyError`.
    """
    needed = plan_order_budget(n, k_target)
    if spec.order < needed:
        raise InsufficientOrderError(
            f"input jets have order {spec.order} but N={n}, K_target={k_target} "
            f"requires at least K0={needed}"
        )
    if free.s3.base != spec.base:
        raise ValueError("free data and potential must share a base point")
    if min(free.s3.order, free.s4.order) < needed:
        raise InsufficientOrderError(
            f"free-function jets must carry order >= K0={needed}"
        )

    exp = expand_potential(spec)
    scale = exp.scale()
    u0, v0, u1, v1, u2, v2 = seed_low_orders(exp, free)
    u = [u0, u1, u2]
    v = [v0, v1, v2]
    diag = ResonanceDiagnostics()
    if n >= 3:
        u3, v3, r_val, r_chk = solve_resonance3(exp, free, u, v, tol_scale=scale)
        u.append(u3)
        v.append(v3)
        diag = ResonanceDiagnostics(res3_value=r_val, res3_check=r_chk)
    if n >= 4:
        u4, v4, big_val, big_chk = solve_resonance4(exp, free, u, v, tol_scale=scale)
        u.append(u4)
        v.append(v4)
        diag = ResonanceDiagnostics(diag.res3_value, diag.res3_check, big_val, big_chk)
    for j in range(5, n + 1):
        uj, vj = step(j, exp, u, v)
        u.append(uj)
        v.append(vj)

    u = u[: n + 1]
    v = v[: n + 1]
    for j, (uj, vj) in enumerate(zip(u, v)):
        defect = relative_conjugacy_defect(uj, vj)
        if defect > CONJUGACY_REL_TOL:
            raise InternalInconsistencyError(
                f"conjugacy defect {defect:.3e} at index {j}"
            )
    return WTCSeries(
        n=n,
        u=tuple(u),
        v=tuple(v),
        valid_order=tuple(f.order for f in u),
        diagnostics=diag,
    )
