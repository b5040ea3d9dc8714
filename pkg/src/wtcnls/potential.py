"""Potential data and its expansion about the singular manifold.

The equation's potential has the structured form

    a(x, t) = x^2 (q'(t)/2 - q(t)^2) + x p1(t) + p0(t) + i q(t)

with real-valued p0, p1, q.  The series construction needs its Taylor
coefficients in powers of Psi = x + psi(t), i.e. about the moving point
x = -psi(t), together with their coefficient-conjugates.  Since a is a
quadratic in x the three coefficients have closed forms and are computed
exactly by jet arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .jets import Jet


def _require_real(name: str, f: Jet) -> None:
    if not f.is_real(0.0):
        raise ValueError(f"{name} must be a real-valued jet (zero imaginary parts)")


@dataclass(frozen=True)
class PotentialSpec:
    """The four real input functions: potential data p0, p1, q and the
    manifold offset psi, all as jets about the same real base point."""

    p0: Jet
    p1: Jet
    q: Jet
    psi: Jet

    def __post_init__(self):
        jets = {"p0": self.p0, "p1": self.p1, "q": self.q, "psi": self.psi}
        for name, f in jets.items():
            _require_real(name, f)
        bases = {f.base for f in jets.values()}
        if len(bases) != 1:
            raise ValueError(f"input jets must share one base point, got {bases}")
        orders = {f.order for f in jets.values()}
        if len(orders) != 1:
            raise ValueError(f"input jets must share one order, got {orders}")

    @property
    def base(self) -> float:
        return self.p0.base

    @property
    def order(self) -> int:
        return self.p0.order

    def input_scale(self) -> float:
        """Largest input coefficient magnitude, floored at 1 (tolerance scaling)."""
        return max(1.0, self.p0.max_abs(), self.p1.max_abs(),
                   self.q.max_abs(), self.psi.max_abs())


@dataclass(frozen=True)
class PotentialExpansion:
    """Coefficients a_k of a = a0 + a1*Psi + a2*Psi^2 along x = -psi(t),
    their coefficient-conjugates, and the helper jets the recursion uses."""

    a0: Jet
    a1: Jet
    a2: Jet
    a0_conj: Jet
    a1_conj: Jet
    a2_conj: Jet
    phi: Jet        # i/2 times the manifold speed psi'; purely imaginary
    psi_prime: Jet

    def scale(self) -> float:
        """Largest coefficient magnitude across the expansion, floored at 1."""
        return max(1.0, self.a0.max_abs(), self.a1.max_abs(), self.a2.max_abs(),
                   self.phi.max_abs(), self.psi_prime.max_abs())


def expand_potential(spec: PotentialSpec) -> PotentialExpansion:
    """Expand the potential about x = -psi(t).

    With A = q'/2 - q^2 (the quadratic coefficient in x):

        a2 = A
        a1 = p1 - 2 psi A
        a0 = psi^2 A - psi p1 + p0 + i q

    Each jet comes out one order below the inputs (one differentiation of q
    and of psi).
    """
    p0, p1, q, psi = spec.p0, spec.p1, spec.q, spec.psi
    a2 = q.derivative() / 2 - q * q
    a1 = p1 - 2 * (psi * a2)
    a0 = psi * psi * a2 - psi * p1 + p0 + 1j * q
    phi = 0.5j * psi.derivative()
    return PotentialExpansion(
        a0=a0, a1=a1, a2=a2,
        a0_conj=a0.conjugate(), a1_conj=a1.conjugate(), a2_conj=a2.conjugate(),
        phi=phi, psi_prime=psi.derivative(),
    )


def identity_defect(exp: PotentialExpansion) -> Jet:
    """Structural identity that makes the order-4 resonance compatible.

    Returns (i/2) d/dt(a0 - conj a0) - (1/2)(a0 - conj a0)^2 + a2 + conj a2,
    which vanishes identically for any potential of the admitted form (the
    imaginary part of a0 is exactly q, and a2 = q'/2 - q^2 cancels it).
    A nonzero result flags corrupted input data or an expansion bug.
    """
    d = exp.a0 - exp.a0_conj
    return 0.5j * d.derivative() - 0.5 * (d * d) + exp.a2 + exp.a2_conj
