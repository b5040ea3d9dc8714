"""Truncated Taylor-series (jet) arithmetic in one variable.

A :class:`Jet` holds the scaled derivatives c_m = f^(m)(t0)/m! of a scalar
function about a real base point t0, up to a finite order K.  Every
time-dependent quantity in the series construction (manifold offset,
potential data, expansion coefficients, resonance right-hand sides) lives in
this representation.

Order bookkeeping is strict: a binary operation truncates both operands to
the shorter order, and differentiation shortens a jet by one.  Coefficients
are never zero-padded to a higher order, so a stored coefficient is always
one actually determined by the inputs.  An :class:`InsufficientOrderError`
escaping from deep inside a computation means the initial order budget was
too small.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np


class BaseMismatchError(ValueError):
    """Two jets about different base points were combined."""


class InsufficientOrderError(ValueError):
    """An operation needed more coefficients than the jet carries."""


@dataclass(frozen=True, eq=False)
class Jet:
    """Polynomial c_0 + c_1 (t-t0) + ... + c_K (t-t0)^K with complex c_m."""

    coeffs: np.ndarray
    base: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet coefficients must be a nonempty 1-d sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "base", float(self.base))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, base: float = 0.0, order: int = 0) -> "Jet":
        c = np.zeros(order + 1, dtype=np.complex128)
        c[0] = value
        return cls(c, base)

    # -- structure ---------------------------------------------------------

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise InsufficientOrderError(
                f"cannot truncate order-{self.order} jet to order {order}"
            )
        return Jet(self.coeffs[: order + 1], self.base)

    def _common(self, other: "Jet") -> int:
        if self.base != other.base:
            raise BaseMismatchError(
                f"jet base points differ: {self.base} vs {other.base}"
            )
        return min(self.order, other.order)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            k = self._common(other)
            return Jet(self.coeffs[: k + 1] + other.coeffs[: k + 1], self.base)
        if isinstance(other, Number):
            c = self.coeffs.copy()
            c[0] += other
            return Jet(c, self.base)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.base)

    def __sub__(self, other):
        if isinstance(other, (Jet, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            k = self._common(other)
            prod = np.convolve(self.coeffs[: k + 1], other.coeffs[: k + 1])
            return Jet(prod[: k + 1], self.base)
        if isinstance(other, Number):
            return Jet(self.coeffs * other, self.base)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Jet(self.coeffs / other, self.base)
        return NotImplemented

    # -- calculus ----------------------------------------------------------

    def derivative(self) -> "Jet":
        """d/dt as a jet of one order less; c_m -> (m+1) c_{m+1}."""
        if self.order < 1:
            raise InsufficientOrderError(
                "cannot differentiate an order-0 jet; raise the order budget"
            )
        m = np.arange(1, self.order + 1)
        return Jet(self.coeffs[1:] * m, self.base)

    def conjugate(self) -> "Jet":
        """Entrywise coefficient conjugation.

        Because the base point is real this is the jet of the holomorphic
        extension of t -> conj(f(t)); for a real-valued jet it is a no-op.
        """
        return Jet(np.conj(self.coeffs), self.base)

    def __call__(self, t):
        """Horner evaluation at t (scalar or ndarray, may be complex)."""
        dt = t - self.base
        acc = np.full_like(np.asarray(dt, dtype=np.complex128), self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            acc = acc * dt + c
        return acc if np.ndim(t) else complex(acc)

    # -- inspection --------------------------------------------------------

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def max_imag(self) -> float:
        return float(np.max(np.abs(self.coeffs.imag)))

    def max_real(self) -> float:
        return float(np.max(np.abs(self.coeffs.real)))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= tol))

    def __repr__(self):
        head = np.array2string(self.coeffs[:4], precision=6, separator=", ")
        tail = ", ..." if self.order > 3 else ""
        return f"Jet(order={self.order}, base={self.base}, coeffs={head}{tail})"
