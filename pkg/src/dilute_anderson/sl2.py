"""Exact 2x2 SL(2,R) building blocks of the transfer-matrix cocycle.

The central identity is the conjugation of the site transfer matrix into a
rotation times a unipotent impurity kick,

    M T(E, v) M^{-1} = R_k (1 + P(E, v)),

which every other module evaluates through the right-hand side (better
conditioned near the band edges than explicit conjugation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import EnergyPoint

CONJUGATION_TOL = 1e-11


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix, row-major; constructors here keep |det - 1| <= 1e-12."""

    a11: float
    a12: float
    a21: float
    a22: float

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def max_abs_diff(self, other: "Mat2") -> float:
        return max(
            abs(self.a11 - other.a11),
            abs(self.a12 - other.a12),
            abs(self.a21 - other.a21),
            abs(self.a22 - other.a22),
        )


IDENTITY = Mat2(1.0, 0.0, 0.0, 1.0)


def transfer(E: EnergyPoint, v: float) -> Mat2:
    """Site transfer matrix [[v - E, -1], [1, 0]] at energy E."""
    return Mat2(v - E.E, -1.0, 1.0, 0.0)


def basis_change(E: EnergyPoint) -> Mat2:
    """Basis change M = (1/sqrt(sin k)) [[sin k, 0], [-cos k, 1]]."""
    s = E.sin_k
    r = math.sqrt(s)
    return Mat2(s / r, 0.0, -E.cos_k / r, 1.0 / r)


def basis_change_inv(E: EnergyPoint) -> Mat2:
    """Closed-form inverse of basis_change via the 2x2 adjugate (det = 1)."""
    m = basis_change(E)
    return Mat2(m.a22, -m.a12, -m.a21, m.a11)


def rotation(angle: float) -> Mat2:
    """Rotation matrix [[cos, -sin], [sin, cos]]."""
    c, s = math.cos(angle), math.sin(angle)
    return Mat2(c, -s, s, c)


def perturbation(E: EnergyPoint, v: float) -> Mat2:
    """Nilpotent impurity kick P = -(v/sin k) [[0, 0], [1, 0]]."""
    return Mat2(0.0, 0.0, -v / E.sin_k, 0.0)


def conjugated_transfer(E: EnergyPoint, v: float) -> Mat2:
    """M T M^{-1}, evaluated as R_k (1 + P) and cross-checked against the
    explicit conjugation.

    A mismatch beyond CONJUGATION_TOL means an implementation bug, not bad
    input, hence the AssertionError.
    """
    p = perturbation(E, v)
    factored = rotation(E.k) @ Mat2(1.0 + p.a11, p.a12, p.a21, 1.0 + p.a22)
    explicit = (basis_change(E) @ transfer(E, v)) @ basis_change_inv(E)
    mismatch = factored.max_abs_diff(explicit)
    if mismatch > CONJUGATION_TOL:
        raise AssertionError(
            f"conjugation identity violated by {mismatch:.3e} at k={E.k}, v={v}: "
            "implementation bug"
        )
    return factored


def hat_transfer(E: EnergyPoint, psi: float, v: float) -> Mat2:
    """Auxiliary transfer matrix R_psi M T M^{-1}."""
    return rotation(psi) @ conjugated_transfer(E, v)


def squared_singular_value(E: EnergyPoint, v: float) -> float:
    """Largest eigenvalue lam of (M T M^{-1})^T (M T M^{-1}); the other is 1/lam.

    lam = 1 + a/2 + sqrt(a + a^2/4) with a = v^2/sin^2 k.
    """
    a = (v / E.sin_k) ** 2
    return 1.0 + 0.5 * a + math.sqrt(a + 0.25 * a * a)
