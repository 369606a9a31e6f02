"""Left-invariant Hermitian metrics on a 2-dimensional complex Lie group.

A metric is parameterized by the frame coefficients (x, y, z): x and y are
the positive diagonal entries, z the complex off-diagonal entry of the
Hermitian 2x2 matrix [[x, z], [conj(z), y]].  The determinant D = x*y - |z|^2
and the squared off-diagonal norm u = |z|^2 are always recomputed from
(x, y, z), never cached.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Relative positivity margin: metrics with D < POSITIVITY_MARGIN * x * y are
#: treated as degenerate by operations that require an invertible metric.
POSITIVITY_MARGIN = 1e-12


class DegenerateMetricError(ValueError):
    """Raised when an operation needs a positive-definite metric and D <= 0."""


@dataclass(frozen=True)
class HermitianMetric:
    """Value type for the metric coefficients (x, y, z)."""

    x: float
    y: float
    z: complex = 0.0

    @property
    def u(self) -> float:
        """Squared modulus of the off-diagonal coefficient, |z|^2."""
        z = complex(self.z)
        return z.real * z.real + z.imag * z.imag

    @property
    def det(self) -> float:
        """Determinant x*y - |z|^2 of the metric matrix."""
        return self.x * self.y - self.u

    def is_positive(self) -> bool:
        """True iff the matrix [[x, z], [conj(z), y]] is positive definite."""
        return self.x > 0 and self.det > 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", complex(self.z))

    def require_positive(self, margin: float = POSITIVITY_MARGIN) -> None:
        """Reject metrics that are degenerate up to the roundoff margin."""
        if not (self.x > 0 and self.y > 0 and self.det >= margin * self.x * self.y):
            raise DegenerateMetricError(
                f"metric degenerate: x={self.x!r} y={self.y!r} |z|={abs(self.z)!r} "
                f"D={self.det!r} (margin {margin:g})"
            )

    def matrix(self) -> np.ndarray:
        """Metric as a 2x2 complex array; entry [i, j] pairs frame i with conjugate frame j."""
        return np.array([[self.x, self.z], [np.conj(self.z), self.y]], dtype=complex)

    def inverse_components(self, margin: float = POSITIVITY_MARGIN) -> tuple[float, float, complex]:
        """Inverse-metric components (y/D, x/D, -z/D).

        Ordered as (first diagonal, second diagonal, off-diagonal), i.e. the
        entries of the inverse matrix [[y, -z], [-conj(z), x]] / D.
        """
        self.require_positive(margin)
        d = self.det
        return self.y / d, self.x / d, -self.z / d

    def inverse_matrix(self, margin: float = POSITIVITY_MARGIN) -> np.ndarray:
        """Inverse of ``matrix()`` as a 2x2 complex array."""
        i11, i22, i12 = self.inverse_components(margin)
        return np.array([[i11, i12], [np.conj(i12), i22]], dtype=complex)

    def scaled(self, s: float) -> "HermitianMetric":
        return HermitianMetric(s * self.x, s * self.y, s * self.z)


def metric_determinant(g: HermitianMetric) -> float:
    """Determinant D = x*y - |z|^2."""
    return g.det


def metric_inverse(g: HermitianMetric) -> tuple[float, float, complex]:
    """Inverse components (y/D, x/D, -z/D); raises DegenerateMetricError if D <= margin*x*y."""
    return g.inverse_components()


def is_positive(g: HermitianMetric) -> bool:
    """Positive-definiteness test: x > 0 and x*y - |z|^2 > 0."""
    return g.is_positive()
