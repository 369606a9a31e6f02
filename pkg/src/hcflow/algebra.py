"""Structure constants of the complexified Lie algebra.

Coefficients are stored as a dense (4, 4, 4) complex array mu over the basis
(Z1, Z2, conj Z1, conj Z2): mu[A, B, C] is the C-component of the bracket of
basis vectors A and B.  Index slots 0..1 are the holomorphic directions and
2..3 their conjugates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Z1, Z2, ZB1, ZB2 = 0, 1, 2, 3
_CONJ = (ZB1, ZB2, Z1, Z2)


def conjugate_vector(v: np.ndarray) -> np.ndarray:
    """Complex conjugation of a coefficient vector, swapping Zi <-> conj Zi."""
    v = np.asarray(v, dtype=complex)
    return np.array([np.conj(v[2]), np.conj(v[3]), np.conj(v[0]), np.conj(v[1])])


@dataclass(frozen=True)
class StructureConstants:
    """Immutable bracket coefficients of a 4-dimensional complexified algebra."""

    mu: np.ndarray

    def __post_init__(self) -> None:
        mu = np.ascontiguousarray(np.asarray(self.mu, dtype=complex))
        if mu.shape != (4, 4, 4):
            raise ValueError(f"expected shape (4, 4, 4), got {mu.shape}")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    # -- invariant diagnostics (max absolute violations) --

    def antisymmetry_violation(self) -> float:
        return float(np.max(np.abs(self.mu + np.swapaxes(self.mu, 0, 1))))

    def reality_violation(self) -> float:
        """Deviation from the bracket being the complexification of a real one."""
        worst = 0.0
        for a in range(4):
            for b in range(4):
                diff = conjugate_vector(self.mu[a, b]) - self.mu[_CONJ[a], _CONJ[b]]
                worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def integrability_violation(self) -> float:
        """Antiholomorphic part of brackets of holomorphic vectors (must vanish)."""
        return float(np.max(np.abs(self.mu[0:2, 0:2, 2:4])))

    def jacobi_violation(self) -> float:
        mu = self.mu
        total = (np.einsum('abd,dce->abce', mu, mu)
                 + np.einsum('bcd,dae->abce', mu, mu)
                 + np.einsum('cad,dbe->abce', mu, mu))
        return float(np.max(np.abs(total)))

    def validate(self, tol: float = 1e-14) -> None:
        checks = {
            "antisymmetry": self.antisymmetry_violation(),
            "reality": self.reality_violation(),
            "integrability": self.integrability_violation(),
            "jacobi": self.jacobi_violation(),
        }
        bad = {k: v for k, v in checks.items() if v > tol}
        if bad:
            raise ValueError(f"structure constants violate {bad} (tol {tol:g})")


def from_brackets(b12=None, b11=None, b22=None, b12b=None) -> StructureConstants:
    """Assemble structure constants from the independent brackets.

    Arguments are coefficient 4-vectors over (Z1, Z2, conj Z1, conj Z2) for
    the brackets [Z1, Z2], [Z1, conj Z1], [Z2, conj Z2] and [Z1, conj Z2];
    omitted brackets are zero.  [Z2, conj Z1], the conjugate pair brackets and
    all swapped-argument entries are filled in by reality and antisymmetry.
    """
    zero = np.zeros(4, dtype=complex)

    def vec(v):
        return zero if v is None else np.asarray(v, dtype=complex)

    b12, b11, b22, b12b = vec(b12), vec(b11), vec(b22), vec(b12b)
    mu = np.zeros((4, 4, 4), dtype=complex)

    def put(a, b, v):
        mu[a, b, :] = v
        mu[b, a, :] = -v

    put(Z1, Z2, b12)
    put(Z1, ZB1, b11)
    put(Z2, ZB2, b22)
    put(Z1, ZB2, b12b)
    put(Z2, ZB1, -conjugate_vector(b12b))
    put(ZB1, ZB2, conjugate_vector(b12))
    return StructureConstants(mu)
