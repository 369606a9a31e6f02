"""Independent explicit-loop reimplementations used as test oracles.

These deliberately avoid einsum and any shared code path with
hcflow.curvature: every contraction is an explicit nested loop, evaluated
in a different association order.
"""
from __future__ import annotations

import numpy as np

from hcflow.metric import HermitianMetric


def det_cofactor(m: np.ndarray) -> complex:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def _slots(mu: np.ndarray, g: HermitianMetric):
    a = g.matrix()
    b = np.linalg.inv(a)
    return a, b, mu


def christoffels_loops(mu: np.ndarray, g: HermitianMetric) -> np.ndarray:
    """gamma[k, i, s] by brute-force summation."""
    a, b, m = _slots(mu, g)
    gamma = np.zeros((2, 2, 2), dtype=complex)
    for k in range(2):
        for i in range(2):
            for s in range(2):
                acc = 0.0
                for j in range(2):
                    for p in range(2):
                        acc += -b[j, s] * a[i, p] * m[k, 2 + j, 2 + p]
                gamma[k, i, s] = acc
    return gamma


def torsion_loops(mu: np.ndarray, g: HermitianMetric) -> np.ndarray:
    """T[i, j, k] by antisymmetrizing brute-force Christoffels."""
    a, _, m = _slots(mu, g)
    gamma = christoffels_loops(mu, g)
    t_up = np.zeros((2, 2, 2), dtype=complex)  # torsion with raised last slot
    for i in range(2):
        for j in range(2):
            for s in range(2):
                t_up[i, j, s] = gamma[i, j, s] - gamma[j, i, s] - m[i, j, s]
    t = np.zeros((2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                acc = 0.0
                for s in range(2):
                    acc += a[s, k] * t_up[i, j, s]
                t[i, j, k] = acc
    return t


def second_chern_ricci_loops(mu: np.ndarray, g: HermitianMetric) -> np.ndarray:
    a, b, m = _slots(mu, g)
    gamma = christoffels_loops(mu, g)
    s_out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            acc = 0.0
            for k in range(2):
                for l in range(2):
                    for p in range(2):
                        for r in range(2):
                            acc += b[l, k] * a[p, j] * (
                                m[2 + l, i, r] * gamma[k, r, p]
                                - m[2 + l, r, p] * gamma[k, i, r]
                                - m[k, 2 + l, r] * gamma[r, i, p]
                                - m[k, 2 + l, 2 + r] * m[2 + r, i, p])
            s_out[i, j] = acc
    return s_out


def quadratic_terms_loops(mu: np.ndarray, g: HermitianMetric):
    _, b, _ = _slots(mu, g)
    t = torsion_loops(mu, g)
    tc = np.conj(t)
    q1 = np.zeros((2, 2), dtype=complex)
    q2 = np.zeros((2, 2), dtype=complex)
    q3 = np.zeros((2, 2), dtype=complex)
    q4 = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    for m_ in range(2):
                        for q in range(2):
                            w = b[l, k] * b[q, m_]
                            q1[i, j] += w * t[i, k, q] * tc[j, l, m_]
                            q2[i, j] += w * t[k, m_, j] * tc[l, q, i]
                            q3[i, j] += w * t[i, k, l] * tc[j, q, m_]
                            q4[i, j] += 0.5 * w * (t[m_, k, l] * tc[q, j, i]
                                                   + tc[q, l, k] * t[m_, i, j])
    return q1, q2, q3, q4


def hcf_tensor_loops(mu: np.ndarray, g: HermitianMetric) -> np.ndarray:
    s = second_chern_ricci_loops(mu, g)
    q1, q2, q3, q4 = quadratic_terms_loops(mu, g)
    return s - (0.5 * q1 - 0.25 * q2 - 0.5 * q3 + q4)
