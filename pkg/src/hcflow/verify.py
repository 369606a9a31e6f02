"""Verification harness: general-contraction engine vs closed-form tensors,
structure-constant hygiene, and the report-only diff against the published
per-component tables.

The closed forms are the production fast path; they are only trusted because
this suite certifies them against the contraction engine.  The published
S/Q component tables are known to contain typos, so their diff is reported
per component and never asserted.
"""
from __future__ import annotations

import logging
import time

import numpy as np

from .catalog import entry, list_geometries, sample_metric, sample_params
from .curvature import curvature_bundle, hermiticity_defect
from .geometry import Geometry, GeometryParams

log = logging.getLogger("hcflow.verify")

K_AGREEMENT_TOL = 1e-9


def _rel_matrix_error(computed: np.ndarray, reference: np.ndarray) -> float:
    """Max componentwise deviation, normalized by the reference matrix scale.

    The matrix scale (not the individual component) is the denominator so
    that components which vanish identically do not turn roundoff into a
    spurious infinite relative error.
    """
    scale = max(1.0, float(np.max(np.abs(reference))))
    return float(np.max(np.abs(computed - reference))) / scale


def verify_geometry(geometry: Geometry, samples: int, seed: int,
                    params: GeometryParams | None = None) -> dict:
    """Engine-vs-closed-form agreement on random metrics for one geometry."""
    rng = np.random.default_rng(seed)
    if params is None:
        params = sample_params(geometry, rng)
    desc = entry(geometry)
    mu = desc.structure_constants(params)
    worst = 0.0
    worst_herm = 0.0
    for _ in range(samples):
        g = sample_metric(rng)
        bundle = curvature_bundle(mu, g)
        closed = desc.closed_form_K(params, g)
        worst = max(worst, _rel_matrix_error(bundle.K, closed))
        worst_herm = max(worst_herm, hermiticity_defect(bundle.K)
                         / max(1.0, float(np.max(np.abs(bundle.K)))))
    log.debug("%s: max rel error %.3e over %d metrics", geometry.value, worst, samples)
    return {
        "geometry": geometry.value,
        "params": params.as_dict(),
        "samples": samples,
        "max_rel_error": worst,
        "max_hermiticity_defect": worst_herm,
        "passed": worst <= K_AGREEMENT_TOL,
    }


def verify_structure_constants(geometry: Geometry, draws: int, seed: int,
                               tol: float = 1e-14) -> dict:
    """Antisymmetry/reality/integrability/Jacobi hygiene over parameter draws."""
    rng = np.random.default_rng(seed)
    worst = {"antisymmetry": 0.0, "reality": 0.0, "integrability": 0.0, "jacobi": 0.0}
    for _ in range(draws):
        params = sample_params(geometry, rng)
        mu = entry(geometry).structure_constants(params)
        worst["antisymmetry"] = max(worst["antisymmetry"], mu.antisymmetry_violation())
        worst["reality"] = max(worst["reality"], mu.reality_violation())
        worst["integrability"] = max(worst["integrability"], mu.integrability_violation())
        worst["jacobi"] = max(worst["jacobi"], mu.jacobi_violation())
    return {"geometry": geometry.value, "draws": draws, "violations": worst,
            "passed": all(v <= tol for v in worst.values())}


def appendix_diff(geometry: Geometry, samples: int, seed: int,
                  params: GeometryParams | None = None) -> dict:
    """Report-only comparison of the published S/Q component tables against
    the contraction engine, plus the reassembled K against the closed form.

    Known discrepancies (dimensionally inconsistent published entries) show up
    here as order-one diffs; they are recorded, not failed.
    """
    rng = np.random.default_rng(seed)
    if params is None:
        params = sample_params(geometry, rng)
    desc = entry(geometry)
    mu = desc.structure_constants(params)
    names = ("S", "Q1", "Q2", "Q3", "Q4")
    worst: dict[str, np.ndarray] = {n: np.zeros((2, 2)) for n in names}
    worst_assembled = 0.0
    for _ in range(samples):
        g = sample_metric(rng)
        tables = desc.appendix_tables(params, g)
        if tables is None:
            return {"geometry": geometry.value, "tables": None}
        bundle = curvature_bundle(mu, g)
        computed = {"S": bundle.S, "Q1": bundle.Q1, "Q2": bundle.Q2,
                    "Q3": bundle.Q3, "Q4": bundle.Q4}
        for n in names:
            scale = max(1.0, float(np.max(np.abs(computed[n]))))
            worst[n] = np.maximum(worst[n], np.abs(tables[n] - computed[n]) / scale)
        assembled = (tables["S"] - 0.5 * tables["Q1"] + 0.25 * tables["Q2"]
                     + 0.5 * tables["Q3"] - tables["Q4"])
        worst_assembled = max(worst_assembled,
                              _rel_matrix_error(assembled, desc.closed_form_K(params, g)))
    component_report = {
        n: {"max_rel_diff": float(np.max(worst[n])),
            "per_component": [[float(worst[n][i, j]) for j in range(2)] for i in range(2)]}
        for n in names
    }
    return {
        "geometry": geometry.value,
        "params": params.as_dict(),
        "samples": samples,
        "tables": component_report,
        "assembled_K_vs_closed_form": worst_assembled,
    }


def run_verification(geometries: list[Geometry] | None = None, samples: int = 200,
                     seed: int = 0, include_appendix: bool = False) -> dict:
    """Full verification report; ``passed`` reflects only the K agreement."""
    geoms = geometries if geometries is not None else [d.geometry for d in list_geometries()]
    t0 = time.perf_counter()
    report: dict = {"seed": seed, "samples": samples, "geometries": []}
    for i, geom in enumerate(geoms):
        item = verify_geometry(geom, samples, seed + i)
        item["structure_constants"] = verify_structure_constants(geom, 20, seed + i)
        if include_appendix:
            item["appendix_diff"] = appendix_diff(geom, min(samples, 25), seed + i)
        report["geometries"].append(item)
    report["elapsed_seconds"] = time.perf_counter() - t0
    report["passed"] = all(item["passed"] for item in report["geometries"])
    return report
