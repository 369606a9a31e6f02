import json

import numpy as np
import pytest

from hcflow.algebra import Z1, Z2, ZB2
from hcflow.catalog import (catalog_json, entry, list_geometries,
                            sample_metric, sample_params)
from hcflow.geometry import Geometry, GeometryParams
from hcflow.metric import HermitianMetric
from hcflow.verify import appendix_diff, run_verification, verify_geometry

from conftest import ALL_GEOMETRIES


def test_catalog_has_nine_entries():
    entries = list_geometries()
    assert len(entries) == 9
    assert {d.geometry for d in entries} == set(Geometry)


def test_expected_labels():
    assert entry(Geometry.HOPF).expected_outcome == "extinct"
    assert entry(Geometry.HOPF).expected_limit == "finite-time-collapse"
    assert entry(Geometry.INOUE_S0).expected_limit == "circle"
    assert entry(Geometry.PROPERLY_ELLIPTIC).expected_limit == "kaehler-einstein-curve"
    for geom in (Geometry.TORUS, Geometry.HYPERELLIPTIC,
                 Geometry.KODAIRA_PRIMARY, Geometry.KODAIRA_SECONDARY):
        assert entry(geom).expected_limit == "point"
    length = entry(Geometry.INOUE_S0).expected_circle_length(
        GeometryParams(Geometry.INOUE_S0, a=1.0, b=2.0))
    assert length == pytest.approx(2 * np.sqrt(2))
    assert entry(Geometry.INOUE_SPM_J1).expected_circle_length(
        GeometryParams(Geometry.INOUE_SPM_J1)) == pytest.approx(np.sqrt(3))


def test_catalog_json_round_trips():
    doc = catalog_json()
    assert len(doc) == 9
    text = json.dumps(doc, sort_keys=True)
    assert json.loads(text) == json.loads(json.dumps(doc, sort_keys=True))
    hopf = next(e for e in doc if e["id"] == "hopf")
    assert hopf["expected_outcome"] == "extinct"
    assert hopf["params"] == [{"name": "lam", "constraint": "any real"}]


# ---------------------------------------------------------------------------
# structure constants per geometry
# ---------------------------------------------------------------------------

def test_torus_brackets_vanish():
    mu = entry(Geometry.TORUS).structure_constants(GeometryParams(Geometry.TORUS)).mu
    assert np.all(mu == 0)


def test_hopf_brackets():
    mu = entry(Geometry.HOPF).structure_constants(
        GeometryParams(Geometry.HOPF, lam=0.0)).mu
    assert np.all(mu[Z1, Z2] == [0, 1, 0, 0])        # [Z1, Z2] = Z2
    assert np.all(mu[Z1, ZB2] == [0, 0, 0, -1])      # [Z1, conj Z2] = -conj Z2
    assert np.all(mu[Z2, ZB2] == [-1, 0, 1, 0])      # [Z2, conj Z2] = -Z1 + conj Z1


def test_inoue_s0_brackets():
    mu = entry(Geometry.INOUE_S0).structure_constants(
        GeometryParams(Geometry.INOUE_S0, a=1.0, b=1.0)).mu
    assert np.all(mu[Z1, Z2] == [-(1 + 1j), 0, 0, 0])
    assert np.all(mu[Z1, ZB2] == [1 + 1j, 0, 0, 0])
    assert np.all(mu[Z2, ZB2] == [0, -2j, 0, -2j])


# ---------------------------------------------------------------------------
# closed-form flow tensors
# ---------------------------------------------------------------------------

def test_closed_form_hyperelliptic_frozen_point():
    k = entry(Geometry.HYPERELLIPTIC).closed_form_K(
        GeometryParams(Geometry.HYPERELLIPTIC), HermitianMetric(1, 1, 0.5))
    assert k[0, 0].real == pytest.approx(4 / 9)
    assert k[1, 1].real == pytest.approx(1 / 9)
    assert k[0, 1] == pytest.approx(8 / 9)


def test_closed_form_hopf_ray_point():
    k = entry(Geometry.HOPF).closed_form_K(
        GeometryParams(Geometry.HOPF, lam=0.0), HermitianMetric(1, 1.5, 0))
    assert np.allclose(k, np.diag([4 / 9, 2 / 3]), atol=1e-15)


def test_closed_form_inoue_j1_diagonal_point():
    k = entry(Geometry.INOUE_SPM_J1).closed_form_K(
        GeometryParams(Geometry.INOUE_SPM_J1), HermitianMetric(1, 1, 0))
    assert np.allclose(k, np.diag([-3.0, 0.0]), atol=1e-15)


@pytest.mark.parametrize("geometry", ALL_GEOMETRIES, ids=lambda g: g.value)
def test_oracle_agreement(geometry):
    # the central correctness property: closed form == contraction engine
    report = verify_geometry(geometry, samples=50, seed=17)
    assert report["passed"], report
    assert report["max_rel_error"] <= 1e-9


def test_secondary_kodaira_both_complex_structures():
    for eps in (1, -1):
        report = verify_geometry(
            Geometry.KODAIRA_SECONDARY, samples=50, seed=23,
            params=GeometryParams(Geometry.KODAIRA_SECONDARY, epsilon=eps))
        assert report["passed"]


def test_hyperelliptic_kaehler_locus():
    desc = entry(Geometry.HYPERELLIPTIC)
    params = GeometryParams(Geometry.HYPERELLIPTIC)
    rng = np.random.default_rng(2)
    for _ in range(20):
        g = sample_metric(rng)
        k = desc.closed_form_K(params, g)
        diagonal = HermitianMetric(g.x, g.y, 0.0)
        assert np.max(np.abs(desc.closed_form_K(params, diagonal))) == 0.0
        assert desc.kaehler_locus(diagonal)
        if abs(g.z) > 1e-6:
            assert np.max(np.abs(k)) > 0.0
            assert not desc.kaehler_locus(g)


def test_diagonal_metrics_have_diagonal_k():
    # every off-diagonal closed-form component carries a factor of z
    rng = np.random.default_rng(3)
    for geometry in ALL_GEOMETRIES:
        params = sample_params(geometry, rng)
        g = HermitianMetric(1.7, 0.9, 0.0)
        k = entry(geometry).closed_form_K(params, g)
        assert abs(k[0, 1]) == 0.0


# ---------------------------------------------------------------------------
# published component tables (report-only diagnostics)
# ---------------------------------------------------------------------------

def test_appendix_tables_hyperelliptic_frozen_point():
    tables = entry(Geometry.HYPERELLIPTIC).appendix_tables(
        GeometryParams(Geometry.HYPERELLIPTIC), HermitianMetric(1, 1, 0.5))
    assert tables["Q2"][1, 1].real == pytest.approx(2 / 3)


def test_appendix_tables_kodaira_primary_frozen_point():
    tables = entry(Geometry.KODAIRA_PRIMARY).appendix_tables(
        GeometryParams(Geometry.KODAIRA_PRIMARY), HermitianMetric(1, 1, 0))
    assert np.allclose(tables["S"], np.diag([-1.0, 1.0]))
    assert np.allclose(tables["Q2"], np.diag([2.0, 0.0]))
    assert np.allclose(tables["Q4"], np.diag([1.0, 0.0]))


def test_appendix_tables_none_for_torus():
    assert entry(Geometry.TORUS).appendix_tables(
        GeometryParams(Geometry.TORUS), HermitianMetric(1, 1, 0)) is None


def test_appendix_diff_clean_geometries_assemble_to_k():
    # these published tables are internally consistent and reassemble the
    # closed-form flow tensor exactly
    for geometry in (Geometry.HYPERELLIPTIC, Geometry.KODAIRA_PRIMARY):
        report = appendix_diff(geometry, samples=15, seed=4)
        assert report["assembled_K_vs_closed_form"] <= 1e-12
        for table in report["tables"].values():
            assert table["max_rel_diff"] <= 1e-12


def test_appendix_diff_reports_hopf_q1_discrepancy_without_failing():
    # a known dimensional inconsistency in the published Hopf Q1 column:
    # the diff harness must surface it as data, not as a failure
    report = appendix_diff(Geometry.HOPF, samples=15, seed=4)
    assert report["tables"]["Q1"]["per_component"][1][1] > 0.01
    assert report["tables"]["S"]["max_rel_diff"] <= 1e-12
    assert report["tables"]["Q4"]["max_rel_diff"] <= 1e-12


def test_appendix_diff_is_json_serializable():
    report = appendix_diff(Geometry.INOUE_SP_J2, samples=5, seed=6)
    json.dumps(report, sort_keys=True)


def test_run_verification_aggregates():
    report = run_verification(samples=20, seed=1, include_appendix=False)
    assert report["passed"]
    assert len(report["geometries"]) == 9
    for item in report["geometries"]:
        assert item["structure_constants"]["passed"]
