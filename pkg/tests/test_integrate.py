import numpy as np
import pytest

from hcflow.geometry import Geometry, GeometryParams
from hcflow.integrate import (ENGINE_GENERAL, FlowConfig, OUTCOME_DEGENERATE_INPUT,
                              OUTCOME_EXTINCT, OUTCOME_IMMORTAL,
                              detect_extinction, integrate, rhs)
from hcflow.metric import HermitianMetric


def _config(geometry, g0, t_max, **kwargs):
    params_kwargs = kwargs.pop("params", {})
    return FlowConfig(params=GeometryParams(geometry, **params_kwargs),
                      g0=g0, t_max=t_max, **kwargs)


# ---------------------------------------------------------------------------
# right-hand side
# ---------------------------------------------------------------------------

def test_rhs_hopf_invariant_ray():
    xdot, ydot, zdot = rhs(GeometryParams(Geometry.HOPF, lam=0.0),
                           HermitianMetric(1, 1.5, 0))
    assert xdot == pytest.approx(-4 / 9)
    assert ydot == pytest.approx(-2 / 3)
    assert zdot == 0


def test_rhs_kodaira_primary_identity():
    xdot, ydot, zdot = rhs(GeometryParams(Geometry.KODAIRA_PRIMARY),
                           HermitianMetric(1, 1, 0))
    assert (xdot, ydot, zdot) == (2.0, -1.0, 0.0)


def test_rhs_inoue_s0_identity():
    xdot, ydot, zdot = rhs(GeometryParams(Geometry.INOUE_S0, a=1.0, b=1.0),
                           HermitianMetric(1, 1, 0))
    assert (xdot, ydot, zdot) == (0.0, 8.0, 0.0)


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def test_hopf_exact_solution_and_extinction_time():
    config = _config(Geometry.HOPF, HermitianMetric(1, 1.5, 0), 10.0,
                     params={"lam": 0.0}, sample_stride=0.01)
    traj, outcome = integrate(config)
    assert outcome.outcome_class == OUTCOME_EXTINCT
    assert outcome.t_est == pytest.approx(2.25, abs=1e-3)
    sel = traj.t <= 2.2
    assert np.max(np.abs(traj.x[sel] - (1 - 4 * traj.t[sel] / 9))) <= 1e-6
    assert np.max(np.abs(traj.y[sel] - 1.5 * traj.x[sel])) <= 1e-6
    assert detect_extinction(traj) == outcome.t_est


def test_hopf_lam1_extinction_time():
    config = _config(Geometry.HOPF, HermitianMetric(1, 3, 0), 20.0,
                     params={"lam": 1.0}, sample_stride=0.1)
    _, outcome = integrate(config)
    assert outcome.t_est == pytest.approx(4.5, abs=2e-3)


def test_torus_flow_is_stationary():
    g0 = HermitianMetric(1.2, 0.8, 0.3 + 0.1j)
    traj, outcome = integrate(_config(Geometry.TORUS, g0, 100.0, sample_stride=1.0))
    assert outcome.outcome_class == OUTCOME_IMMORTAL
    drift = max(np.max(np.abs(traj.x - g0.x)), np.max(np.abs(traj.y - g0.y)),
                np.max(np.abs(traj.z_re - g0.z.real)),
                np.max(np.abs(traj.z_im - g0.z.imag)))
    assert drift <= 1e-12
    assert detect_extinction(traj) is None


def test_degenerate_initial_metric():
    traj, outcome = integrate(_config(Geometry.TORUS, HermitianMetric(1, 1, 1.0), 1.0))
    assert outcome.outcome_class == OUTCOME_DEGENERATE_INPUT
    assert len(traj) == 0


def test_initial_metric_below_threshold_is_degenerate_input():
    g0 = HermitianMetric(1.0, 1.0, np.sqrt(1 - 1e-12))
    _, outcome = integrate(_config(Geometry.HOPF, g0, 1.0, params={"lam": 0.5}))
    assert outcome.outcome_class == OUTCOME_DEGENERATE_INPUT


def test_near_degenerate_start_integrates_through_fast_transient():
    # D/(x*y) = 1e-6 makes the initial velocity ~1e12; the flow moves away
    # from degeneracy before eventually collapsing
    g0 = HermitianMetric(1.0, 1.0, np.sqrt(1 - 1e-6))
    traj, outcome = integrate(_config(Geometry.HOPF, g0, 100.0,
                                      params={"lam": 0.5}, sample_stride=0.01))
    assert outcome.outcome_class == OUTCOME_EXTINCT
    assert 0 < outcome.t_est < 1.0
    assert traj.monitor_final == pytest.approx(1e-10, rel=0.1)


def test_diagonal_initial_metrics_stay_diagonal():
    for geometry, params in ((Geometry.HOPF, {"lam": 0.7}),
                             (Geometry.PROPERLY_ELLIPTIC, {"lam": 1.0})):
        config = _config(geometry, HermitianMetric(1, 2, 0), 5.0,
                         params=params, sample_stride=0.05)
        traj, _ = integrate(config)
        zmax = np.max(np.hypot(traj.z_re, traj.z_im))
        assert zmax <= 10 * config.abs_tol


def test_halving_tolerance_convergence():
    g0 = HermitianMetric(1.0, 1.0, 0.4 + 0.3j)
    coarse = 1e-7
    states = []
    for rel_tol in (coarse, coarse / 2):
        config = _config(Geometry.INOUE_SP_J2, g0, 50.0, sample_stride=1.0,
                         rel_tol=rel_tol, abs_tol=1e-13)
        traj, _ = integrate(config)
        states.append(np.column_stack([traj.x, traj.y, traj.z_re, traj.z_im]))
    diff = np.max(np.abs(states[0] - states[1]))
    scale = max(1.0, float(np.max(np.abs(states[0]))))
    assert diff <= coarse * scale


def test_cross_engine_agreement():
    for geometry, params, g0 in (
            (Geometry.HOPF, {"lam": 0.7}, HermitianMetric(1, 2, 0.4 + 0.1j)),
            (Geometry.INOUE_SP_J2, {}, HermitianMetric(1, 1, 0.3 + 0.4j))):
        rel_tol = 1e-9
        trajs = []
        for engine in ("closed-form", ENGINE_GENERAL):
            config = _config(geometry, g0, 5.0, params=params,
                             sample_stride=0.05, rel_tol=rel_tol, engine=engine)
            traj, outcome = integrate(config)
            trajs.append(traj)
        n = min(len(trajs[0]), len(trajs[1]))
        a = np.column_stack([trajs[0].x, trajs[0].y, trajs[0].z_re, trajs[0].z_im])[:n]
        b = np.column_stack([trajs[1].x, trajs[1].y, trajs[1].z_re, trajs[1].z_im])[:n]
        scale = max(1.0, float(np.max(np.abs(a))))
        assert np.max(np.abs(a - b)) <= 100 * rel_tol * scale


def test_extinct_final_state_has_tiny_monitor():
    config = _config(Geometry.HOPF, HermitianMetric(2, 0.7, 0.5 - 0.3j), 100.0,
                     params={"lam": 1.5}, sample_stride=0.5)
    traj, outcome = integrate(config)
    assert outcome.outcome_class == OUTCOME_EXTINCT
    assert traj.monitor_final < 1e-6
    assert outcome.t_est is not None and outcome.t_est <= 100.0
    assert np.all(np.diff(traj.t) > 0)


def test_trajectory_csv_schema():
    config = _config(Geometry.TORUS, HermitianMetric(1, 1, 0.5), 1.0,
                     sample_stride=0.5)
    traj, _ = integrate(config)
    csv = traj.to_csv()
    lines = csv.strip().split("\n")
    assert lines[0] == "t,x,y,z_re,z_im,D,u,xdot,ydot"
    assert len(lines) == 1 + len(traj)
    row = lines[1].split(",")
    assert len(row) == 9
    assert float(row[5]) == pytest.approx(0.75)   # D = 1 - 0.25
    assert float(row[6]) == pytest.approx(0.25)   # u = |z|^2


def test_config_validation():
    params = GeometryParams(Geometry.TORUS)
    g0 = HermitianMetric(1, 1, 0)
    with pytest.raises(ValueError):
        FlowConfig(params=params, g0=g0, t_max=-1.0)
    with pytest.raises(ValueError):
        FlowConfig(params=params, g0=g0, t_max=1.0, rel_tol=2.0)
    with pytest.raises(ValueError):
        FlowConfig(params=params, g0=g0, t_max=1.0, engine="magic")
    with pytest.raises(ValueError):
        FlowConfig(params=params, g0=g0, t_max=1.0, sample_stride=0.0)
