"""Post-processing of flow trajectories: normalized limits, growth rates,
decay bounds, and the finite-time surrogate of the Gromov-Hausdorff
classification.

The classifier is a thresholded decision rule on the normalized components
x/(1+t), y/(1+t), |z|/(1+t) averaged over the final window of the run.  The
analytic statements it approximates are t -> infinity limits, so both the
threshold and the window are calibration choices, configurable per call.
Empirically the slowest geometry to settle is the Kodaira pair, whose
normalized x decays roughly like t^(-2/3); at t = 1000 it sits near 0.03-0.05
for moderate initial metrics, which motivates the default threshold 0.05.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import (LIMIT_CIRCLE, LIMIT_COLLAPSE, LIMIT_KE_CURVE, LIMIT_POINT,
                      entry)
from .geometry import Geometry, GeometryParams
from .integrate import OUTCOME_EXTINCT, OUTCOME_IMMORTAL, FlowOutcome, Trajectory
from .metric import HermitianMetric

LIMIT_FLAT_KAEHLER = "flat-kaehler-metric"
LIMIT_UNCLASSIFIED = "unclassified"

#: Decision threshold on normalized components (calibration choice, see module docstring).
DEFAULT_THETA = 0.05
#: Tail fraction of the run over which normalized components are averaged.
DEFAULT_WINDOW = 0.10
#: Immortal runs shorter than this cannot be classified.
MIN_CLASSIFIABLE_T = 500.0


class TrajectoryTooShortError(ValueError):
    """Raised when a trajectory lacks the tail data an operation needs."""


class DecayBoundViolation(AssertionError):
    """Raised when a trajectory breaks the exponential decay bound for u."""


@dataclass(frozen=True)
class LimitDescriptor:
    """Classified long-time limit with the numeric evidence that produced it."""

    kind: str
    circle_length: float | None = None
    normalized_limit: tuple[float, float] | None = None
    flat_limit: HermitianMetric | None = None
    collapse_time: float | None = None
    evidence: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out: dict = {"kind": self.kind, "evidence": self.evidence}
        if self.circle_length is not None:
            out["circle_length"] = self.circle_length
        if self.normalized_limit is not None:
            out["normalized_limit"] = list(self.normalized_limit)
        if self.flat_limit is not None:
            g = self.flat_limit
            out["flat_limit"] = {"x": g.x, "y": g.y, "z_re": g.z.real, "z_im": g.z.imag}
        if self.collapse_time is not None:
            out["collapse_time"] = self.collapse_time
        return out


def normalized_metric(g: HermitianMetric, t: float) -> HermitianMetric:
    """The metric rescaled by 1/(1+t); the result may be degenerate by design."""
    if t < 0:
        raise ValueError("t must be >= 0")
    s = 1.0 / (1.0 + t)
    return HermitianMetric(g.x * s, g.y * s, g.z * s)


def linear_growth_rate(traj: Trajectory, component: str,
                       window_frac: float = 0.5) -> tuple[float, float]:
    """Least-squares slope of x or y over the final window, with max relative
    deviation of the data from the affine fit."""
    if component not in ("x", "y"):
        raise ValueError("component must be 'x' or 'y'")
    if len(traj) < 4 or traj.t[-1] < 100.0:
        raise TrajectoryTooShortError(
            f"growth-rate fit needs a run to t >= 100, got t_end="
            f"{traj.t[-1] if len(traj) else 0.0}")
    v = traj.x if component == "x" else traj.y
    t = traj.t
    sel = t >= (1.0 - window_frac) * t[-1]
    tt, vv = t[sel], v[sel]
    design = np.column_stack([tt, np.ones_like(tt)])
    (slope, intercept), *_ = np.linalg.lstsq(design, vv, rcond=None)
    fit = slope * tt + intercept
    scale = max(1.0, float(np.max(np.abs(fit))))
    residual = float(np.max(np.abs(vv - fit)) / scale)
    return float(slope), residual


def verify_decay_bound(traj: Trajectory, slack: float = 1e-6) -> dict:
    """Check u(t) <= u(0) * exp(-2 t / y(0)) * (1 + slack) at every sample.

    Returns a report with the measured tail decay exponent and the limiting
    diagonal metric; raises DecayBoundViolation when the bound fails.
    Intended for hyperelliptic runs, where the bound is a theorem.
    """
    if len(traj) == 0:
        raise TrajectoryTooShortError("empty trajectory")
    u = traj.u
    u0, y0 = float(u[0]), float(traj.y[0])
    bound = u0 * np.exp(-2.0 * traj.t / y0) * (1.0 + slack)
    bad = np.nonzero(u > bound)[0]
    if bad.size:
        i = int(bad[0])
        raise DecayBoundViolation(
            f"u({traj.t[i]:g}) = {u[i]:.6e} exceeds bound {bound[i]:.6e}")

    exponent = None
    if u0 > 0:
        # log-linear fit over the tail, above the floating-point noise floor
        sel = (traj.t >= 0.5 * traj.t[-1]) & (u > 1e-280)
        if sel.sum() >= 4:
            tt = traj.t[sel]
            design = np.column_stack([tt, np.ones_like(tt)])
            (exponent, _), *_ = np.linalg.lstsq(design, np.log(u[sel]), rcond=None)
            exponent = float(exponent)
    gf = traj.final_metric()
    return {
        "passed": True,
        "u0": u0,
        "y0": y0,
        "bound_exponent": -2.0 / y0,
        "measured_exponent": exponent,
        "x_inf": gf.x,
        "y_inf": gf.y,
        "z_inf_abs": abs(gf.z),
    }


def _tail_means(traj: Trajectory, window_frac: float) -> tuple[float, float, float, dict]:
    t = traj.t
    sel = t >= (1.0 - window_frac) * t[-1]
    w = 1.0 + t[sel]
    n_x = float(np.mean(traj.x[sel] / w))
    n_y = float(np.mean(traj.y[sel] / w))
    n_z = float(np.mean(np.hypot(traj.z_re[sel], traj.z_im[sel]) / w))
    info = {"window_t_start": float(t[sel][0]), "window_t_end": float(t[-1]),
            "window_samples": int(sel.sum()),
            "n_x": n_x, "n_y": n_y, "n_z_abs": n_z}
    return n_x, n_y, n_z, info


def classify_gh_limit(geometry: Geometry, params: GeometryParams,
                      traj: Trajectory, outcome: FlowOutcome,
                      theta: float = DEFAULT_THETA,
                      window_frac: float = DEFAULT_WINDOW) -> LimitDescriptor:
    """Classify the normalized long-time limit of one flow run.

    Decision rule on the tail averages of the normalized components:
    everything below theta is a point; one surviving diagonal entry L on an
    Inoue geometry is a circle of length sqrt(L); a surviving first diagonal
    entry on a properly elliptic geometry is the rescaled base curve.
    Extinct runs are labeled by their collapse time.
    """
    if outcome.outcome_class == OUTCOME_EXTINCT:
        return LimitDescriptor(kind=LIMIT_COLLAPSE, collapse_time=outcome.t_est,
                               evidence={"monitor_final": traj.monitor_final})
    if outcome.outcome_class != OUTCOME_IMMORTAL:
        return LimitDescriptor(kind=LIMIT_UNCLASSIFIED,
                               evidence={"reason": outcome.outcome_class})
    if len(traj) == 0 or traj.t[-1] < MIN_CLASSIFIABLE_T:
        raise TrajectoryTooShortError(
            f"classification needs t_max >= {MIN_CLASSIFIABLE_T:g}, got "
            f"{traj.t[-1] if len(traj) else 0.0:g}")

    n_x, n_y, n_z, info = _tail_means(traj, window_frac)
    info["theta"] = theta

    if n_x < theta and n_y < theta and n_z < theta:
        if geometry is Geometry.HYPERELLIPTIC:
            # the un-rescaled flow converges too; report both facts
            info["unnormalized_limit"] = unnormalized_limit(traj).to_json_dict()
        return LimitDescriptor(kind=LIMIT_POINT, evidence=info)
    inoue = geometry in (Geometry.INOUE_S0, Geometry.INOUE_SPM_J1, Geometry.INOUE_SP_J2)
    if inoue and n_z < theta:
        if n_x >= theta > n_y:
            return LimitDescriptor(kind=LIMIT_CIRCLE, circle_length=math.sqrt(n_x),
                                   normalized_limit=(n_x, 0.0), evidence=info)
        if n_y >= theta > n_x:
            return LimitDescriptor(kind=LIMIT_CIRCLE, circle_length=math.sqrt(n_y),
                                   normalized_limit=(0.0, n_y), evidence=info)
    if (geometry is Geometry.PROPERLY_ELLIPTIC and n_x >= theta
            and n_y < theta and n_z < theta):
        return LimitDescriptor(kind=LIMIT_KE_CURVE,
                               normalized_limit=(n_x, 0.0), evidence=info)
    return LimitDescriptor(kind=LIMIT_UNCLASSIFIED, evidence=info)


def unnormalized_limit(traj: Trajectory) -> LimitDescriptor:
    """Un-rescaled limit of a hyperelliptic run: a flat diagonal metric."""
    gf = traj.final_metric()
    return LimitDescriptor(
        kind=LIMIT_FLAT_KAEHLER,
        flat_limit=HermitianMetric(gf.x, gf.y, 0.0),
        evidence={"z_final_abs": abs(gf.z)})


# ---------------------------------------------------------------------------
# per-geometry sign conditions and explicit bounds along trajectories
# ---------------------------------------------------------------------------

def _cond_max(name: str, values: np.ndarray, slack: float) -> dict:
    """values must be <= slack * scale; reports the worst margin."""
    scale = 1.0 + float(np.max(np.abs(values))) if values.size else 1.0
    worst = float(np.max(values)) if values.size else 0.0
    return {"condition": name, "passed": bool(worst <= slack * scale),
            "worst": worst, "allowed": slack * scale}


def monotonicity_report(geometry: Geometry, params: GeometryParams,
                        traj: Trajectory, rel_tol: float) -> dict:
    """Evaluate the per-geometry sign conditions and explicit bounds at all samples.

    All assertions carry a slack of 10*rel_tol (scaled by the magnitude of the
    quantity involved) to absorb integration error.
    """
    s = 10.0 * rel_tol
    xd, yd, ud, dd = traj.xdot, traj.ydot, traj.udot, traj.ddot
    x0, y0 = float(traj.x[0]), float(traj.y[0])
    d0 = x0 * y0 - float(traj.u[0])
    checks: list[dict] = []
    g = geometry
    if g is Geometry.TORUS:
        checks.append(_cond_max("xdot == 0", np.abs(xd), s))
        checks.append(_cond_max("ydot == 0", np.abs(yd), s))
        checks.append(_cond_max("udot == 0", np.abs(ud), s))
    if g in (Geometry.HYPERELLIPTIC, Geometry.HOPF, Geometry.INOUE_S0):
        checks.append(_cond_max("xdot <= 0", xd, s))
    if g in (Geometry.HYPERELLIPTIC, Geometry.PROPERLY_ELLIPTIC,
             Geometry.KODAIRA_SECONDARY, Geometry.INOUE_SPM_J1, Geometry.INOUE_SP_J2):
        checks.append(_cond_max("ydot <= 0", yd, s))
    if g is not Geometry.TORUS:
        checks.append(_cond_max("udot <= 0", ud, s))
    if g in (Geometry.HYPERELLIPTIC, Geometry.PROPERLY_ELLIPTIC,
             Geometry.KODAIRA_PRIMARY, Geometry.KODAIRA_SECONDARY,
             Geometry.INOUE_S0, Geometry.INOUE_SPM_J1):
        checks.append(_cond_max("Ddot >= 0", -dd, s))
    if g is Geometry.KODAIRA_PRIMARY:
        bound = np.sqrt(2.0 * traj.t * y0**3 + d0**2)
        checks.append(_cond_max("D(t) <= sqrt(2 t y0^3 + D0^2)", traj.d - bound, s))
        bound = (2.0 * y0**2 / d0) * traj.t + x0
        checks.append(_cond_max("x(t) <= (2 y0^2/D0) t + x0", traj.x - bound, s))
    if g is Geometry.INOUE_SPM_J1:
        checks.append(_cond_max("x(t) <= 3 t + x0", traj.x - (3.0 * traj.t + x0), s))
        checks.append(_cond_max("xdot <= 3", xd - 3.0, s))
    if g is Geometry.INOUE_SP_J2:
        cap = 3.0 + 2.0 * y0**2 / d0
        checks.append(_cond_max("xdot <= 3 + 2 y0^2/D0", xd - cap, s))
    return {"geometry": geometry.value, "slack": s,
            "passed": all(c["passed"] for c in checks), "checks": checks}


def udot_consistency(geometry: Geometry, params: GeometryParams,
                     traj: Trajectory) -> dict:
    """Compare d(|z|^2)/dt from the integrated z against the reduced formula.

    The flow integrates (x, y, Re z, Im z); the reduced systems evolve
    (x, y, u).  Their u-rates must agree at every sampled state.
    """
    desc = entry(geometry)
    worst = 0.0
    for i in range(len(traj)):
        observed = float(traj.udot[i])
        expected = desc.udot(params, traj.metric_at(i))
        denom = max(abs(observed), abs(expected))
        if denom > 0:
            worst = max(worst, abs(observed - expected) / denom)
    return {"max_rel_error": worst, "samples": len(traj)}
