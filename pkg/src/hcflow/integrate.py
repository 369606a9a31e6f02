"""Flow integration: evolve a metric by minus its flow tensor until t_max,
collapse, or failure.

The state is the 4-real vector (x, y, Re z, Im z).  Extinction is detected by
a positivity monitor, the minimum of x, y and the determinant normalized by
the corresponding powers of the initial scale; when it crosses the configured
floor, the crossing time is bracketed inside the last accepted step by
bisection on the dense output.  Note the ratio D/(x*y) itself is useless as a
stopping quantity: on collapsing solutions x and y shrink jointly, so the
ratio can stay near 1 all the way to extinction while the metric dies.
"""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field

import numpy as np

from . import core
from .catalog import GEOMETRY_IDS, entry, pack_params
from .curvature import curvature_bundle
from .geometry import GeometryParams
from .metric import HermitianMetric

log = logging.getLogger("hcflow.integrate")

ENGINE_CLOSED_FORM = "closed-form"
ENGINE_GENERAL = "general-contraction"

OUTCOME_IMMORTAL = "immortal"
OUTCOME_EXTINCT = "extinct"
OUTCOME_DEGENERATE_INPUT = "degenerate-input"
OUTCOME_FAILURE = "integrator-failure"

TRAJECTORY_HEADER = "t,x,y,z_re,z_im,D,u,xdot,ydot"


@dataclass(frozen=True)
class FlowConfig:
    """Everything one flow run depends on."""

    params: GeometryParams
    g0: HermitianMetric
    t_max: float
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    engine: str = ENGINE_CLOSED_FORM
    sample_stride: float | None = None  # defaults to t_max / 1000
    degeneracy_threshold: float = 1e-10
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")
        if not (0 < self.rel_tol < 1 and 0 < self.abs_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.engine not in (ENGINE_CLOSED_FORM, ENGINE_GENERAL):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.sample_stride is not None and not self.sample_stride > 0:
            raise ValueError("sample_stride must be > 0")
        if not 0 < self.degeneracy_threshold < 1:
            raise ValueError("degeneracy_threshold must lie in (0, 1)")

    @property
    def stride(self) -> float:
        if self.sample_stride is not None:
            return self.sample_stride
        return self.t_max / 1000 if self.t_max > 0 else 1.0


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution curve with state derivatives at the samples."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z_re: np.ndarray
    z_im: np.ndarray
    xdot: np.ndarray
    ydot: np.ndarray
    zre_dot: np.ndarray
    zim_dot: np.ndarray
    stop_reason: str = ""
    t_est: float | None = None
    monitor_final: float = float("nan")

    @classmethod
    def from_rows(cls, rows: np.ndarray, stop_reason: str, t_est: float | None,
                  monitor_final: float) -> "Trajectory":
        if rows.size == 0:
            rows = np.zeros((0, 9))
        return cls(t=rows[:, 0], x=rows[:, 1], y=rows[:, 2], z_re=rows[:, 3],
                   z_im=rows[:, 4], xdot=rows[:, 5], ydot=rows[:, 6],
                   zre_dot=rows[:, 7], zim_dot=rows[:, 8],
                   stop_reason=stop_reason, t_est=t_est, monitor_final=monitor_final)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def u(self) -> np.ndarray:
        return self.z_re**2 + self.z_im**2

    @property
    def d(self) -> np.ndarray:
        return self.x * self.y - self.u

    @property
    def udot(self) -> np.ndarray:
        """d(|z|^2)/dt as induced by the integrated z evolution."""
        return 2.0 * (self.z_re * self.zre_dot + self.z_im * self.zim_dot)

    @property
    def ddot(self) -> np.ndarray:
        return self.xdot * self.y + self.x * self.ydot - self.udot

    def metric_at(self, i: int) -> HermitianMetric:
        return HermitianMetric(float(self.x[i]), float(self.y[i]),
                               complex(self.z_re[i], self.z_im[i]))

    def final_metric(self) -> HermitianMetric:
        return self.metric_at(len(self) - 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(TRAJECTORY_HEADER + "\n")
        u, d = self.u, self.d
        for i in range(len(self)):
            vals = (self.t[i], self.x[i], self.y[i], self.z_re[i], self.z_im[i],
                    d[i], u[i], self.xdot[i], self.ydot[i])
            buf.write(",".join(f"{v:.17g}" for v in vals) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class FlowOutcome:
    """Terminal classification of one flow run."""

    outcome_class: str
    t_est: float | None
    final_state: HermitianMetric | None
    diagnostics: str
    stats: dict = field(default_factory=dict)

    @property
    def extinct(self) -> bool:
        return self.outcome_class == OUTCOME_EXTINCT

    def to_json_dict(self) -> dict:
        final = None
        if self.final_state is not None:
            g = self.final_state
            final = {"x": g.x, "y": g.y, "z_re": g.z.real, "z_im": g.z.imag,
                     "D": g.det, "u": g.u}
        return {
            "class": self.outcome_class,
            "t_est": self.t_est,
            "final_state": final,
            "diagnostics": self.diagnostics,
            "stats": self.stats,
        }


def rhs(params: GeometryParams, g: HermitianMetric) -> tuple[float, float, complex]:
    """Flow velocity (xdot, ydot, zdot) of the metric g (closed-form tensors)."""
    g.require_positive()
    p1, p2 = pack_params(params)
    k11, k22, k12re, k12im = core.closed_k(
        GEOMETRY_IDS[params.geometry], p1, p2, g.x, g.y, g.z.real, g.z.imag)
    return -k11, -k22, complex(-k12re, -k12im)


def _general_rhs(params: GeometryParams):
    mu = entry(params.geometry).structure_constants(params)
    nan4 = (float("nan"),) * 4

    def fn(state):
        g = HermitianMetric(state[0], state[1], complex(state[2], state[3]))
        if not (g.x > 0 and g.y > 0 and g.det > 0):
            return nan4
        try:
            k = curvature_bundle(mu, g, margin=0.0).K
        except Exception:
            return nan4
        return -k[0, 0].real, -k[1, 1].real, -k[0, 1].real, -k[0, 1].imag

    return fn


def integrate(config: FlowConfig) -> tuple[Trajectory, FlowOutcome]:
    """Run the flow described by config; never raises for dynamical failures."""
    g0 = config.g0
    if not (g0.x > 0 and g0.y > 0
            and g0.det > config.degeneracy_threshold * g0.x * g0.y):
        outcome = FlowOutcome(OUTCOME_DEGENERATE_INPUT, None, None,
                              f"initial metric not positive above the degeneracy "
                              f"threshold: x={g0.x} y={g0.y} D={g0.det}")
        return Trajectory.from_rows(np.zeros((0, 9)), OUTCOME_DEGENERATE_INPUT,
                                    None, float("nan")), outcome

    state0 = (g0.x, g0.y, g0.z.real, g0.z.imag)
    if config.engine == ENGINE_CLOSED_FORM:
        p1, p2 = pack_params(config.params)
        status, t_est, rows, n_acc, n_rej, m_final = core.run_closed_flow(
            GEOMETRY_IDS[config.params.geometry], p1, p2, state0, config.t_max,
            config.rel_tol, config.abs_tol, config.stride,
            config.degeneracy_threshold, config.max_steps)
    else:
        status, t_est, rows, n_acc, n_rej, m_final = core.run_flow(
            _general_rhs(config.params), state0, config.t_max,
            config.rel_tol, config.abs_tol, config.stride,
            config.degeneracy_threshold, config.max_steps)

    if status == core.STATUS_REACHED_TMAX:
        klass, reason = OUTCOME_IMMORTAL, "reached t_max"
    elif status == core.STATUS_EXTINCT:
        klass, reason = OUTCOME_EXTINCT, "positivity monitor crossed threshold"
    else:
        klass, reason = OUTCOME_FAILURE, "error control failed away from a detected collapse"

    log.info("%s flow: %s after %d accepted steps (monitor %.2e)",
             config.params.geometry.value, klass, n_acc, m_final)
    traj = Trajectory.from_rows(rows, klass, t_est, m_final)
    stats = {"accepted_steps": int(n_acc), "rejected_steps": int(n_rej),
             "monitor_final": float(m_final), "engine": config.engine,
             "compiled_core": bool(core.COMPILED and config.engine == ENGINE_CLOSED_FORM)}
    final = traj.final_metric() if len(traj) else None
    outcome = FlowOutcome(klass, t_est, final, reason, stats)
    return traj, outcome


def detect_extinction(trajectory: Trajectory) -> float | None:
    """Bracketed extinction time when the degeneracy stop fired, else None."""
    if len(trajectory) == 0:
        raise ValueError("empty trajectory")
    if trajectory.stop_reason == OUTCOME_EXTINCT:
        return trajectory.t_est
    return None
