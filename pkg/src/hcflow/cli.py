"""Command-line interface: run flows, verify tensor identities, sweep grids.

Commands
--------
list    catalog of geometries, parameter schemas and expected labels
run     integrate one flow and write trajectory/outcome/analysis files
verify  engine-vs-closed-form agreement suite (plus report-only table diffs)
sweep   run a grid of configs in parallel and summarize one row per run

Exit codes: run returns 0 on a clean classification, 1 on bad input, 2 when
the run is Unclassified, 3 on integrator failure; verify returns 0 iff all
K agreements pass.  Log verbosity comes from the HCF_LOG environment variable
(debug, info, warning, error).
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import LIMIT_UNCLASSIFIED
from .catalog import catalog_json
from .geometry import Geometry, GeometryParams, InadmissibleParamsError
from .integrate import (ENGINE_CLOSED_FORM, ENGINE_GENERAL, FlowConfig,
                        OUTCOME_DEGENERATE_INPUT, OUTCOME_FAILURE, Trajectory,
                        integrate)
from .metric import HermitianMetric
from .report import analysis_report
from .verify import run_verification

log = logging.getLogger("hcflow")

SCHEMA_VERSION = 1
EMIT_CHOICES = ("trajectory-csv", "outcome-json", "analysis-json", "plot-data")
DEFAULT_EMIT = ("trajectory-csv", "outcome-json", "analysis-json")

#: JSON config fields (fail-closed: anything else is rejected).
_CONFIG_FIELDS = {"schema_version", "geometry", "params", "g0", "t_max",
                  "rel_tol", "abs_tol", "engine", "sample_stride",
                  "degeneracy_threshold"}
_G0_FIELDS = {"x", "y", "z_re", "z_im"}
_PARAM_JSON_NAMES = {"lambda": "lam", "a": "a", "b": "b", "epsilon": "epsilon"}


class ConfigError(ValueError):
    """Malformed run configuration; carries a pointer to the offending field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"config error at {path}: {message}")


def parse_config(doc: dict) -> FlowConfig:
    """Validate and convert a config JSON document (fail-closed)."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "expected a JSON object")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"$.{sorted(unknown)[0]}", "unknown field")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("$.schema_version", f"must be {SCHEMA_VERSION}")
    for required in ("geometry", "g0", "t_max"):
        if required not in doc:
            raise ConfigError(f"$.{required}", "missing required field")

    try:
        geometry = Geometry.from_name(str(doc["geometry"]))
    except InadmissibleParamsError as exc:
        raise ConfigError("$.geometry", str(exc)) from None

    raw_params = doc.get("params", {})
    if not isinstance(raw_params, dict):
        raise ConfigError("$.params", "expected an object")
    kwargs = {}
    for key, value in raw_params.items():
        if key not in _PARAM_JSON_NAMES:
            raise ConfigError(f"$.params.{key}", "unknown parameter")
        name = _PARAM_JSON_NAMES[key]
        num = _number(f"$.params.{key}", value)
        if name == "epsilon":
            if num != int(num):
                raise ConfigError(f"$.params.{key}", "must be an integer")
            num = int(num)
        kwargs[name] = num
    try:
        params = GeometryParams(geometry, **kwargs)
    except InadmissibleParamsError as exc:
        raise ConfigError("$.params", str(exc)) from None

    g0doc = doc["g0"]
    if not isinstance(g0doc, dict):
        raise ConfigError("$.g0", "expected an object")
    unknown = set(g0doc) - _G0_FIELDS
    if unknown:
        raise ConfigError(f"$.g0.{sorted(unknown)[0]}", "unknown field")
    for required in ("x", "y"):
        if required not in g0doc:
            raise ConfigError(f"$.g0.{required}", "missing required field")
    g0 = HermitianMetric(
        _number("$.g0.x", g0doc["x"]), _number("$.g0.y", g0doc["y"]),
        complex(_number("$.g0.z_re", g0doc.get("z_re", 0.0)),
                _number("$.g0.z_im", g0doc.get("z_im", 0.0))))

    engine = str(doc.get("engine", ENGINE_CLOSED_FORM))
    if engine not in (ENGINE_CLOSED_FORM, ENGINE_GENERAL):
        raise ConfigError("$.engine",
                          f"must be {ENGINE_CLOSED_FORM!r} or {ENGINE_GENERAL!r}")
    try:
        return FlowConfig(
            params=params, g0=g0, t_max=_number("$.t_max", doc["t_max"]),
            rel_tol=_number("$.rel_tol", doc.get("rel_tol", 1e-9)),
            abs_tol=_number("$.abs_tol", doc.get("abs_tol", 1e-12)),
            engine=engine,
            sample_stride=(_number("$.sample_stride", doc["sample_stride"])
                           if "sample_stride" in doc else None),
            degeneracy_threshold=_number("$.degeneracy_threshold",
                                         doc.get("degeneracy_threshold", 1e-10)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("$", str(exc)) from None


def _number(path: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def config_to_doc(config: FlowConfig) -> dict:
    params = {("lambda" if k == "lam" else k): v
              for k, v in config.params.as_dict().items()}
    doc = {
        "schema_version": SCHEMA_VERSION,
        "geometry": config.params.geometry.value,
        "params": params,
        "g0": {"x": config.g0.x, "y": config.g0.y,
               "z_re": config.g0.z.real, "z_im": config.g0.z.imag},
        "t_max": config.t_max,
        "rel_tol": config.rel_tol,
        "abs_tol": config.abs_tol,
        "engine": config.engine,
        "degeneracy_threshold": config.degeneracy_threshold,
    }
    if config.sample_stride is not None:
        doc["sample_stride"] = config.sample_stride
    return doc


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _plot_data_csv(traj: Trajectory) -> str:
    lines = ["t,n_x,n_y,n_z_abs"]
    for i in range(len(traj)):
        w = 1.0 + traj.t[i]
        lines.append(",".join(f"{v:.17g}" for v in (
            traj.t[i], traj.x[i] / w, traj.y[i] / w,
            float(np.hypot(traj.z_re[i], traj.z_im[i])) / w)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_list(args) -> int:
    entries = catalog_json()
    if args.geometry:
        wanted = Geometry.from_name(args.geometry).value
        entries = [e for e in entries if e["id"] == wanted]
    if args.json:
        print(_dump_json(entries), end="")
        return 0
    widths = (22, 16, 10, 24)
    print(f"{'id':<{widths[0]}} {'group':<{widths[1]}} {'outcome':<{widths[2]}} "
          f"{'limit':<{widths[3]}} params")
    for e in entries:
        pnames = ",".join(p["name"] for p in e["params"]) or "-"
        print(f"{e['id']:<{widths[0]}} {e['group']:<{widths[1]}} "
              f"{e['expected_outcome']:<{widths[2]}} {e['expected_limit']:<{widths[3]}} {pnames}")
    return 0


def _config_from_args(args) -> FlowConfig:
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from None
        return parse_config(doc)
    if not args.geometry:
        raise ConfigError("$", "either --config or --geometry is required")
    geometry = Geometry.from_name(args.geometry)
    kwargs = {}
    for cli_name, name in (("lam", "lam"), ("a", "a"), ("b", "b"), ("epsilon", "epsilon")):
        value = getattr(args, cli_name)
        if value is not None:
            kwargs[name] = int(value) if name == "epsilon" else float(value)
    params = GeometryParams(geometry, **kwargs)
    g0 = HermitianMetric(args.x0, args.y0, complex(args.z0_re, args.z0_im))
    return FlowConfig(params=params, g0=g0, t_max=args.t_max,
                      rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                      engine=args.engine, sample_stride=args.sample_stride,
                      degeneracy_threshold=args.degeneracy_threshold)


def _execute_run(config: FlowConfig, out_dir: Path, emit: tuple[str, ...],
                 theta: float | None = None) -> tuple[int, dict]:
    traj, outcome = integrate(config)
    report = analysis_report(config, traj, outcome, theta=theta)
    out_dir.mkdir(parents=True, exist_ok=True)
    if "trajectory-csv" in emit:
        _atomic_write(out_dir / "trajectory.csv", traj.to_csv())
    if "outcome-json" in emit:
        _atomic_write(out_dir / "outcome.json", _dump_json(outcome.to_json_dict()))
    if "analysis-json" in emit:
        _atomic_write(out_dir / "analysis.json", _dump_json(report))
    if "plot-data" in emit:
        _atomic_write(out_dir / "plot_data.csv", _plot_data_csv(traj))

    if outcome.outcome_class == OUTCOME_DEGENERATE_INPUT:
        return 1, report
    if outcome.outcome_class == OUTCOME_FAILURE:
        return 3, report
    if report["classification"]["kind"] == LIMIT_UNCLASSIFIED:
        return 2, report
    return 0, report


def cmd_run(args) -> int:
    try:
        config = _config_from_args(args)
    except (ConfigError, InadmissibleParamsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit = tuple(args.emit.split(",")) if args.emit else DEFAULT_EMIT
    bad = set(emit) - set(EMIT_CHOICES)
    if bad:
        print(f"error: unknown emit target {sorted(bad)[0]!r}", file=sys.stderr)
        return 1
    code, report = _execute_run(config, Path(args.out), emit, theta=args.theta)
    cls = report["classification"]
    summary = {"outcome": report["outcome_class"], "classification": cls["kind"]}
    if "circle_length" in cls:
        summary["circle_length"] = cls["circle_length"]
    if report["outcome_class"] == "extinct":
        summary["t_est"] = report["classification"].get("collapse_time")
    print(_dump_json(summary), end="")
    return code


def cmd_verify(args) -> int:
    geometries = None
    if args.geometry:
        geometries = [Geometry.from_name(args.geometry)]
    report = run_verification(geometries=geometries, samples=args.samples,
                              seed=args.seed, include_appendix=args.appendix)
    if args.json:
        # wall-clock timing would break the byte-identical-output contract
        emitted = {k: v for k, v in report.items() if k != "elapsed_seconds"}
        print(_dump_json(emitted), end="")
    else:
        for item in report["geometries"]:
            status = "PASS" if item["passed"] else "FAIL"
            print(f"{item['geometry']:<22} max_rel_error={item['max_rel_error']:.3e} "
                  f"jacobi={item['structure_constants']['violations']['jacobi']:.2e} {status}")
            if args.appendix and item.get("appendix_diff", {}).get("tables"):
                for name, tab in item["appendix_diff"]["tables"].items():
                    flag = "" if tab["max_rel_diff"] < 1e-9 else "  (differs: published table)"
                    print(f"    {name}: max_rel_diff={tab['max_rel_diff']:.3e}{flag}")
        print(f"total: {report['elapsed_seconds']:.2f}s "
              f"{'PASS' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else 1


def _apply_override(doc: dict, path: str, value) -> None:
    keys = path.split(".")
    node = doc
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value


def _sweep_worker(item: tuple[int, dict, str, tuple[str, ...]]) -> tuple[int, dict]:
    index, doc, out_root, emit = item
    run_dir = Path(out_root) / f"run_{index:04d}"
    row: dict = {"run_id": index, "status": "ok"}
    try:
        config = parse_config(doc)
        code, report = _execute_run(config, run_dir, emit)
        cls = report["classification"]
        row.update({
            "geometry": report["geometry"],
            "outcome_class": report["outcome_class"],
            "t_est": cls.get("collapse_time"),
            "classification": cls["kind"],
            "circle_length": cls.get("circle_length"),
            "slope_x": report["growth_rates"].get("x", {}).get("slope"),
            "slope_y": report["growth_rates"].get("y", {}).get("slope"),
            "exit_code": code,
        })
    except Exception as exc:  # per-row failure must not kill the sweep
        row["status"] = f"error: {exc}"
    return index, row


def _grid_points(grid_doc: dict) -> list[dict]:
    if "points" in grid_doc:
        points = grid_doc["points"]
        if not isinstance(points, list) or not all(isinstance(p, dict) for p in points):
            raise ConfigError("$.points", "expected a list of override objects")
        return points
    if "product" in grid_doc:
        product = grid_doc["product"]
        if not isinstance(product, dict):
            raise ConfigError("$.product", "expected an object of path -> values")
        paths = sorted(product)
        points: list[dict] = [{}]
        for path in paths:
            values = product[path]
            if not isinstance(values, list):
                raise ConfigError(f"$.product.{path}", "expected a list of values")
            points = [dict(p, **{path: v}) for p in points for v in values]
        return points
    raise ConfigError("$", "grid needs a 'points' list or a 'product' object")


def cmd_sweep(args) -> int:
    try:
        base = json.loads(Path(args.config).read_text())
        grid = json.loads(Path(args.grid).read_text())
        points = _grid_points(grid)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    emit = tuple(args.emit.split(",")) if args.emit else DEFAULT_EMIT

    items = []
    for i, overrides in enumerate(points):
        doc = json.loads(json.dumps(base))
        for path, value in overrides.items():
            _apply_override(doc, path, value)
        items.append((i, doc, str(out_root), emit))

    rows: dict[int, dict] = {}
    if args.workers > 1 and len(items) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.workers) as pool:
            for index, row in pool.map(_sweep_worker, items):
                rows[index] = row
    else:
        for item in items:
            index, row = _sweep_worker(item)
            rows[index] = row

    override_keys = sorted({k for p in points for k in p})
    columns = (["run_id"] + override_keys
               + ["geometry", "outcome_class", "t_est", "slope_x", "slope_y",
                  "classification", "circle_length", "exit_code", "status"])
    lines = [",".join(columns)]
    for i, overrides in enumerate(points):
        row = rows[i]
        cells = []
        for col in columns:
            value = overrides.get(col) if col in override_keys else row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(f"{value:.17g}")
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    _atomic_write(out_root / "summary.csv", "\n".join(lines) + "\n")
    print(f"{len(points)} runs -> {out_root / 'summary.csv'}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcflow",
        description="Hermitian curvature flow on complex surface model geometries")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="catalog of geometries and expected labels")
    p_list.add_argument("--json", action="store_true")
    p_list.add_argument("--geometry")
    p_list.set_defaults(func=cmd_list)

    p_run = sub.add_parser("run", help="integrate one flow")
    p_run.add_argument("--config", help="flow config JSON file")
    p_run.add_argument("--geometry")
    p_run.add_argument("--lambda", dest="lam", type=float, default=None)
    p_run.add_argument("--a", type=float, default=None)
    p_run.add_argument("--b", type=float, default=None)
    p_run.add_argument("--epsilon", type=int, default=None)
    p_run.add_argument("--x0", type=float, default=1.0)
    p_run.add_argument("--y0", type=float, default=1.0)
    p_run.add_argument("--z0-re", type=float, default=0.0)
    p_run.add_argument("--z0-im", type=float, default=0.0)
    p_run.add_argument("--t-max", type=float, default=100.0)
    p_run.add_argument("--rel-tol", type=float, default=1e-9)
    p_run.add_argument("--abs-tol", type=float, default=1e-12)
    p_run.add_argument("--engine", default=ENGINE_CLOSED_FORM,
                       choices=[ENGINE_CLOSED_FORM, ENGINE_GENERAL])
    p_run.add_argument("--sample-stride", type=float, default=None)
    p_run.add_argument("--degeneracy-threshold", type=float, default=1e-10)
    p_run.add_argument("--theta", type=float, default=None,
                       help="classification threshold override")
    p_run.add_argument("--emit", help="comma list of: " + ",".join(EMIT_CHOICES))
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="engine vs closed-form agreement suite")
    p_verify.add_argument("--all", action="store_true")
    p_verify.add_argument("--geometry")
    p_verify.add_argument("--samples", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--appendix", action="store_true",
                          help="include report-only published-table diffs")
    p_verify.add_argument("--json", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="run a grid of configs")
    p_sweep.add_argument("--config", required=True, help="base config JSON")
    p_sweep.add_argument("--grid", required=True, help="grid JSON (points or product)")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--emit", help="comma list of: " + ",".join(EMIT_CHOICES))
    p_sweep.add_argument("--workers", type=int, default=min(8, os.cpu_count() or 1))
    p_sweep.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("HCF_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
