"""Command-line interface: single points, sweeps, benchmark suites, instance checks.

Examples::

    python3 -m rdcba rd --source gaussian --sigma 1 --L 8 --K 100 --D 0.5
    python3 -m rdcba dr --source laplacian --R 0.9
    python3 -m rdcba sweep --source berger --D-grid 0:0.3:61 --out curve.csv
    python3 -m rdcba bench table1 --no-ba
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .ba import BaConfig, ba_search_dr, ba_search_rd
from .cba import StopCriterion, solve_dr, solve_rd, sweep_rd_curve
from .errors import InstanceError, RateDistortionError
from .model import ProblemInstance, classify_target_distortion, feasibility_range, load_instance, save_instance
from .sources import DistortionKind, GridSpec, Gaussian, Laplacian, Uniform, canonical_instance, discretize_density

RECORD_COLUMNS = (
    "source", "M", "N", "target", "rate", "distortion", "lambda",
    "iterations", "newton_steps_total", "wall_time_s", "stop_reason",
)
BENCH_COLUMNS = (
    "suite", "source", "kind", "target", "cba_rate", "cba_distortion", "cba_lambda", "cba_iters",
    "cba_time", "ba_rate", "ba_distortion", "ba_outer_trials", "ba_last_inner_iters", "ba_time",
    "speedup", "error",
)
TRACE_COLUMNS = ("n", "lam", "objective", "objective_pre", "achieved", "newton_steps", "kl_r")
# columns holding rates, rescaled by --units bits
RATE_COLUMNS = {"rate", "cba_rate", "ba_rate"}

SOURCES = ("gaussian", "laplacian", "uniform", "binary", "berger")
DEFAULT_K = {"gaussian": 100, "laplacian": 100, "uniform": 20}
DEFAULT_DISTORTION = {"gaussian": "squared", "laplacian": "absolute", "uniform": "squared"}
SUITES = ("table1", "table2", "table3", "bifurcation")
SUITE_TOL = {"table1": 1e-10, "table2": 1e-10, "table3": 1e-13, "bifurcation": 1e-10}


class ConfigError(Exception):
    """Invalid command-line configuration (exit status 2)."""


@dataclass
class InstanceSpec:
    source: Optional[str] = None
    path: Optional[str] = None
    sigma: float = 1.0
    b: float = 1.0
    p: float = 0.5
    L: float = 8.0
    K: Optional[int] = None
    N: Optional[int] = None
    distortion: Optional[str] = None

    def build(self) -> ProblemInstance:
        if (self.source is None) == (self.path is None):
            raise ConfigError("give exactly one of --source or --instance")
        try:
            if self.path is not None:
                return load_instance(self.path)
            if self.source in ("binary", "berger"):
                return canonical_instance(self.source, self.p)
            K = self.K if self.K is not None else DEFAULT_K[self.source]
            grid = GridSpec(self.L, K, K if self.N is None else self.N)
            kind = DistortionKind(self.distortion or DEFAULT_DISTORTION[self.source])
            density = {"gaussian": Gaussian(self.sigma), "laplacian": Laplacian(self.b), "uniform": Uniform()}
            return discretize_density(density[self.source], grid, kind)
        except (OSError, ValueError, KeyError, InstanceError) as exc:
            raise ConfigError(f"cannot build instance: {exc}") from exc


@dataclass
class RunConfig:
    command: str
    instance: InstanceSpec = field(default_factory=InstanceSpec)
    targets: Tuple[float, ...] = ()
    algorithm: str = "cba"
    tol: Optional[float] = None
    max_iterations: int = 1_000_000
    fmt: str = "csv"
    out: Optional[str] = None
    units: str = "nats"
    trace: Optional[str] = None
    trace_stride: int = 1
    suite: Optional[str] = None
    no_ba: bool = False
    only: Optional[str] = None
    jobs: int = 1
    export: Optional[str] = None

    def stop(self, default_tol: float = 1e-10) -> StopCriterion:
        try:
            return StopCriterion(self.tol if self.tol is not None else default_tol, self.max_iterations)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_grid(text: str) -> Tuple[float, ...]:
    """``a:b:n`` -> n evenly spaced values from a to b inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc
    if n < 1:
        raise ConfigError("grid needs at least one point")
    return tuple(float(v) for v in np.linspace(a, b, n))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdcba", description="Rate-distortion solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("instance")
    src.add_argument("--source", choices=SOURCES)
    src.add_argument("--instance", dest="instance_path", metavar="JSON")
    src.add_argument("--sigma", type=float, default=1.0)
    src.add_argument("--b", type=float, default=1.0)
    src.add_argument("--p", type=float, default=0.5)
    src.add_argument("--L", type=float, default=8.0)
    src.add_argument("--K", type=int)
    src.add_argument("--N", type=int)
    src.add_argument("--distortion", choices=[k.value for k in DistortionKind])
    out = common.add_argument_group("output")
    out.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    out.add_argument("--out")
    out.add_argument("--units", choices=("nats", "bits"), default="nats")
    solver = common.add_argument_group("solver")
    solver.add_argument("--tol", type=float, help="objective decrease tolerance")
    solver.add_argument("--max-iter", dest="max_iterations", type=int, default=1_000_000)

    tracing = argparse.ArgumentParser(add_help=False)
    tracing.add_argument("--trace", metavar="CSV", help="write the iteration trace of the last solve")
    tracing.add_argument("--trace-stride", type=int, default=1)

    p_rd = sub.add_parser("rd", parents=[common, tracing], help="R(D) at one or more distortions")
    p_rd.add_argument("--D", dest="targets", type=float, nargs="+", required=True)
    p_rd.add_argument("--algorithm", choices=("cba", "ba"), default="cba")

    p_dr = sub.add_parser("dr", parents=[common, tracing], help="D(R) at one or more rates (nats)")
    p_dr.add_argument("--R", dest="targets", type=float, nargs="+", required=True)
    p_dr.add_argument("--algorithm", choices=("cba", "ba"), default="cba")

    p_sw = sub.add_parser("sweep", parents=[common], help="R(D) over a grid of distortions")
    grid = p_sw.add_mutually_exclusive_group(required=True)
    grid.add_argument("--D-grid", dest="grid", metavar="A:B:N")
    grid.add_argument("--D", dest="targets", type=float, nargs="+")
    p_sw.add_argument("--algorithm", choices=("cba", "ba"), default="cba")

    p_b = sub.add_parser("bench", parents=[common], help="CBA versus BA on a benchmark suite")
    p_b.add_argument("suite", choices=SUITES)
    p_b.add_argument("--no-ba", action="store_true", help="skip the baseline")
    p_b.add_argument("--only", help="keep pairs whose source label contains this text")
    p_b.add_argument("--jobs", type=int, default=1)

    p_v = sub.add_parser("validate", parents=[common], help="check an instance and report its range")
    p_v.add_argument("--export", metavar="JSON", help="write the instance as JSON")
    p_v.add_argument("--D", dest="targets", type=float, nargs="*", help="classify these distortions")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    inst = InstanceSpec(ns.source, ns.instance_path, ns.sigma, ns.b, ns.p, ns.L, ns.K, ns.N, ns.distortion)
    targets = getattr(ns, "targets", None) or ()
    if getattr(ns, "grid", None):
        targets = parse_grid(ns.grid)
    cfg = RunConfig(
        command=ns.command,
        instance=inst,
        targets=tuple(targets),
        algorithm=getattr(ns, "algorithm", "cba"),
        tol=ns.tol,
        max_iterations=ns.max_iterations,
        fmt=ns.fmt,
        out=ns.out,
        units=ns.units,
        trace=getattr(ns, "trace", None),
        trace_stride=getattr(ns, "trace_stride", 1),
        suite=getattr(ns, "suite", None),
        no_ba=getattr(ns, "no_ba", False),
        only=getattr(ns, "only", None),
        jobs=getattr(ns, "jobs", 1),
        export=getattr(ns, "export", None),
    )
    if cfg.trace_stride < 1:
        raise ConfigError("--trace-stride must be at least 1")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    if cfg.command == "bench" and (inst.source or inst.path):
        raise ConfigError("bench builds its own instances; drop --source/--instance")
    return cfg


# ---------------------------------------------------------------- records


def _record(inst, target, rate, distortion, lam, iterations, newton, wall, reason):
    return {
        "source": inst.name, "M": inst.M, "N": inst.N, "target": target, "rate": rate,
        "distortion": distortion, "lambda": lam, "iterations": iterations,
        "newton_steps_total": newton, "wall_time_s": wall, "stop_reason": reason,
    }


def _cba_record(inst, rep):
    return _record(inst, rep.target, rep.rate, rep.distortion, rep.lam, rep.iterations,
                   rep.newton_steps_total, rep.wall_time, rep.stop_reason.value)


def _ba_record(inst, rep):
    return _record(inst, rep.target, rep.rate, rep.distortion, rep.lam, rep.total_inner_iterations,
                   0, rep.wall_time, f"OuterTrials={rep.outer_trials}")


def _to_units(rows: List[dict], units: str, rate_targets: bool = False) -> List[dict]:
    if units == "nats":
        return rows
    ln2 = math.log(2.0)
    converted = []
    for row in rows:
        row = dict(row)
        for key in RATE_COLUMNS:
            if isinstance(row.get(key), float):
                row[key] /= ln2
        if rate_targets or row.get("kind") == "dr":
            row["target"] /= ln2
        converted.append(row)
    return converted


def _fmt_cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else str(v)


def render(rows: Sequence[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        clean = [{c: (None if isinstance(r.get(c), float) and not math.isfinite(r[c]) else r.get(c))
                  for c in columns} for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def write_trace(trace, path: str) -> None:
    arrays = trace.as_arrays()
    rows = [{c: (int(arrays[c][k]) if c in ("n", "newton_steps") else float(arrays[c][k]))
             for c in TRACE_COLUMNS} for k in range(len(trace))]
    emit(render(rows, TRACE_COLUMNS, "csv"), path)


# ---------------------------------------------------------------- commands


def _point_command(cfg: RunConfig) -> List[dict]:
    inst = cfg.instance.build()
    stop = cfg.stop()
    rows = []
    last = None
    for t in cfg.targets:
        if cfg.algorithm == "ba":
            fn = ba_search_rd if cfg.command == "rd" else ba_search_dr
            rows.append(_ba_record(inst, fn(inst, t, BaConfig(inner_stop=stop))))
            continue
        fn = solve_rd if cfg.command == "rd" else solve_dr
        last = fn(inst, t, stop, record_trace=cfg.trace is not None, trace_stride=cfg.trace_stride)
        rows.append(_cba_record(inst, last))
    if cfg.trace is not None and last is not None and last.trace is not None:
        write_trace(last.trace, cfg.trace)
    return _to_units(rows, cfg.units, rate_targets=cfg.command == "dr")


def _sweep_command(cfg: RunConfig) -> List[dict]:
    inst = cfg.instance.build()
    stop = cfg.stop()
    rows = []
    if cfg.algorithm == "cba":
        for pt in sweep_rd_curve(inst, cfg.targets, stop):
            if pt.error is not None:
                rows.append(_record(inst, pt.D, math.nan, math.nan, math.nan, 0, 0, 0.0,
                                    pt.error.split(":")[0]))
            else:
                rows.append(_cba_record(inst, pt.report))
    else:
        bcfg = BaConfig(inner_stop=stop)
        for D in cfg.targets:
            try:
                rows.append(_ba_record(inst, ba_search_rd(inst, D, bcfg)))
            except RateDistortionError as exc:
                rows.append(_record(inst, D, math.nan, math.nan, math.nan, 0, 0, 0.0, type(exc).__name__))
    return _to_units(rows, cfg.units)


def _validate_command(cfg: RunConfig) -> List[dict]:
    inst = cfg.instance.build()
    rng = feasibility_range(inst)
    if cfg.export:
        save_instance(inst, cfg.export)
    row = {"source": inst.name, "M": inst.M, "N": inst.N, "d_min": rng.d_min, "d_max": rng.d_max}
    for t in cfg.targets:
        row[f"class@{t:g}"] = classify_target_distortion(rng, t).value
    return [row]


# ---------------------------------------------------------------- bench


@dataclass(frozen=True)
class BenchPair:
    label: str
    kind: str  # "rd" or "dr"
    target: float
    instance: InstanceSpec


def suite_pairs(suite: str) -> List[BenchPair]:
    if suite == "table1":
        return [BenchPair(s, "rd", D, InstanceSpec(source=s))
                for s in ("gaussian", "laplacian") for D in (0.1, 0.3, 0.5, 0.7, 0.9)]
    if suite == "table2":
        rates = {"gaussian": (0.1, 0.3, 0.5, 0.7, 0.9), "laplacian": (0.1, 0.5, 0.9, 1.3, 1.7)}
        return [BenchPair(s, "dr", R, InstanceSpec(source=s)) for s in rates for R in rates[s]]
    if suite == "table3":
        return [BenchPair(f"uniform-K{K}", "rd", float(D), InstanceSpec(source="uniform", K=K))
                for K in (20, 40, 80, 160) for D in (2, 4, 8, 16)]
    if suite == "bifurcation":
        return [BenchPair("berger", "rd", float(D), InstanceSpec(source="berger"))
                for D in np.linspace(0.0, 0.3, 61)]
    raise ConfigError(f"unknown suite {suite!r}")


def _ba_fields(pair: BenchPair, tol: float, max_iterations: int) -> dict:
    inst = pair.instance.build()
    fn = ba_search_rd if pair.kind == "rd" else ba_search_dr
    t0 = time.perf_counter()
    try:
        brep = fn(inst, pair.target, BaConfig(inner_stop=StopCriterion(tol, max_iterations)))
    except RateDistortionError as exc:
        return {"ba_time": time.perf_counter() - t0, "error": f"ba:{type(exc).__name__}"}
    return {"ba_rate": brep.rate, "ba_distortion": brep.distortion, "ba_outer_trials": brep.outer_trials,
            "ba_last_inner_iters": brep.last_inner_iterations, "ba_time": brep.wall_time}


def run_pair(pair: BenchPair, suite: str, tol: float, with_ba: bool, max_iterations: int = 1_000_000) -> dict:
    inst = pair.instance.build()
    stop = StopCriterion(tol, max_iterations)
    row = {"suite": suite, "source": pair.label, "kind": pair.kind, "target": pair.target}
    errors = []
    try:
        fn = solve_rd if pair.kind == "rd" else solve_dr
        rep = fn(inst, pair.target, stop)
        row.update(cba_rate=rep.rate, cba_distortion=rep.distortion, cba_lambda=rep.lam,
                   cba_iters=rep.iterations, cba_time=rep.wall_time)
    except RateDistortionError as exc:
        errors.append(f"cba:{type(exc).__name__}")
    if with_ba:
        ba = _ba_fields(pair, tol, max_iterations)
        if "error" in ba:
            errors.append(ba.pop("error"))
        row.update(ba)
        if row.get("cba_time") and "ba_rate" in row:
            row["speedup"] = row["ba_time"] / row["cba_time"]
    row["error"] = ";".join(errors) or None
    return row


def _bifurcation_cba(pairs, tol, max_iterations) -> List[dict]:
    """CBA rows for the bifurcation suite come from one warm-started sweep."""
    inst = pairs[0].instance.build()
    pts = sweep_rd_curve(inst, [p.target for p in pairs], StopCriterion(tol, max_iterations))
    rows = []
    for pair, pt in zip(pairs, pts):
        row = {"suite": "bifurcation", "source": pair.label, "kind": "rd", "target": pair.target}
        if pt.error is None:
            row.update(cba_rate=pt.R, cba_distortion=pt.distortion, cba_lambda=pt.lam,
                       cba_iters=pt.iterations, cba_time=pt.report.wall_time)
        else:
            row["error"] = "cba:" + pt.error.split(":")[0]
        rows.append(row)
    return rows


def run_bench(cfg: RunConfig) -> List[dict]:
    pairs = suite_pairs(cfg.suite)
    if cfg.only:
        pairs = [p for p in pairs if cfg.only in p.label]
    if not pairs:
        raise ConfigError(f"--only {cfg.only!r} matches no pair of {cfg.suite}")
    tol = cfg.tol if cfg.tol is not None else SUITE_TOL[cfg.suite]
    if cfg.suite == "bifurcation":
        rows = _bifurcation_cba(pairs, tol, cfg.max_iterations)
        if not cfg.no_ba:
            args = [(p, tol, cfg.max_iterations) for p in pairs]
            for row, ba in zip(rows, _map(_ba_fields, args, cfg.jobs)):
                err = ba.pop("error", None)
                row.update(ba)
                if err:
                    row["error"] = ";".join(filter(None, [row.get("error"), err]))
                elif row.get("cba_time"):
                    row["speedup"] = row["ba_time"] / row["cba_time"]
        return _to_units(rows, cfg.units)
    args = [(p, cfg.suite, tol, not cfg.no_ba, cfg.max_iterations) for p in pairs]
    return _to_units(_map(run_pair, args, cfg.jobs), cfg.units)


def _map(fn, args, jobs):
    if jobs <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *a) for a in args]
        return [f.result() for f in futures]  # suite order, whatever the completion order


# ---------------------------------------------------------------- entry point


def run(cfg: RunConfig) -> int:
    if cfg.command in ("rd", "dr"):
        rows, columns = _point_command(cfg), RECORD_COLUMNS
    elif cfg.command == "sweep":
        rows, columns = _sweep_command(cfg), RECORD_COLUMNS
    elif cfg.command == "bench":
        rows, columns = run_bench(cfg), BENCH_COLUMNS
    elif cfg.command == "validate":
        rows = _validate_command(cfg)
        columns = list(rows[0])
    else:
        raise ConfigError(f"unknown command {cfg.command!r}")
    emit(render(rows, columns, cfg.fmt), cfg.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(config_from_args(ns))
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 2
    except RateDistortionError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
