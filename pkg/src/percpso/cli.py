"""Command line entry point: ``percpso <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import shlex
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bench import BenchmarkId
from . import bench, experiments, geom, metrics, swarm

_ALIASES = {
    "w": "inertia",
    "c1": "personal_coeff",
    "c2": "social_coeff",
    "R": "radius",
    "vmax": "v_max",
    "P": "population",
    "S": "board_side",
    "fn": "benchmark",
}


class CliError(Exception):
    pass


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in fields(swarm.SwarmConfig)}[name]
    kind = str(kind)
    if kind == "bool":
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {text!r}")
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "VelocityInit":
        return swarm.VelocityInit(text.lower())
    if kind == "BenchmarkId":
        return BenchmarkId.parse(text)
    return text


def load_overrides(path) -> dict:
    """Read ``key = value`` lines (``#`` starts a comment) into config fields."""
    valid = [f.name for f in fields(swarm.SwarmConfig)]
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        name = _ALIASES.get(key, key)
        if name not in valid:
            keys = ", ".join(sorted(valid + list(_ALIASES)))
            raise CliError(f"{path}:{lineno}: unknown key {key!r}; valid keys: {keys}")
        try:
            out[name] = _coerce(name, value)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return out


def _header(subcommand: str, argv: Sequence[str], resolved: dict) -> str:
    flags = " ".join(f"{k}={_flat(v)}" for k, v in resolved.items())
    return f"# percpso {__version__} | {subcommand} | argv: {shlex.join(argv)} | resolved: {flags}"


def _flat(v) -> str:
    if isinstance(v, (bool, int, float, np.floating)) and not isinstance(v, str):
        return experiments.fmt(v)
    if hasattr(v, "value"):
        return str(v.value)
    if isinstance(v, (tuple, list)):
        return ",".join(_flat(x) for x in v)
    return str(v)


def _fn(text: str) -> BenchmarkId:
    try:
        return BenchmarkId.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="percpso", description="PSO with radius-limited neighbourhoods.")
    p.add_argument("--version", action="version", version=f"percpso {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="{bench,run,sweep,percolation,stats}")

    b = sub.add_parser("bench", help="benchmark functions")
    bsub = b.add_subparsers(dest="action", required=True)
    be = bsub.add_parser("eval", help="evaluate one benchmark at a point")
    be.add_argument("--fn", type=_fn, required=True, help="f0, f1, f2, f3 or f6")
    be.add_argument("--x", type=float, required=True, help="first coordinate")
    be.add_argument("--y", type=float, required=True, help="second coordinate")
    be.add_argument("--degrees", action="store_true", help="read trig arguments in degrees")

    r = sub.add_parser("run", help="one swarm run, printed as a CSV row")
    r.add_argument("--fn", type=_fn, required=True, help="benchmark id")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--radius", type=float, help="neighbourhood radius R")
    g.add_argument("--degree", type=float, help="expected initial degree a; R follows from the board")
    r.add_argument("--seed", type=int, required=True, help="random seed")
    r.add_argument("--trelea", action="store_true", help="use w=0.6, c1=c2=0.7 instead of the Clerc set")
    r.add_argument("--velocity-init", choices=["zero", "uniform"], default=None, help="initial velocities")
    r.add_argument("--per-function-domain", action="store_true", help="use the function's own board and goal")
    r.add_argument("--radians", action="store_true", help="read trig arguments in radians")
    r.add_argument("--include-self", action="store_true", help="count a particle as its own neighbour")
    r.add_argument("--config", type=Path, help="file of 'key = value' overrides")

    s = sub.add_parser("sweep", help="run a full experiment and write CSV files")
    s.add_argument("--dataset", choices=sorted(experiments.DATASETS), required=True, help="which sweep")
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--out", type=Path, required=True, help="output directory")
    s.add_argument("--runs", type=int, help="override runs per cell")
    s.add_argument("--workers", type=_non_negative_int, help=f"worker processes (default ${experiments.THREADS_ENV} or all cores)")
    s.add_argument("--config", type=Path, help="file of 'key = value' overrides")

    pc = sub.add_parser("percolation", help="disk percolation tools")
    psub = pc.add_subparsers(dest="action", required=True)
    pe = psub.add_parser("estimate", help="Monte Carlo estimate of the critical expected degree")
    pe.add_argument("--nodes", type=int, default=2000, help="points per graph")
    pe.add_argument("--side", type=float, default=200.0, help="board side")
    pe.add_argument("--a-min", type=float, default=3.0, help="first expected degree")
    pe.add_argument("--a-max", type=float, default=6.0, help="last expected degree")
    pe.add_argument("--a-step", type=float, default=0.1, help="grid step")
    pe.add_argument("--trials", type=int, default=50, help="graphs per grid point")
    pe.add_argument("--seed", type=int, default=0, help="random seed")

    st = sub.add_parser("stats", help="statistics over CSV files")
    ssub = st.add_subparsers(dest="action", required=True)
    sc = ssub.add_parser("correlate", help="Pearson correlation matrix of CSV columns")
    sc.add_argument("--input", type=Path, required=True, help="CSV file ('#' lines are skipped)")
    sc.add_argument("--columns", required=True, help="comma separated column names")
    return p


def _cmd_bench(args, argv) -> str:
    v = bench.eval(args.fn, (args.x, args.y), degrees=args.degrees)
    return f"{v:.16g}\n"


def _cmd_run(args, argv) -> str:
    spec = bench.default_spec(args.fn, bench.Study.PER_FUNCTION if args.per_function_domain else bench.Study.UNIFORM)
    preset = swarm.ParameterSet.TRELEA if args.trelea else swarm.ParameterSet.CLERC
    kw = dict(benchmark=args.fn, board_side=spec.side, v_max=spec.half_side, goal=spec.goal)
    if args.velocity_init:
        kw["velocity_init"] = args.velocity_init
    if args.radians:
        kw["trig_degrees"] = False
    if args.include_self:
        kw["include_self_in_neighborhood"] = True
    if args.config:
        kw.update(load_overrides(args.config))
    cfg = swarm.SwarmConfig.preset(preset, **kw)
    board = geom.BoardSpec(cfg.board_side, cfg.population)
    if args.degree is not None:
        a, radius = args.degree, geom.radius_from_degree(args.degree, board)
    else:
        a, radius = geom.degree_from_radius(args.radius, board), args.radius
    cfg = cfg.with_(radius=radius)
    res = swarm.run(cfg, args.seed)
    head = _header("run", argv, asdict(cfg) | {"seed": args.seed})
    row = [cfg.benchmark.value, experiments.fmt(radius), experiments.fmt(a), str(args.seed)] + [
        experiments.fmt(getattr(res, k))
        for k in ("success", "steps", "best_global_val", "mean_social_best", "mean_personal_best")
    ]
    cols = "fn,R,a,seed,success,steps,best_global_val,mean_social_best,mean_personal_best"
    return f"{head}\n{cols}\n{','.join(row)}\n"


def _cmd_sweep(args, argv) -> str:
    spec = experiments.DATASETS[args.dataset](args.seed)
    changes = {}
    if args.runs is not None:
        if args.runs < 1:
            raise CliError(f"--runs must be at least 1, got {args.runs}")
        changes["runs_per_cell"] = args.runs
    if args.config:
        changes["overrides"] = load_overrides(args.config)
    if changes:
        spec = spec.with_(**changes)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        probe = args.out / ".percpso-write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"cannot write to output directory {str(args.out)!r}: {exc.strerror}") from None
    result = experiments.run_sweep(spec, workers=args.workers)
    resolved = {
        "dataset": spec.name, "master_seed": spec.master_seed, "grid_kind": spec.grid_kind,
        "grid": spec.grid, "functions": spec.functions, "runs_per_cell": spec.runs_per_cell,
        "parameter_set": spec.parameter_set, "domain_mode": spec.domain_mode,
        "population": spec.population, "max_steps": spec.max_steps,
    }
    resolved.update({f"override.{k}": v for k, v in spec.overrides.items()})
    head = _header("sweep", argv, resolved)
    written = experiments.write_outputs(result, args.out, head)
    total = result.total()
    return (
        f"{len(result.records)} runs, goals {total.goal_percent:.2f}%\n"
        + "".join(f"wrote {p}\n" for p in written)
    )


def _cmd_percolation(args, argv) -> str:
    if args.a_step <= 0:
        raise CliError("--a-step must be positive")
    n = int(round((args.a_max - args.a_min) / args.a_step)) + 1
    grid = [round(args.a_min + k * args.a_step, 10) for k in range(n)]
    est = geom.estimate_percolation_threshold(
        args.nodes, args.side, grid, args.trials, np.random.default_rng(args.seed)
    )
    head = _header("percolation estimate", argv, {
        "nodes": args.nodes, "side": args.side, "a_min": args.a_min, "a_max": args.a_max,
        "a_step": args.a_step, "trials": args.trials, "seed": args.seed,
    })
    rows = [head, "a,R,mean_giant_fraction,stderr"]
    rows += [",".join(experiments.fmt(v) for v in (g.a, g.radius, g.mean_giant_fraction, g.stderr)) for g in est.grid]
    rows.append(",".join(["threshold_estimate"] + [experiments.fmt(v) for v in (est.threshold, est.ci_low, est.ci_high)]))
    return "\n".join(rows) + "\n"


def _read_columns(path: Path, names: list[str]) -> dict[str, list[float]]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        missing = [n for n in names if n not in (reader.fieldnames or [])]
        if missing:
            raise CliError(f"column(s) not in {path}: {', '.join(missing)}")
        data: dict[str, list[float]] = {n: [] for n in names}
        for lineno, row in enumerate(reader, start=2):
            if any(row[n] == "" for n in names):
                continue
            for n in names:
                try:
                    data[n].append(float(row[n]))
                except ValueError:
                    raise CliError(f"{path}: row {lineno}: column {n!r} is not numeric: {row[n]!r}") from None
    return data


def _cmd_stats(args, argv) -> str:
    names = [c.strip() for c in args.columns.split(",") if c.strip()]
    if not names:
        raise CliError("--columns is empty")
    try:
        data = _read_columns(args.input, names)
    except OSError as exc:
        raise CliError(f"cannot read {str(args.input)!r}: {exc.strerror}") from None
    labels, m = metrics.correlation_matrix(data)
    head = _header("stats correlate", argv, {"input": args.input, "columns": names})
    lines = [head, ",".join([""] + labels)]
    lines += [",".join([labels[i]] + [experiments.fmt(float(x)) for x in m[i]]) for i in range(len(labels))]
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "bench": _cmd_bench,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "percolation": _cmd_percolation,
    "stats": _cmd_stats,
}


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        sys.stdout.write(_COMMANDS[args.command](args, argv))
    except (CliError, ValueError, OSError) as exc:
        print(f"percpso {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
