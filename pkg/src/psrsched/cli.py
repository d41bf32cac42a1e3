"""Command-line front end.

Subcommands: solve, classify, simulate, sweep, bench.  Scenario arguments are
paths, names under ``$PSRSCHED_CONFIG_DIR``, or names of bundled scenarios.
Command-line flags override values in the scenario file, which override the
built-in defaults.

Exit codes: 0 success, 2 invalid input or configuration, 3 capacity
exceeded, 4 runtime failure, 130 interrupted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiment import POLICIES, Cell, favorability_for, per_seed_metrics, policy_for, summarize, sweep
from .link import ConfigurationError, sinr_table
from .objective import InvalidInputError, circular_zero_runs
from .scenario import BENCH_STREAM, derive_seed, load_scenario
from .sim import SimReport, run_simulation
from .solvers import BRUTE_FORCE_MAX_N, CapacityError, brute_force_schedule, evaluate_gap, greedy_schedule

log = logging.getLogger("psrsched")

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY, EXIT_RUNTIME, EXIT_INTERRUPT = 0, 2, 3, 4, 130

SIM_FIELDS = ["root_seed", "scenario", "t_rta_ms", "placement", "policy", "seed", "metric", "stat", "value"]


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def _csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r[k]) for k in fields})
    return buf.getvalue()


def _json(obj) -> str:
    def clean(x):
        if isinstance(x, float) and not math.isfinite(x):
            return None
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x
    return json.dumps(clean(obj), indent=2, sort_keys=True) + "\n"


def _emit(args, text: str, stem: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{stem}.{args.format}"
        path.write_text(text, encoding="utf-8", newline="")
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _overrides(args) -> dict:
    ov = {}
    for item in getattr(args, "set", None) or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InvalidInputError(f"--set expects KEY=VALUE, got {item!r}")
        ov[key.strip()] = _parse_value(val)
    simple = {
        "duration": "simulation.duration_s",
        "sinr_th": "radio.sinr_threshold_db",
        "window": "radio.window",
        "t_rta": "traffic.t_rta_ms",
        "seeds": "simulation.seeds",
        "placements": "simulation.placements",
        "root_seed": "seed",
    }
    for attr, path in simple.items():
        v = getattr(args, attr, None)
        if v is not None:
            ov[path] = v
    return ov


def _scenario(args):
    sc = load_scenario(args.scenario, _overrides(args))
    log.info("scenario %s, root seed %d", sc.name, sc.root_seed)
    return sc


# ---------------------------------------------------------------- solve

def cmd_solve(args) -> int:
    sc = _scenario(args)
    cfg = sc.config(args.placement)
    fav = favorability_for(cfg)
    arr = fav.to_array()
    if fav.n_rta == 0:
        log.warning("no RTA stations: every order is equivalent and the objective is empty")
    solvers = ("greedy", "brute") if args.solver == "both" else (args.solver,)
    results = {}
    for name in solvers:
        fn = greedy_schedule if name == "greedy" else brute_force_schedule
        results[name] = fn(fav) if name == "greedy" else fn(fav, max_n=args.max_n)
    doc = {"root_seed": sc.root_seed, "scenario": sc.name, "placement": args.placement,
           "matrix": arr.tolist(), "solutions": {}}
    for name, sol in results.items():
        z = circular_zero_runs(arr[:, list(sol.order)]).tolist() if arr.shape[0] else []
        doc["solutions"][name] = {"order": list(sol.order), "objective": list(sol.objective),
                                  "row_zero_runs": z, "elapsed_s": sol.elapsed}
    if len(results) == 2:
        g, b = results["greedy"].objective, results["brute"].objective
        doc["gap"] = {"equal": g == b, "leading_gap": (g[0] - b[0]) if b else 0}
    if args.format == "json":
        _emit(args, _json(doc), "solve")
        return EXIT_OK
    lines = [f"# root_seed {sc.root_seed}  scenario {sc.name}  placement {args.placement}"]
    for name, s in doc["solutions"].items():
        lines += [f"{name}:",
                  f"  order      {' '.join(map(str, s['order']))}",
                  f"  objective  ({', '.join(map(str, s['objective']))})",
                  f"  row Z      {' '.join(map(str, s['row_zero_runs']))}",
                  f"  elapsed    {s['elapsed_s'] * 1e3:.3f} ms"]
    if "gap" in doc:
        lines.append(f"gap: equal={doc['gap']['equal']} leading={doc['gap']['leading_gap']}")
    args.format = "txt"
    _emit(args, "\n".join(lines) + "\n", "solve")
    return EXIT_OK


# ---------------------------------------------------------------- classify

def cmd_classify(args) -> int:
    sc = _scenario(args)
    if not sc.is_geometric:
        raise InvalidInputError("classify needs a geometric scenario, not an explicit favorability matrix")
    cfg = sc.config(args.placement)
    sinr = sinr_table(cfg.deployment, cfg.link)
    fav = favorability_for(cfg).to_array()
    rows = [{"root_seed": sc.root_seed, "rta_sta": j, "nonrta_sta": i, "sinr_db": float(sinr[j, i]),
             "favorable": int(fav[j, i])}
            for j in range(sinr.shape[0]) for i in range(sinr.shape[1])]
    if args.format == "json":
        doc = {"root_seed": sc.root_seed, "scenario": sc.name, "placement": args.placement,
               "sinr_threshold_db": cfg.link.sinr_threshold_db, "window": cfg.link.window,
               "sinr_db": sinr.tolist(), "favorability": fav.tolist()}
        _emit(args, _json(doc), "classify")
    else:
        _emit(args, _csv(rows, ["root_seed", "rta_sta", "nonrta_sta", "sinr_db", "favorable"]), "classify")
    return EXIT_OK


# ---------------------------------------------------------------- simulate / sweep

def _metric_rows(sc, cell: Cell, seed, metrics: dict, stat: str) -> list[dict]:
    return [{"root_seed": sc.root_seed, "scenario": sc.name, "t_rta_ms": cell.t_rta_ms,
             "placement": cell.placement, "policy": cell.policy, "seed": seed, "metric": k,
             "stat": stat, "value": float(v)} for k, v in metrics.items()]


def _aggregate_rows(sc, cell: Cell, reports: list[SimReport]) -> list[dict]:
    rows = []
    summary = summarize([per_seed_metrics(r) for r in reports])
    for metric, stats in summary.items():
        for stat in ("mean", "min", "max"):
            rows += _metric_rows(sc, cell, "all", {metric: stats[stat]}, stat)
    return rows


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    cfg = sc.config(args.placement)
    policy, sol = policy_for(args.policy, cfg)
    cell = Cell(float(cfg.t_rta_ms), args.placement, args.policy)
    seeds = sc.seeds
    reports = [run_simulation(cfg, policy, sc.sim_seed(args.placement, k)) for k in range(seeds)]
    if cfg.n_rta == 0:
        log.warning("no RTA stations: RTA metrics are empty")
    if args.format == "json":
        doc = {"root_seed": sc.root_seed, "scenario": sc.name, "placement": args.placement,
               "policy": args.policy, "order": list(sol.order) if sol else None,
               "config": cfg.to_dict(),
               "runs": [{"seed_index": k, "report": r.to_dict(), "metrics": per_seed_metrics(r)}
                        for k, r in enumerate(reports)],
               "aggregate": summarize([per_seed_metrics(r) for r in reports])}
        _emit(args, _json(doc), "simulate")
        return EXIT_OK
    rows = []
    for k, r in enumerate(reports):
        rows += _metric_rows(sc, cell, k, per_seed_metrics(r), "value")
    rows += _aggregate_rows(sc, cell, reports)
    _emit(args, _csv(rows, SIM_FIELDS), "simulate")
    return EXIT_OK


def cmd_sweep(args) -> int:
    sc = _scenario(args)
    trta = args.trta or [sc.base.t_rta_ms]
    policies = args.policies or list(POLICIES)
    results: dict = {}
    code = EXIT_OK
    try:
        sweep(sc, trta, sc.placements, policies, sc.seeds, args.jobs, results)
    except KeyboardInterrupt:
        log.error("interrupted; writing %d completed cells", len(results))
        code = EXIT_INTERRUPT
    rows = []
    for cell in sorted(results):
        rows += _aggregate_rows(sc, cell, results[cell])
    if args.format == "json":
        doc = {"root_seed": sc.root_seed, "scenario": sc.name, "seeds": sc.seeds, "rows": rows}
        _emit(args, _json(doc), "sweep")
    else:
        _emit(args, _csv(rows, SIM_FIELDS), "sweep")
    return code


# ---------------------------------------------------------------- bench

def random_instance(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random binary ``m x n`` matrix whose rows each hold at least one 0 and one 1."""
    if n < 2:
        raise InvalidInputError("rows with both a 0 and a 1 need n >= 2")
    a = rng.integers(0, 2, size=(m, n))
    for r in range(m):
        while a[r].all() or not a[r].any():
            a[r] = rng.integers(0, 2, size=n)
    return a


def _int_range(text: str) -> list[int]:
    """``8``, ``4-10`` or ``4,6,8``."""
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out += list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
    return out


def cmd_bench(args) -> int:
    ns, ms = _int_range(args.n), _int_range(args.m)
    rows = []
    warned = False
    for n in ns:
        for m in ms:
            rng = np.random.default_rng(derive_seed(args.seed, BENCH_STREAM, n, m))
            with_brute = n <= args.max_n
            if not with_brute and not warned:
                log.warning("n=%d exceeds the brute-force cap %d; brute columns omitted", n, args.max_n)
                warned = True
            t_g = t_b = 0.0
            equal = 0
            gaps: dict[int, int] = {}
            for _ in range(args.instances):
                a = random_instance(m, n, rng)
                if with_brute:
                    rep = evaluate_gap(a, max_n=args.max_n)
                    t_g += rep.greedy.elapsed
                    t_b += rep.brute.elapsed
                    equal += rep.equal
                    gaps[rep.leading_gap] = gaps.get(rep.leading_gap, 0) + 1
                else:
                    t_g += greedy_schedule(a).elapsed
            base = {"root_seed": args.seed, "n": n, "m": m, "instances": args.instances}
            stats = {"greedy_mean_ms": t_g / args.instances * 1e3}
            if with_brute:
                stats["brute_mean_ms"] = t_b / args.instances * 1e3
                stats["equality_rate"] = equal / args.instances
                for g in sorted(gaps):
                    stats[f"leading_gap.{g}"] = gaps[g]
            rows += [{**base, "metric": k, "value": v} for k, v in stats.items()]
    if args.no_timing:
        rows = [r for r in rows if not r["metric"].endswith("_ms")]
    if args.format == "json":
        _emit(args, _json({"root_seed": args.seed, "rows": rows}), "bench")
    else:
        _emit(args, _csv(rows, ["root_seed", "n", "m", "instances", "metric", "value"]), "bench")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psrsched", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    g = p.add_mutually_exclusive_group()
    g.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    g.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, help_, formats=("csv", "json"), default=None):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scenario", help="scenario file, or name in $PSRSCHED_CONFIG_DIR / bundled")
        sp.add_argument("--format", choices=formats, default=default or formats[0])
        sp.add_argument("--out", help="write into this directory instead of stdout")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a scenario value by dotted path, e.g. radio.wall_loss_db=6")
        sp.add_argument("--root-seed", dest="root_seed", type=int, help="override the scenario root seed")
        return sp

    sp = scenario_cmd("solve", "order non-RTA stations for one placement", ("text", "json"))
    sp.add_argument("--solver", choices=("greedy", "brute", "both"), default="greedy")
    sp.add_argument("--placement", type=int, default=0)
    sp.add_argument("--max-n", type=int, default=BRUTE_FORCE_MAX_N, help="brute-force capacity cap")
    sp.set_defaults(func=cmd_solve)

    sp = scenario_cmd("classify", "expected PSR SINR and favorability per station pair")
    sp.add_argument("--placement", type=int, default=0)
    sp.add_argument("--window", type=int, help="measurement window depth")
    sp.add_argument("--sinr-th", dest="sinr_th", type=float, help="favorability threshold, dB")
    sp.set_defaults(func=cmd_classify)

    sp = scenario_cmd("simulate", "seeded simulations of one placement under one policy")
    sp.add_argument("--policy", choices=POLICIES, default="greedy")
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--placement", type=int, default=0)
    sp.add_argument("--t-rta", dest="t_rta", type=float, help="RTA packet period, ms")
    sp.add_argument("--duration", type=float, help="simulated seconds per run")
    sp.set_defaults(func=cmd_simulate)

    sp = scenario_cmd("sweep", "T_RTA x placements x policies, long-format output")
    sp.add_argument("--trta", type=float, nargs="+", help="RTA packet periods, ms")
    sp.add_argument("--placements", type=int)
    sp.add_argument("--policies", nargs="+", choices=POLICIES)
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--duration", type=float, help="simulated seconds per run")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("bench", help="greedy vs brute force on random instances")
    sp.add_argument("--n", default="4-8", help="non-RTA counts: 8, 4-10 or 4,6,8")
    sp.add_argument("--m", default="2,4", help="RTA counts, same syntax")
    sp.add_argument("--instances", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0, help="root seed")
    sp.add_argument("--max-n", type=int, default=BRUTE_FORCE_MAX_N)
    sp.add_argument("--no-timing", action="store_true", help="drop timing rows (byte-stable output)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.ERROR if args.quiet else logging.DEBUG if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except CapacityError as e:
        log.error("%s", e)
        return EXIT_CAPACITY
    except (InvalidInputError, ConfigurationError) as e:
        log.error("%s", e)
        return EXIT_INVALID
    except KeyboardInterrupt:
        log.error("interrupted")
        return EXIT_INTERRUPT
    except (RuntimeError, OSError) as e:
        log.error("%s", e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
