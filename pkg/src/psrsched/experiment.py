"""Glue between scenarios, solvers and the simulator: choose a policy for a
configuration, run seeded cells, and aggregate metrics over seeds."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .link import classify_windowed
from .objective import FavorabilityMatrix, InvalidInputError
from .scenario import Scenario
from .sim import ScenarioConfig, SchedulePolicy, SimReport, run_simulation
from .solvers import ScheduleSolution, brute_force_schedule, greedy_schedule

log = logging.getLogger(__name__)

POLICIES = ("baseline", "greedy", "brute")
SUMMARY_METRICS = ("delay_quantile_ms", "loss_ratio", "avg_throughput_mbps", "jain_index", "rta_packets")


def favorability_for(cfg: ScenarioConfig) -> FavorabilityMatrix:
    """Favorability the non-RTA AP would hold once its window is full."""
    if cfg.favorability is not None:
        return FavorabilityMatrix.from_array(cfg.measurement_round().astype(np.int8))
    return classify_windowed(cfg.deployment, cfg.link)


def solve(cfg: ScenarioConfig, solver: str) -> ScheduleSolution:
    fav = favorability_for(cfg)
    if solver == "greedy":
        return greedy_schedule(fav)
    if solver == "brute":
        return brute_force_schedule(fav)
    raise InvalidInputError(f"unknown solver {solver!r}")


def policy_for(name: str, cfg: ScenarioConfig) -> tuple[SchedulePolicy, ScheduleSolution | None]:
    if name == "baseline":
        return SchedulePolicy.baseline(), None
    if name not in POLICIES:
        raise InvalidInputError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}")
    sol = solve(cfg, name)
    return SchedulePolicy.fixed(sol.order, name), sol


@dataclass(frozen=True, order=True)
class Cell:
    t_rta_ms: float
    placement: int
    policy: str


def per_seed_metrics(report: SimReport) -> dict[str, float]:
    out = report.metrics()
    for i, tp in enumerate(report.throughput_mbps):
        out[f"throughput_mbps.sta{i}"] = float(tp)
    return out


def summarize(rows: list[dict[str, float]]) -> dict[str, dict[str, float]]:
    """Mean and extremes of every metric over seeds; NaN (undefined) values stay NaN."""
    out = {}
    for key in rows[0]:
        vals = np.array([r[key] for r in rows], dtype=float)
        if np.isnan(vals).all():
            out[key] = {"mean": math.nan, "min": math.nan, "max": math.nan}
        else:
            out[key] = {"mean": float(np.mean(vals)), "min": float(np.min(vals)), "max": float(np.max(vals))}
    return out


def run_cell(scenario: Scenario, cell: Cell, seeds: int) -> tuple[Cell, list[SimReport]]:
    cfg = scenario.config(cell.placement, t_rta_ms=cell.t_rta_ms)
    policy, _ = policy_for(cell.policy, cfg)
    reports = [run_simulation(cfg, policy, scenario.sim_seed(cell.placement, k)) for k in range(seeds)]
    log.debug("cell %s done", cell)
    return cell, reports


def _run_cell_star(args):
    return run_cell(*args)


def sweep(scenario: Scenario, t_rta_values, placements: int, policies, seeds: int = 1,
          jobs: int = 1, results: dict | None = None) -> dict[Cell, list[SimReport]]:
    """Run the cross product of T_RTA values, placements and policies.

    Results land in ``results`` (created if absent) as cells finish, so a
    caller interrupted midway still holds every completed cell.
    """
    results = {} if results is None else results
    for p in policies:
        if p not in POLICIES:
            raise InvalidInputError(f"unknown policy {p!r}; choose from {', '.join(POLICIES)}")
    if placements > 1 and not scenario.randomized:
        log.warning("scenario has fixed positions; all %d placements are identical", placements)
    cells = [Cell(float(t), k, p) for t in t_rta_values for k in range(placements) for p in policies]
    if jobs <= 1:
        for c in cells:
            results[c] = run_cell(scenario, c, seeds)[1]
        return results
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for c, reps in pool.map(_run_cell_star, [(scenario, c, seeds) for c in cells]):
            results[c] = reps
    return results


def compare_policies(scenario: Scenario, t_rta_ms: float, placements: int,
                     policies=POLICIES, seeds: int = 1, jobs: int = 1) -> dict[str, dict[str, float]]:
    """Per policy, the mean over placements of each seed-averaged metric."""
    res = sweep(scenario, [t_rta_ms], placements, policies, seeds, jobs)
    out = {}
    for p in policies:
        per_placement = [summarize([per_seed_metrics(r) for r in res[Cell(float(t_rta_ms), k, p)]])
                         for k in range(placements)]
        out[p] = {m: float(np.mean([pp[m]["mean"] for pp in per_placement])) for m in SUMMARY_METRICS}
    return out
