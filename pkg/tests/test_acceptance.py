"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the terminal
summary) before asserting, so the full list is visible even with failures.
"""

import os
import subprocess
import sys
import time

import numpy as np

from psrsched.cli import main
from psrsched.experiment import compare_policies
from psrsched.objective import circular_zero_runs, lexicographically_less, max_circular_zero_run
from psrsched.scenario import load_scenario
from psrsched.solvers import brute_force_schedule, greedy_schedule

from conftest import ACCEPTANCE_LINES, nontrivial_matrix
from oracles import brute_naive

JOBS = max(1, min(8, os.cpu_count() or 1))
PLACEMENTS = 20


def report(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {k:>2}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def string_oracle(row):
    s = "".join(map(str, row))
    if "1" not in s:
        return len(s)
    return max(len(run) for run in (s + s).split("1"))


_cache = {}


def policy_results(name, t_rta):
    key = (name, t_rta)
    if key not in _cache:
        sc = load_scenario(name)
        t0 = time.perf_counter()
        res = compare_policies(sc, t_rta, PLACEMENTS, jobs=JOBS)
        _cache[key] = (res, time.perf_counter() - t0)
    return _cache[key]


def test_c01_objective_exactness():
    rng = np.random.default_rng(1)
    assert max_circular_zero_run((0, 1, 0, 1, 0, 0)) == 3
    lengths = rng.integers(1, 33, size=100_000)
    rows_by_n = {n: rng.integers(0, 2, size=(int((lengths == n).sum()), n)) for n in range(1, 33)}
    t0 = time.perf_counter()
    got = {n: circular_zero_runs(r) for n, r in rows_by_n.items() if len(r)}
    elapsed = time.perf_counter() - t0
    mismatches = sum(int(z) != string_oracle(row) for n, r in rows_by_n.items() if len(r)
                     for row, z in zip(r.tolist(), got[n]))
    ok = max_circular_zero_run((0, 1, 0, 1, 0, 0)) == 3 and mismatches == 0 and elapsed < 1.0
    report(1, ok, f"Z(0,1,0,1,0,0)=3, 100000 rows N<=32, {mismatches} mismatches, {elapsed:.3f}s (< 1 s)")


def test_c02_brute_force_oracle():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(500):
        m, n = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        a = rng.integers(0, 2, size=(m, n))
        mismatches += brute_force_schedule(a).objective != brute_naive(a.tolist())
    elapsed = time.perf_counter() - t0
    report(2, mismatches == 0 and elapsed < 30,
           f"500 instances N<=6 M<=5, {mismatches} mismatches vs N! enumeration, {elapsed:.1f}s (< 30 s)")


def test_c03_greedy_soundness_and_quality():
    rng = np.random.default_rng(3)
    below = equal_full = equal_lead = 0
    for k in range(1000):
        a = nontrivial_matrix(rng, 2 if k % 2 == 0 else 4, 8)
        g, b = greedy_schedule(a).objective, brute_force_schedule(a).objective
        below += lexicographically_less(g, b)
        equal_full += g == b
        equal_lead += g[0] == b[0]
    report(3, below == 0,
           f"1000 instances N=8 M in {{2,4}}: greedy below brute {below} times; "
           f"leading-element equality {equal_lead / 1000:.3f}, full-objective equality {equal_full / 1000:.3f}")


def test_c04_greedy_vs_brute_downstream():
    res, _ = policy_results("two_apartments_m2", 20.0)
    g, b = res["greedy"]["delay_quantile_ms"], res["brute"]["delay_quantile_ms"]
    packets = res["greedy"]["rta_packets"] * PLACEMENTS
    ratio = g / b
    report(4, abs(ratio - 1) <= 0.05 and packets >= 1e5,
           f"M=2 T_RTA=20ms {PLACEMENTS} placements, {packets:.0f} RTA packets per policy: "
           f"greedy {g:.2f} ms vs brute {b:.2f} ms, ratio {ratio:.3f} (within 5%)")


def test_c05_delay_gain_m2():
    parts, ok, total = [], True, 0.0
    for t in (20.0, 25.0, 30.0):
        res, dt = policy_results("two_apartments_m2", t)
        total += dt
        ratio = res["greedy"]["delay_quantile_ms"] / res["baseline"]["delay_quantile_ms"]
        ok &= ratio <= 0.7
        parts.append(f"T={t:.0f}: {ratio:.3f}")
    report(5, ok and total < 300,
           f"M=2 greedy/baseline 0.999-quantile ratio {', '.join(parts)} (<= 0.7), {total:.0f}s (< 300 s)")


def test_c06_delay_gain_m4():
    res, _ = policy_results("two_apartments_m4", 20.0)
    g, base = res["greedy"]["delay_quantile_ms"], res["baseline"]["delay_quantile_ms"]
    report(6, g / base <= 0.75, f"M=4 T_RTA=20ms greedy {g:.2f} ms vs baseline {base:.2f} ms, "
                                f"ratio {g / base:.3f} (<= 0.75)")


def test_c07_loss_ratio_gain():
    parts, ok = [], True
    for name in ("two_apartments_m2", "two_apartments_m4"):
        res, _ = policy_results(name, 20.0)
        g, base = res["greedy"]["loss_ratio"], res["baseline"]["loss_ratio"]
        applies = base >= 1e-3
        ok &= (not applies) or g <= 0.1 * base
        parts.append(f"{name[-2:]}: baseline {base:.2e} greedy {g:.2e}" + ("" if applies else " (n/a)"))
    report(7, ok, f"loss ratio at 20 ms bound, {'; '.join(parts)} (greedy <= 0.1 x baseline)")


def test_c08_nonrta_neutrality():
    parts, ok = [], True
    for name in ("two_apartments_m2", "two_apartments_m4"):
        res, _ = policy_results(name, 20.0)
        base = res["baseline"]["avg_throughput_mbps"]
        for p in ("greedy", "brute"):
            diff = abs(res[p]["avg_throughput_mbps"] / base - 1)
            ok &= diff <= 0.05
        jmin = min(r["jain_index"] for r in res.values())
        ok &= jmin >= 0.95
        worst = max(abs(res[p]["avg_throughput_mbps"] / base - 1) for p in ("greedy", "brute"))
        parts.append(f"{name[-2:]}: max throughput diff {worst * 100:.2f}%, min Jain {jmin:.4f}")
    report(8, ok, f"{'; '.join(parts)} (<= 5%, Jain >= 0.95)")


def test_c09_cli_determinism(capsys):
    args = ["simulate", "two_apartments_m2", "--seeds", "3", "--duration", "20"]
    main(args)
    a = capsys.readouterr().out
    res = subprocess.run([sys.executable, "-m", "psrsched", *args], capture_output=True)
    b = res.stdout.decode()
    report(9, a == b and res.returncode == 0 and len(a) > 0,
           f"two simulate runs (in-process and subprocess) byte-identical: {a == b} ({len(a)} bytes)")


def test_c10_performance():
    rng = np.random.default_rng(10)
    big = nontrivial_matrix(rng, 16, 32)
    greedy_schedule(big)
    times = []
    for _ in range(20):
        t0 = time.perf_counter()
        greedy_schedule(nontrivial_matrix(rng, 16, 32))
        times.append(time.perf_counter() - t0)
    g = float(np.median(times))
    small = nontrivial_matrix(rng, 4, 8)
    t0 = time.perf_counter()
    brute_force_schedule(small)
    b = time.perf_counter() - t0
    report(10, g < 0.010 and b < 5.0,
           f"greedy N=32 M=16 median {g * 1e3:.2f} ms (< 10 ms, max {max(times) * 1e3:.2f} ms); "
           f"brute N=8 M=4 {b:.3f} s (< 5 s)")
