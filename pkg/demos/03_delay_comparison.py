"""Baseline versus PSR-aware ordering in the two-apartment simulation.

A reduced version of the acceptance runs: a few placements and a shorter
simulated time, so it finishes in well under a minute.

Run: python3 demos/03_delay_comparison.py
"""

from psrsched import load_scenario
from psrsched.experiment import compare_policies

sc = load_scenario("two_apartments_m2", {"simulation.duration_s": 40})

print(f"{'T_RTA':>6} {'policy':>9} {'q0.999 ms':>10} {'loss':>9} {'Mb/s':>7} {'Jain':>7}")
for t_rta in (10, 20, 30):
    res = compare_policies(sc, t_rta, placements=4)
    for policy, m in res.items():
        print(f"{t_rta:>6} {policy:>9} {m['delay_quantile_ms']:>10.2f} {m['loss_ratio']:>9.2e} "
              f"{m['avg_throughput_mbps']:>7.2f} {m['jain_index']:>7.4f}")

# Ordering stations so that favorable ones are spread around the cycle keeps
# every RTA station's longest wait short; the baseline's random order
# sometimes lines up several unfavorable stations back to back.
