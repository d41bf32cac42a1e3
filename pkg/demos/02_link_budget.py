"""From geometry to favorability: which non-RTA stations leave room for PSR.

Run: python3 demos/02_link_budget.py
"""

import numpy as np

from psrsched import LinkBudgetConfig, load_scenario
from psrsched.link import classify_windowed, sinr_table

sc = load_scenario("two_apartments_m2")
dep = sc.deployment(0)
cfg = LinkBudgetConfig()

print("non-RTA stations (left apartment):")
for i, p in enumerate(dep.nonrta_stas):
    print(f"  {i}: ({p.x:5.2f}, {p.y:5.2f})  {p.distance(dep.nonrta_ap):4.1f} m from its AP")

# Expected SINR at the RTA AP for a PSR uplink by RTA station j while
# non-RTA station i holds the trigger-based uplink.  Stations far from their
# own AP force the PSR power down hard, so they tend to be unfavorable.
tab = sinr_table(dep, cfg)
np.set_printoptions(precision=1, suppress=True)
print("\nexpected PSR SINR (dB), rows = RTA stations:")
print(tab)

fav = classify_windowed(dep, cfg).to_array()
print(f"\nfavorable (SINR > {cfg.sinr_threshold_db} dB):")
print(fav)

for th in (0.0, 3.0, 6.0):
    n = int(classify_windowed(dep, LinkBudgetConfig(sinr_threshold_db=th)).to_array().sum())
    print(f"threshold {th:4.1f} dB -> {n} favorable pairs")
