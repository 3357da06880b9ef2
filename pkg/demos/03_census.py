"""Brute-force counts up to height P against the predicted constants.

Every tuple with max(|a|,|b|,|c|,|d|) <= P and |ad - bc| = 1 is classified.
The counts, divided by P^2, should approach constant/pi^2.
"""

import math

from chatelet.census import census_csv, predict_constants, run_census

P = 600
reports, counters = run_census(P, [150, 300, 600], return_counters=True)
print(census_csv(reports))

c_tot, c_loc, c_br = predict_constants()
final = reports[-1].ratios()
for name, c, key in (("N", c_tot, "N_over_P2"), ("N_loc", c_loc, "Nloc_over_P2"), ("N_Br", c_br, "NBr_over_P2")):
    print(f"{name:<6} predicted {float(c) / math.pi**2:.4f}   observed {float(final[key]):.4f}")

inf_, two, odd = counters.witness.tolist()
print(f"\ninsoluble tuples by first failing place: real {inf_}, 2-adic {two}, odd {odd}")
print(f"engine fallbacks {counters.engine_fallbacks}, odd-place fallbacks {counters.odd_fallbacks}")
