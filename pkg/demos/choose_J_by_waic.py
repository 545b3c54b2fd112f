"""
Choosing the number of basis functions
======================================

More frequency pairs give a richer surface but a slower sampler. WAIC
trades fit against effective parameters; here it is computed for a few J on
the Friedman surface with five exposures.
"""

from fastbkmr.posterior import waic_components
from fastbkmr.sampler import run_chain
from fastbkmr.simulation import SimulationSpec, generate_dataset

train, _ = generate_dataset(SimulationSpec(n=300, M=5, h_source="friedman", seed=3))

print("   J      WAIC      lppd   p_waic   seconds")
for J in (5, 20, 60):
    s = run_chain(train, J, 800, seed=J)
    value, lppd, p = waic_components(s, train)
    print(f"{J:4d} {value:9.1f} {lppd:9.1f} {p:8.1f} {s.seconds:9.1f}")

# the CLI does the same with `fastbkmr waic-scan --J-list 5,20,60 ...`
