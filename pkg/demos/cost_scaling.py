"""
How run time grows with n and J
===============================

Each iteration touches an n-by-J matrix of projections a handful of times,
so time should grow close to linearly in each.
"""

import time

import numpy as np

from fastbkmr.sampler import run_chain
from fastbkmr.simulation import SimulationSpec, generate_dataset

full, _ = generate_dataset(SimulationSpec(n=4000, M=5, h_source="friedman", seed=0))


def seconds(data, J, K=20):
    t0 = time.perf_counter()
    run_chain(data, J, K, seed=0)
    return time.perf_counter() - t0


for n in (1000, 2000, 4000):
    print(f"n={n:5d}  J=100  {seconds(full.subset(np.arange(n)), 100):6.2f}s")
half = full.subset(np.arange(2000))
for J in (100, 200, 400):
    print(f"n= 2000  J={J:3d}  {seconds(half, J):6.2f}s")
