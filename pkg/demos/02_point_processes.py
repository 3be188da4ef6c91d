"""Sampling the vertex set three ways: exactly n points, Poisson(n) points,
and a Poisson process conditioned on fixed vertices and an empty region.

The Poissonized model buys independence between disjoint regions: counts are
independent Poissons with means proportional to hyperbolic area, and a region
with expected count m is empty with probability e^{-m}.
"""

import math

import numpy as np

from hrglab.geometry import ModelParams, PolarPoint, area_disk
from hrglab.points import (
    Region,
    SectorBand,
    expected_count_in_region,
    sample_binomial,
    sample_conditional,
    sample_poisson,
)

params = ModelParams.from_n(20_000, alpha=0.75, nu=1.0)

print("-- binomial model: exactly n i.i.d. points --")
ps = sample_binomial(params, 20_000, seed=0)
print(f"sampled {len(ps)} points; angle-sorted: {bool(np.all(np.diff(ps.theta) >= 0))}")
print(f"empirical median radius {np.median(ps.r):.3f} vs R = {params.big_r:.3f}")

print("\n-- Poisson model: count itself is random --")
counts = [len(sample_poisson(params, seed=s)) for s in range(8)]
print(f"counts over 8 seeds: {counts}")

print("\n-- region counts are Poisson with area-proportional means --")
band = Region(params, (SectorBand(0.0, 2 * math.pi, 3.0, params.big_r),))
expected = expected_count_in_region(band, params)
observed = [int((sample_poisson(params, seed=s).types >= 3.0).sum()) for s in range(8)]
print(f"types >= 3: expected {expected:.1f}, observed {observed}")

print("\n-- conditioned process: fixed vertices, one region forced empty --")
hole = Region.sector(params, theta_start=1.0, theta_width=0.8)
anchors = [PolarPoint(2.0, 0.1), PolarPoint(5.0, 4.0)]
cond = sample_conditional(params, anchors, hole, seed=3)
in_hole = int(hole.contains(cond.r, cond.theta).sum())
print(f"{len(cond)} vertices, {in_hole} inside the excluded sector (must be 0)")
print(f"hole measure = {hole.measure / area_disk(params.big_r, params.alpha):.1%} of the disk")

print("\n-- emptiness probability of a unit-mean probe region --")
disk = area_disk(params.big_r, params.alpha)
width = 2 * math.pi * (disk - hole.measure) / ((params.n_target - 2) * disk)
probe = Region.sector(params, 5.5, width)
m = expected_count_in_region(probe, params, excluded=hole, fixed_count=2)
empty = sum(
    not probe.contains(c.r, c.theta).any()
    for c in (sample_conditional(params, anchors, hole, seed=s) for s in range(300))
)
print(f"probe mean = {m:.3f}; empty in {empty}/300 = {empty/300:.3f} (e^-1 = {math.exp(-1):.3f})")
