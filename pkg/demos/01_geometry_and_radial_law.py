"""Tour of the disk geometry: distances, the radial law, and the angular
characterization of adjacency.

The model lives on a disk of radius R on the hyperbolic plane, with R tied to
the target graph size by n = nu * e^{R/2}.  A vertex's "type" t = R - r is
its distance from the rim; high type means central position and high degree.
"""

import numpy as np

from hrglab.geometry import (
    ModelParams,
    PolarPoint,
    TubeParams,
    area_disk,
    circle_length,
    hyperbolic_distance,
    radial_quantile,
    tube_classify,
    tube_threshold,
)

params = ModelParams.from_n(100_000, alpha=0.75, nu=1.0)
print(f"n_target = {params.n_target:g}, alpha = {params.alpha}, nu = {params.nu}")
print(f"disk radius R = {params.big_r:.4f}")
print(f"tau = {params.tau:.4f}  (distance scaling constant: d/ln R -> 2*tau)")
print(f"delta = {params.delta:.4f}  (type growth rate of exploding paths)")
print(f"lambda_alpha = {params.lambda_alpha:.4f}  (frontier max-type decay, alpha > 1)")

print("\n-- distances --")
origin = PolarPoint(0.0, 0.0)
rim = PolarPoint(params.big_r, 1.0)
print(f"origin to rim point: {hyperbolic_distance(origin, rim):.4f} (= R)")
a = PolarPoint(params.big_r - 2, 0.0)
for dtheta in (0.001, 0.01, 0.1):
    b = PolarPoint(params.big_r - 2, dtheta)
    print(f"two type-2 points {dtheta:5.3f} rad apart: d = {hyperbolic_distance(a, b):8.4f}"
          f"  {'<= R (edge)' if hyperbolic_distance(a, b) <= params.big_r else '>  R (no edge)'}")

print("\n-- radial law: mass concentrates at the rim --")
for q in (0.10, 0.50, 0.90, 0.99):
    r = radial_quantile(q, params)
    print(f"quantile {q:4.2f}: r = {r:7.3f}  (type {params.big_r - r:6.3f})")
print(f"area of the disk: {area_disk(params.big_r, params.alpha):.3e}")
print(f"circumference:    {circle_length(params.big_r, params.alpha):.3e}")
print(f"area/circumference -> 1/alpha = {area_disk(params.big_r, params.alpha) / circle_length(params.big_r, params.alpha):.4f}")

print("\n-- tube characterization of adjacency --")
# adjacency is essentially an angular threshold once both types are known
tube = TubeParams(eps=0.2, c0=10.0)
u = PolarPoint(params.big_r - 6.0, 0.0)
t_u = u.type_for(params.big_r)
inner = tube_threshold(t_u, 4.0, params, tube.eps, "inner")
outer = tube_threshold(t_u, 4.0, params, tube.eps, "outer")
print(f"type-6 vs type-4 pair: inner angle {inner:.3e}, outer angle {outer:.3e}")
rng = np.random.default_rng(0)
labels = {}
for _ in range(2000):
    v = PolarPoint(float(radial_quantile(rng.random(), params)), float(rng.random() * 2 * np.pi))
    cls = tube_classify(u, v, params, tube).value
    labels[cls] = labels.get(cls, 0) + 1
print(f"classification of 2000 random partners of a type-6 point: {labels}")
