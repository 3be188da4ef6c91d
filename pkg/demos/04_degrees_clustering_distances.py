"""The three structural signatures: power-law degrees with exponent
2*alpha + 1, clustering bounded away from zero, and ultra-small distances.

For 1/2 < alpha < 1 same-component distances scale like 2*tau*ln R with
tau = 1/ln(1/(2*alpha - 1)), i.e. doubly logarithmically in n.  Desk-scale
graphs sit well below the limit (the core clique is proportionally huge), so
the ratio creeps upward as n grows.
"""

import numpy as np

from hrglab.analysis import (
    SAME_COMPONENT_PAIRS,
    clustering_coefficient,
    connected_components,
    degree_histogram,
    sample_pair_distances,
    tail_exponent_estimate,
)
from hrglab.build import build_bucketed
from hrglab.geometry import ModelParams
from hrglab.points import sample_binomial

print("-- degree exponent: Hill estimate vs 2*alpha + 1 --")
for alpha in (0.75, 1.1, 1.5):
    params = ModelParams.from_n(100_000, alpha, 1.0)
    g = build_bucketed(sample_binomial(params, 100_000, seed=0))
    est = tail_exponent_estimate(degree_histogram(g), seed=0)
    print(f"alpha = {alpha:4.2f}: beta_hat = {est.beta_hat:.3f} +- {est.stderr:.3f} "
          f"(k_tail = {est.k_tail}), target {2 * alpha + 1:.1f}")

print("\n-- clustering: geometric graphs are locally dense --")
params = ModelParams.from_n(100_000, 0.75, 1.0)
g = build_bucketed(sample_binomial(params, 100_000, seed=1))
c = clustering_coefficient(g, mode="sampled", samples=2000, seed=0)
print(f"mean local clustering over 2000 sampled vertices: {c:.3f}")

print("\n-- distance scaling toward 2*tau*ln R --")
two_tau = 2 * params.tau
print(f"2*tau = {two_tau:.4f}")
for n in (10_000, 100_000, 1_000_000):
    params = ModelParams.from_n(n, 0.75, 1.0)
    g = build_bucketed(sample_binomial(params, n, seed=0))
    lab = connected_components(g)
    sample = sample_pair_distances(g, lab, 500, SAME_COMPONENT_PAIRS, seed=0)
    print(f"n = {n:>8}: mean distance {sample.mean:6.3f}, ln R = {np.log(params.big_r):.3f}, "
          f"ratio {sample.ratio_to_log_r:.3f}")
