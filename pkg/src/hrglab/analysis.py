"""Graph measurements: components, BFS distances, sampled pair distances,
degree statistics, tail-exponent estimation, clustering."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _scipy_components

from .build import Graph
from .points import rng_for, STREAM_BOOTSTRAP, STREAM_PAIRS

__all__ = [
    "ComponentLabeling",
    "DistanceSample",
    "HillEstimate",
    "connected_components",
    "bfs_distances",
    "sample_pair_distances",
    "degree_histogram",
    "tail_exponent_estimate",
    "clustering_coefficient",
]

UNREACHABLE = -1


@dataclass(frozen=True)
class ComponentLabeling:
    """labels[v] = smallest vertex index in v's component; sizes descending."""

    labels: np.ndarray
    sizes: np.ndarray
    giant_fraction: float

    def __post_init__(self) -> None:
        self.labels.setflags(write=False)
        self.sizes.setflags(write=False)


def connected_components(g: Graph) -> ComponentLabeling:
    n = g.n
    if n == 0:
        return ComponentLabeling(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), 0.0)
    mat = csr_matrix(
        (np.ones(len(g.neighbors), dtype=np.int8), g.neighbors, g.offsets), shape=(n, n)
    )
    _, comp = _scipy_components(mat, directed=False)
    # scipy numbers components by first occurrence, so the representative
    # (smallest vertex index) is the first vertex seen with each id
    first = np.full(comp.max() + 1, n, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(n, dtype=np.int64))
    labels = first[comp]
    sizes = np.sort(np.bincount(comp))[::-1].astype(np.int64)
    return ComponentLabeling(labels, sizes, float(sizes[0]) / n)


def _gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    starts = g.offsets[frontier]
    ends = g.offsets[frontier + 1]
    lens = ends - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    idx = np.arange(total, dtype=np.int64)
    idx += np.repeat(starts - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens)
    return g.neighbors[idx]


def bfs_distances(g: Graph, source: int, target: int | None = None) -> np.ndarray:
    """Exact unweighted distances from source; UNREACHABLE marks the rest.

    With a target, stops as soon as the target is assigned (truncated BFS);
    distances beyond that level are then left unassigned.
    """
    n = g.n
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range (n = {n})")
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while len(frontier):
        if target is not None and dist[target] != UNREACHABLE:
            break
        nbrs = _gather_neighbors(g, frontier)
        nbrs = nbrs[dist[nbrs] == UNREACHABLE]
        if len(nbrs) == 0:
            break
        d += 1
        dist[nbrs] = d
        frontier = np.flatnonzero(dist == d)
    return dist


UNIFORM_PAIRS = "uniform_pairs"
SAME_COMPONENT_PAIRS = "same_component_pairs"


@dataclass(frozen=True)
class DistanceSample:
    """Sampled pair distances: rows are (u, v, d, label_u, label_v) with
    d = UNREACHABLE when the labels disagree."""

    pairs: np.ndarray
    mode: str
    seed: int
    big_r: float

    def __post_init__(self) -> None:
        self.pairs.setflags(write=False)
        d = self.pairs[:, 2]
        bad = (d == UNREACHABLE) & (self.pairs[:, 3] == self.pairs[:, 4])
        if bad.any():
            raise ValueError("unreachable pair recorded without a component witness")

    @property
    def finite(self) -> np.ndarray:
        return self.pairs[self.pairs[:, 2] != UNREACHABLE, 2]

    @property
    def num_unreachable(self) -> int:
        return int(np.sum(self.pairs[:, 2] == UNREACHABLE))

    @property
    def mean(self) -> float:
        d = self.finite
        return float(d.mean()) if len(d) else math.nan

    @property
    def median(self) -> float:
        d = self.finite
        return float(np.median(d)) if len(d) else math.nan

    @property
    def max(self) -> int | None:
        d = self.finite
        return int(d.max()) if len(d) else None

    @property
    def ratio_to_log_r(self) -> float:
        return self.mean / math.log(self.big_r)


def sample_pair_distances(
    g: Graph,
    labeling: ComponentLabeling,
    num_pairs: int,
    mode: str = SAME_COMPONENT_PAIRS,
    seed: int = 0,
) -> DistanceSample:
    """Distances over random vertex pairs.

    uniform_pairs records UNREACHABLE (with the label witness) when the two
    components differ; same_component_pairs rejection-samples until the
    labels agree.  Distances come from BFS truncated at the target.
    """
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    if mode not in (UNIFORM_PAIRS, SAME_COMPONENT_PAIRS):
        raise ValueError(f"unknown mode {mode!r}")
    n = g.n
    if n < 2:
        raise ValueError("need at least two vertices to sample pairs")
    if mode == SAME_COMPONENT_PAIRS and labeling.sizes[0] < 2:
        raise ValueError("no component holds two vertices; same-component sampling impossible")
    rng = rng_for(seed, STREAM_PAIRS)
    big_r = g.point_set.params.big_r if g.point_set is not None else math.e
    rows = np.empty((num_pairs, 5), dtype=np.int64)
    labels = labeling.labels
    for k in range(num_pairs):
        while True:
            u, v = rng.integers(0, n, size=2)
            if u == v:
                continue
            if mode == SAME_COMPONENT_PAIRS and labels[u] != labels[v]:
                continue
            break
        if labels[u] != labels[v]:
            rows[k] = (u, v, UNREACHABLE, labels[u], labels[v])
        else:
            d = bfs_distances(g, int(u), target=int(v))[v]
            rows[k] = (u, v, d, labels[u], labels[v])
    return DistanceSample(rows, mode, seed, big_r)


def degree_histogram(g: Graph) -> np.ndarray:
    """counts[k] = number of vertices of degree k; sums to n."""
    degs = g.degrees()
    return np.bincount(degs, minlength=1 if g.n == 0 else int(degs.max()) + 1)


@dataclass(frozen=True)
class HillEstimate:
    beta_hat: float
    stderr: float
    k_tail: int


def _hill(degrees_desc: np.ndarray, k_tail: int) -> float:
    top = degrees_desc[:k_tail].astype(float)
    ref = float(degrees_desc[k_tail])
    s = float(np.log(top / ref).sum())
    if s <= 0.0:
        raise ValueError("degenerate tail: the top degrees are all equal")
    return 1.0 + k_tail / s


def tail_exponent_estimate(
    hist: np.ndarray,
    k_tail: int | None = None,
    num_bootstrap: int = 200,
    seed: int = 0,
) -> HillEstimate:
    """Hill maximum-likelihood estimate of the degree power-law exponent.

    Uses the k_tail largest positive degrees against the (k_tail+1)-th as
    reference; k_tail defaults to ceil(sqrt(#vertices of degree >= 1)).  The
    standard error is a bootstrap over the positive-degree multiset.
    """
    hist = np.asarray(hist)
    values = np.arange(len(hist))
    positive = np.repeat(values[1:], hist[1:])
    if k_tail is None:
        k_tail = int(math.ceil(math.sqrt(len(positive))))
    if k_tail < 1 or len(positive) < k_tail + 1:
        raise ValueError(
            f"insufficient tail data: k_tail = {k_tail} needs {k_tail + 1} positive degrees, "
            f"have {len(positive)}"
        )
    desc = np.sort(positive)[::-1]
    beta = _hill(desc, k_tail)
    rng = rng_for(seed, STREAM_BOOTSTRAP)
    boots = []
    for _ in range(num_bootstrap):
        resample = rng.choice(positive, size=len(positive), replace=True)
        resample[::-1].sort()
        try:
            boots.append(_hill(resample, k_tail))
        except ValueError:
            continue
    stderr = float(np.std(boots, ddof=1)) if len(boots) > 1 else math.nan
    return HillEstimate(beta, stderr, k_tail)


def _edges_among_neighbors(g: Graph, v: int) -> int:
    nbrs = g.adj(v)
    count = 0
    for u in nbrs:
        # sorted-list intersection, each unordered pair counted twice
        count += len(np.intersect1d(g.adj(int(u)), nbrs, assume_unique=True))
    return count // 2


def clustering_coefficient(
    g: Graph,
    mode: str = "global",
    samples: int = 1000,
    seed: int = 0,
) -> float:
    """Global transitivity (3 * triangles / paths of length 2) or the mean
    local coefficient over `samples` uniformly drawn vertices of degree >= 2."""
    degs = g.degrees()
    if mode == "global":
        paths2 = float((degs * (degs - 1) // 2).sum())
        if paths2 == 0:
            raise ValueError("no paths of length 2; transitivity undefined")
        closed = 0
        for u, v in g.edge_array():
            closed += len(np.intersect1d(g.adj(int(u)), g.adj(int(v)), assume_unique=True))
        # each triangle contributes one closing neighbor per edge, 3 in total
        return closed / paths2
    if mode == "sampled":
        if samples < 1:
            raise ValueError("samples must be >= 1")
        eligible = np.flatnonzero(degs >= 2)
        if len(eligible) == 0:
            raise ValueError("no vertex of degree >= 2")
        rng = rng_for(seed, STREAM_PAIRS)
        picks = rng.choice(eligible, size=samples, replace=True)
        local = np.empty(samples)
        for i, v in enumerate(picks):
            d = int(degs[v])
            local[i] = _edges_among_neighbors(g, int(v)) / (d * (d - 1) / 2)
        return float(local.mean())
    raise ValueError(f"unknown mode {mode!r}")
