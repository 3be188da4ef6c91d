"""Structural probes: the type-R/2 core and its clique property, geometric
type-exploding paths into the core, distance-to-core statistics, angular
frontier exploration with per-layer max-type tracking, and the two-frontier
sweep that yields spanning paths and umbrellas."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import UNREACHABLE, _gather_neighbors, bfs_distances
from .build import Graph, is_adjacent
from .geometry import signed_angles_from

__all__ = [
    "CoreReport",
    "ExplodingPath",
    "LayerTrace",
    "ExplorationState",
    "Umbrella",
    "core_type_threshold",
    "near_core_threshold",
    "extract_core",
    "find_exploding_path",
    "distance_to_core",
    "distances_to_core",
    "layer_max_type_trace",
    "layer_skip_violations",
    "max_type_jump_bound",
    "component_angular_extent",
    "simultaneous_breadth_exploration",
    "umbrella_coverage_violations",
    "verify_spanning_overlap",
    "umbrella_connect",
]


def _params(g: Graph):
    if g.point_set is None:
        raise ValueError("probe requires a graph carrying its point set")
    return g.point_set.params


def core_type_threshold(big_r: float) -> float:
    """Core membership: type at least R/2."""
    return big_r / 2.0


def near_core_threshold(big_r: float) -> float:
    """Target types for distance-to-core: at least R/2 - 2 ln ln R."""
    return big_r / 2.0 - 2.0 * math.log(math.log(big_r))


# ---------------------------------------------------------------------------
# core


@dataclass(frozen=True)
class CoreReport:
    """Vertices of type >= R/2, whether they verifiably form a clique, and an
    optional hub adjacent to every vertex above the high-type threshold."""

    core: np.ndarray
    clique_verified: bool
    hub_witness: int | None
    hub_type_threshold: float

    def __post_init__(self) -> None:
        self.core.setflags(write=False)


def extract_core(g: Graph, omega: float | None = None) -> CoreReport:
    """Core = {v : t_v >= R/2}, with the clique property checked pair by pair.

    The hub search looks for a core vertex of radius at most
    (2*alpha - 1) R / (2*alpha) + omega that the graph confirms adjacent to
    every vertex of type at least that same value; omega defaults to
    ln ln R.
    """
    params = _params(g)
    big_r = params.big_r
    types = g.point_set.types
    core = np.flatnonzero(types >= core_type_threshold(big_r)).astype(np.int64)
    clique = True
    for i in range(len(core)):
        for j in range(i + 1, len(core)):
            if not is_adjacent(g, int(core[i]), int(core[j])):
                clique = False
                break
        if not clique:
            break
    if omega is None:
        omega = math.log(math.log(big_r))
    hub_cut = (2.0 * params.alpha - 1.0) * big_r / (2.0 * params.alpha) + omega
    hub: int | None = None
    high = np.flatnonzero(types >= hub_cut)
    low_radius = core[g.point_set.r[core] <= hub_cut] if len(core) else core
    for cand in low_radius:
        if all(is_adjacent(g, int(cand), int(v)) for v in high if v != cand):
            hub = int(cand)
            break
    return CoreReport(core, clique, hub, hub_cut)


# ---------------------------------------------------------------------------
# exploding paths


@dataclass(frozen=True)
class ExplodingPath:
    """A path whose types grow by at least (1 + delta_used) per step except
    possibly the final hop, terminating in the core."""

    vertices: tuple[int, ...]
    delta_used: float
    zeta_used: float
    terminal_in_core: bool

    def validate(self, g: Graph) -> None:
        params = _params(g)
        types = g.point_set.types
        verts = self.vertices
        if not self.terminal_in_core or types[verts[-1]] < core_type_threshold(params.big_r):
            raise ValueError("exploding path must terminate in the core")
        for a, b in zip(verts, verts[1:]):
            if not is_adjacent(g, a, b):
                raise ValueError("consecutive path vertices are not adjacent")
        for i in range(len(verts) - 2):
            if types[verts[i + 1]] < (1.0 + self.delta_used) * types[verts[i]]:
                raise ValueError("type growth below (1 + delta) along the path")
        bound = math.log(params.big_r) / math.log1p(self.delta_used) + 2.0
        if len(verts) > bound:
            raise ValueError("path exceeds the length bound log R / log(1 + delta) + 2")


def find_exploding_path(g: Graph, v: int, zeta: float | None = None) -> ExplodingPath | None:
    """Greedy search for a (delta - zeta)-exploding path from v.

    From the current vertex of type t, a neighbor already in the core ends
    the path; otherwise the candidates are the neighbors with type in
    [(1 + delta - zeta) t, (1 + delta + zeta) t] and the one at the smallest
    relative angle is taken (smallest index on ties).  Returns None when the
    band is empty with no core neighbor, or the length bound is hit.
    """
    params = _params(g)
    if params.delta is None:
        raise ValueError("exploding paths require 1/2 < alpha < 1")
    delta = params.delta
    if zeta is None:
        zeta = 0.1 * delta
    if not 0.0 < zeta < delta:
        raise ValueError(f"zeta must lie in (0, delta = {delta:g}), got {zeta}")
    ps = g.point_set
    types = ps.types
    core_thr = core_type_threshold(params.big_r)
    grow = 1.0 + delta - zeta
    max_len = math.log(params.big_r) / math.log(grow) + 2.0

    def _finish(path: list[int]) -> ExplodingPath:
        found = ExplodingPath(tuple(path), delta - zeta, zeta, True)
        found.validate(g)
        return found

    path = [int(v)]
    if types[v] >= core_thr:
        return _finish(path)
    cur = int(v)
    while len(path) + 1 <= max_len:
        nbrs = g.adj(cur)
        t_cur = types[cur]
        rel = np.abs(signed_angles_from(float(ps.theta[cur]), ps.theta[nbrs]))
        in_core = types[nbrs] >= core_thr
        if in_core.any():
            cand = nbrs[in_core]
            pick = cand[np.lexsort((cand, rel[in_core]))[0]]
            path.append(int(pick))
            return _finish(path)
        lo = grow * t_cur
        hi = (1.0 + delta + zeta) * t_cur
        in_band = (types[nbrs] >= lo) & (types[nbrs] <= hi)
        in_band &= ~np.isin(nbrs, path)
        if not in_band.any():
            return None
        cand = nbrs[in_band]
        pick = int(cand[np.lexsort((cand, rel[in_band]))[0]])
        path.append(pick)
        cur = pick
    return None


# ---------------------------------------------------------------------------
# distance to the near-core set


def distance_to_core(g: Graph, v: int) -> int:
    """BFS distance from v to the nearest vertex of type at least
    R/2 - 2 ln ln R; UNREACHABLE if its component has none."""
    params = _params(g)
    types = g.point_set.types
    thr = near_core_threshold(params.big_r)
    if types[v] >= thr:
        return 0
    targets = types >= thr
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[v] = 0
    frontier = np.array([v], dtype=np.int64)
    d = 0
    while len(frontier):
        nbrs = _gather_neighbors(g, frontier)
        nbrs = nbrs[dist[nbrs] == UNREACHABLE]
        if len(nbrs) == 0:
            return UNREACHABLE
        d += 1
        dist[nbrs] = d
        if targets[nbrs].any():
            return d
        frontier = np.flatnonzero(dist == d)
    return UNREACHABLE


def distances_to_core(g: Graph) -> np.ndarray:
    """distance_to_core for every vertex at once via a multi-source BFS from
    the near-core set."""
    params = _params(g)
    types = g.point_set.types
    thr = near_core_threshold(params.big_r)
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    frontier = np.flatnonzero(types >= thr)
    dist[frontier] = 0
    d = 0
    while len(frontier):
        nbrs = _gather_neighbors(g, frontier)
        nbrs = nbrs[dist[nbrs] == UNREACHABLE]
        if len(nbrs) == 0:
            break
        d += 1
        dist[nbrs] = d
        frontier = np.flatnonzero(dist == d)
    return dist


# ---------------------------------------------------------------------------
# layered max-type exploration (single frontier, angular admission)


@dataclass(frozen=True)
class LayerTraceRow:
    round: int
    max_type: float
    theta_l: float
    theta_r: float


@dataclass(frozen=True)
class LayerTrace:
    root: int
    rows: tuple[LayerTraceRow, ...]
    discovered: np.ndarray
    hit_round_cap: bool

    def __post_init__(self) -> None:
        self.discovered.setflags(write=False)

    @property
    def running_max_types(self) -> np.ndarray:
        return np.maximum.accumulate(np.array([row.max_type for row in self.rows]))


def layer_max_type_trace(g: Graph, v: int, max_rounds: int | None = None) -> LayerTrace:
    """Round-based exploration admitting only vertices beyond the extreme
    angles reached so far, recording the maximum type found per round.

    Round i admits neighbors of round i-1 vertices whose relative angle to
    the root exceeds the current clockwise extreme (clockwise side) or the
    current anticlockwise extreme (anticlockwise side).  Stops when a round
    admits nothing or after max_rounds (default 10 ln R, reported as a cap
    hit, never silently).
    """
    params = _params(g)
    ps = g.point_set
    if max_rounds is None:
        max_rounds = int(math.ceil(10.0 * math.log(params.big_r)))
    sgn = signed_angles_from(float(ps.theta[v]), ps.theta)
    types = ps.types
    discovered = np.zeros(g.n, dtype=bool)
    discovered[v] = True
    theta_l = 0.0
    theta_r = 0.0
    rows = [LayerTraceRow(0, float(types[v]), 0.0, 0.0)]
    frontier = np.array([v], dtype=np.int64)
    hit_cap = False
    for i in range(1, max_rounds + 1):
        nbrs = np.unique(_gather_neighbors(g, frontier))
        if len(nbrs) == 0:
            break
        s = sgn[nbrs]
        admit = ((s < 0.0) & (-s > theta_l)) | ((s > 0.0) & (s > theta_r))
        admit &= ~discovered[nbrs]
        admitted = nbrs[admit]
        if len(admitted) == 0:
            break
        discovered[admitted] = True
        s_adm = sgn[admitted]
        if (s_adm < 0.0).any():
            theta_l = max(theta_l, float(-s_adm[s_adm < 0.0].min()))
        if (s_adm > 0.0).any():
            theta_r = max(theta_r, float(s_adm[s_adm > 0.0].max()))
        rows.append(LayerTraceRow(i, float(types[admitted].max()), theta_l, theta_r))
        frontier = admitted
        if i == max_rounds:
            hit_cap = True
    return LayerTrace(int(v), tuple(rows), discovered, hit_cap)


def layer_skip_violations(g: Graph, trace: LayerTrace) -> np.ndarray:
    """Undiscovered vertices inside the explored angular range whose type
    exceeds the maximum discovered type; must be empty."""
    ps = g.point_set
    final = trace.rows[-1]
    sgn = signed_angles_from(float(ps.theta[trace.root]), ps.theta)
    in_range = (sgn >= -final.theta_l) & (sgn <= final.theta_r)
    max_type = float(trace.running_max_types[-1])
    bad = in_range & ~trace.discovered & (ps.types > max_type)
    return np.flatnonzero(bad)


def max_type_jump_bound(t_hat: float, params, zeta: float) -> float:
    """Lower bound on the probability that a round does not jump past
    (1 + delta + zeta) * t_hat given the running max is below t_hat:
    exp(-(2 nu / ((alpha - 1/2) pi)) e^{-(alpha - 1/2) zeta t_hat})."""
    a = params.alpha - 0.5
    if a <= 0:
        raise ValueError("bound defined for alpha > 1/2")
    return math.exp(-(2.0 * params.nu / (a * math.pi)) * math.exp(-a * zeta * t_hat))


# ---------------------------------------------------------------------------
# simultaneous breadth exploration, spanning paths, umbrellas


def component_angular_extent(theta_sorted_subset: np.ndarray) -> float:
    """Smallest arc length containing all the given angles."""
    if len(theta_sorted_subset) <= 1:
        return 0.0
    th = np.sort(theta_sorted_subset)
    gaps = np.diff(np.append(th, th[0] + 2.0 * math.pi))
    return float(2.0 * math.pi - gaps.max())


@dataclass(frozen=True)
class ExplorationState:
    """Per-round record of the two-frontier sweep."""

    root: int
    frontiers_l: tuple[np.ndarray, ...]
    frontiers_r: tuple[np.ndarray, ...]
    theta_l: tuple[float, ...]
    theta_r: tuple[float, ...]
    max_types: tuple[float, ...]
    rounds: int
    stopped: bool
    failure: str | None = None


@dataclass(frozen=True)
class Umbrella:
    """A spanning path between the component's angular extremes plus a
    connector from the root; size bounds the root's distance to both ends."""

    root: int
    spanning_path: tuple[int, ...]
    connector: tuple[int, ...]
    size: int

    def validate(self, g: Graph, extreme_cw: int, extreme_acw: int, rounds: int) -> None:
        path = self.spanning_path
        ends = {path[0], path[-1]}
        if ends != {extreme_cw, extreme_acw}:
            raise ValueError("spanning path endpoints are not the angular extremes")
        if len(set(path)) != len(path):
            raise ValueError("spanning path revisits a vertex")
        for a, b in zip(path, path[1:]):
            if not is_adjacent(g, a, b):
                raise ValueError("spanning path has a non-edge")
        for a, b in zip(self.connector, self.connector[1:]):
            if not is_adjacent(g, a, b):
                raise ValueError("connector has a non-edge")
        if self.connector[0] != self.root or self.connector[-1] not in path:
            raise ValueError("connector must join the root to the spanning path")
        attach = path.index(self.connector[-1])
        hops = len(self.connector) - 1
        size = hops + max(attach, len(path) - 1 - attach)
        if size != self.size:
            raise ValueError("stored size inconsistent with stored paths")
        if self.size > rounds:
            raise ValueError("umbrella size exceeds the stopping round")


def _walk_dedup(walk: list[int]) -> list[int]:
    """Remove cycles from a walk by keeping the first occurrence of each
    vertex; the result visits no vertex twice and keeps walk adjacency."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for w in walk:
        if w in pos:
            cut = pos[w] + 1
            for x in out[cut:]:
                del pos[x]
            del out[cut:]
        else:
            pos[w] = len(out)
            out.append(w)
    return out


def simultaneous_breadth_exploration(
    g: Graph, v: int, max_rounds: int | None = None
) -> tuple[ExplorationState, Umbrella | None]:
    """Two-frontier sweep from v and the umbrella it induces.

    Each round admits undiscovered neighbors of the previous round's
    frontiers lying clockwise (respectively anticlockwise) of everything
    discovered so far, and stops when both sides come up empty.  Requires
    the component of v to span an angular extent below pi; wrapped
    components are refused with a failure marker.
    """
    params = _params(g)
    ps = g.point_set
    if max_rounds is None:
        max_rounds = int(math.ceil(10.0 * math.log(params.big_r)))
    comp = np.flatnonzero(bfs_distances(g, int(v)) != UNREACHABLE)
    extent = component_angular_extent(ps.theta[comp])
    if extent >= math.pi:
        state = ExplorationState(
            int(v), (), (), (), (), (), 0, False, "component wraps (angular extent >= pi)"
        )
        return state, None
    sgn = signed_angles_from(float(ps.theta[v]), ps.theta)
    types = ps.types
    discovered = np.zeros(g.n, dtype=bool)
    discovered[v] = True
    parent = np.full(g.n, -1, dtype=np.int64)
    cur_min = 0.0
    cur_max = 0.0
    prev = np.array([v], dtype=np.int64)
    fl: list[np.ndarray] = [np.array([v], dtype=np.int64)]
    fr: list[np.ndarray] = [np.array([v], dtype=np.int64)]
    th_l: list[float] = [0.0]
    th_r: list[float] = [0.0]
    mt: list[float] = [float(types[v])]
    rounds = 0
    failure: str | None = None
    for i in range(1, max_rounds + 1):
        rounds = i
        cand_parents = np.repeat(prev, np.diff(g.offsets)[prev])
        cand = _gather_neighbors(g, prev)
        fresh = ~discovered[cand]
        cand, cand_parents = cand[fresh], cand_parents[fresh]
        left = sgn[cand] < cur_min
        right = sgn[cand] > cur_max
        vl = np.unique(cand[left])
        vr = np.unique(cand[right])
        admitted = np.concatenate([cand[left], cand[right]])
        admitted_parents = np.concatenate([cand_parents[left], cand_parents[right]])
        if len(vl) == 0 and len(vr) == 0:
            fl.append(vl)
            fr.append(vr)
            th_l.append(abs(cur_min))
            th_r.append(cur_max)
            mt.append(0.0)
            break
        # deterministic parent: the smallest-index previous-round neighbor
        order = np.lexsort((admitted_parents, admitted))
        admitted, admitted_parents = admitted[order], admitted_parents[order]
        first = np.concatenate([[True], admitted[1:] != admitted[:-1]])
        parent[admitted[first]] = admitted_parents[first]
        new = admitted[first]
        discovered[new] = True
        if len(vl):
            cur_min = min(cur_min, float(sgn[vl].min()))
        if len(vr):
            cur_max = max(cur_max, float(sgn[vr].max()))
        fl.append(vl)
        fr.append(vr)
        th_l.append(abs(cur_min))
        th_r.append(cur_max)
        mt.append(float(types[new].max()))
        prev = np.concatenate([vl, vr])
        if i == max_rounds:
            failure = f"round cap {max_rounds} reached before the frontiers emptied"
    state = ExplorationState(
        int(v), tuple(fl), tuple(fr), tuple(th_l), tuple(th_r), tuple(mt), rounds,
        failure is None, failure,
    )
    if failure is not None:
        return state, None
    ext_cw = int(comp[np.argmin(sgn[comp])])
    ext_acw = int(comp[np.argmax(sgn[comp])])
    if not (discovered[ext_cw] and discovered[ext_acw]):
        state = ExplorationState(
            state.root, state.frontiers_l, state.frontiers_r, state.theta_l, state.theta_r,
            state.max_types, state.rounds, False, "angular extremes left undiscovered (probe bug)",
        )
        return state, None

    def _chain_from_root(x: int) -> list[int]:
        chain = [x]
        while chain[-1] != v:
            chain.append(int(parent[chain[-1]]))
        return chain[::-1]

    chain_cw = _chain_from_root(ext_cw)
    chain_acw = _chain_from_root(ext_acw)
    path = _walk_dedup(chain_cw[::-1] + chain_acw[1:])
    # parent chains are tree paths, so they share exactly a prefix from the
    # root; that prefix is the connector and its tip is the attach point
    shared = 0
    while (
        shared < min(len(chain_cw), len(chain_acw)) and chain_cw[shared] == chain_acw[shared]
    ):
        shared += 1
    connector = tuple(chain_cw[:shared])
    attach = connector[-1]
    pos = path.index(attach)
    size = (shared - 1) + max(pos, len(path) - 1 - pos)
    umbrella = Umbrella(int(v), tuple(path), connector, size)
    umbrella.validate(g, ext_cw, ext_acw, rounds)
    return state, umbrella


def umbrella_coverage_violations(g: Graph, umbrella: Umbrella, component: np.ndarray) -> list[int]:
    """Component vertices above some spanning-path edge yet adjacent to no
    spanning-path vertex; must be empty."""
    from .geometry import above_edge

    ps = g.point_set
    big_r = ps.params.big_r
    path = umbrella.spanning_path
    path_set = set(path)
    bad = []
    for w in component:
        w = int(w)
        if w in path_set:
            continue
        wp = ps.point(w)
        above = any(
            above_edge(wp, ps.point(a), ps.point(b), big_r) for a, b in zip(path, path[1:])
        )
        if above and not any(is_adjacent(g, w, p) for p in path):
            bad.append(w)
    return bad


def verify_spanning_overlap(g: Graph, u1: Umbrella, u2: Umbrella, labels: np.ndarray | None = None) -> bool:
    """True iff the two spanning paths share a vertex.  Always true for valid
    umbrellas of one component; False signals a builder or probe bug."""
    if labels is not None:
        same = labels[u1.root] == labels[u2.root]
    else:
        same = bfs_distances(g, u1.root, target=u2.root)[u2.root] != UNREACHABLE
    if not same:
        raise ValueError("umbrellas come from different components")
    return bool(set(u1.spanning_path) & set(u2.spanning_path))


def umbrella_connect(g: Graph, u1: Umbrella, u2: Umbrella) -> list[int]:
    """A concrete u1.root -> u2.root path: follow u1's umbrella to the first
    vertex shared with u2's umbrella, then u2's umbrella to its root.  Its
    length is at most size(u1) + size(u2)."""

    def _route(u: Umbrella) -> list[int]:
        # root along the connector, then the spanning path from the attach point
        path = list(u.spanning_path)
        attach = path.index(u.connector[-1])
        return list(u.connector[:-1]) + path[attach:], list(u.connector[:-1]) + path[attach::-1]

    fwd1, bwd1 = _route(u1)
    on_u2 = set(u2.spanning_path) | set(u2.connector)
    best: list[int] | None = None
    for route1 in (fwd1, bwd1):
        hit = next((k for k, x in enumerate(route1) if x in on_u2), None)
        if hit is None:
            continue
        z = route1[hit]
        fwd2, bwd2 = _route(u2)
        for route2 in (fwd2, bwd2):
            if z in route2:
                tail = route2[: route2.index(z)]
                cand = route1[: hit + 1] + tail[::-1]
                if best is None or len(cand) < len(best):
                    best = cand
    if best is None:
        raise ValueError("umbrellas do not intersect; are they from one component?")
    return best
