"""Adjacency graph construction: u ~ v iff hyperbolic distance <= R.

Two builders produce identical edge sets: an all-pairs reference builder and
a near-linear bucketed builder that partitions vertices into unit type bands
and scans, per vertex and band, only an angular window guaranteed to contain
every true edge.  Both confirm candidates with the same exact predicate, so
the outputs are bit-identical.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import TWO_PI, pair_sep_sq
from .points import PointSet

__all__ = [
    "Graph",
    "build_naive",
    "build_bucketed",
    "is_adjacent",
    "validate_graph",
    "save_graph",
    "load_graph",
    "export_edges_csv",
]

GRAPH_MAGIC = b"HRGG"
GRAPH_VERSION = 1
_GRAPH_HEADER = struct.Struct("<4sIQQB")  # magic, version, n, m, build_method
_METHOD_CODES = {"naive": 0, "bucketed": 1}
_METHOD_NAMES = {v: k for k, v in _METHOD_CODES.items()}

NAIVE_CAP = 20_000


@dataclass(frozen=True)
class Graph:
    """Immutable compressed adjacency over a PointSet.

    ``neighbors[offsets[v]:offsets[v+1]]`` is v's sorted neighbor list; every
    undirected edge appears in both lists.
    """

    point_set: PointSet | None
    offsets: np.ndarray
    neighbors: np.ndarray
    build_method: str

    def __post_init__(self) -> None:
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    def adj(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) array with u < v."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.offsets))
        keep = u < self.neighbors
        return np.column_stack([u[keep], self.neighbors[keep]])


def _csr_from_edges(n: int, uv: np.ndarray, method: str, ps: PointSet | None) -> Graph:
    if len(uv) == 0:
        return Graph(ps, np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64), method)
    both = np.concatenate([uv, uv[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    counts = np.bincount(both[:, 0], minlength=n)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return Graph(ps, offsets, np.ascontiguousarray(both[:, 1]), method)


def _sep_threshold(big_r: float) -> float:
    return math.sinh(big_r / 2.0) ** 2


def build_naive(ps: PointSet, cap: int = NAIVE_CAP) -> Graph:
    """Exact graph by all-pairs evaluation; capped because the work is n^2."""
    n = len(ps)
    if n > cap:
        raise ValueError(f"naive builder capped at {cap} points, got {n}")
    thr = _sep_threshold(ps.params.big_r)
    edges = []
    chunk = max(1, 2**22 // max(n, 1))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        sep = pair_sep_sq(
            ps.r[lo:hi, None], ps.theta[lo:hi, None], ps.r[None, :], ps.theta[None, :]
        )
        iu, iv = np.nonzero(sep <= thr)
        iu += lo
        keep = iu < iv
        edges.append(np.column_stack([iu[keep], iv[keep]]))
    uv = np.concatenate(edges) if edges else np.empty((0, 2), dtype=np.int64)
    return _csr_from_edges(n, uv.astype(np.int64), "naive", ps)


def _band_window(t_u: np.ndarray, band_top: float, big_r: float, eps_safe: float, c0: float):
    """Angular half-width scanned for vertices of type t_u against a band.

    Below the type-sum cutoff the window doubles the outer-tube angle
    (eps_safe = 1.0); at or above the cutoff the tube bound no longer
    applies and the window is forced to pi.  With c0 >= 1 no true edge can
    fall outside the window; the exact distance check then decides.
    """
    w = 2.0 * (1.0 + eps_safe) * np.exp((t_u + band_top - big_r) / 2.0)
    w = np.minimum(w, math.pi)
    return np.where(t_u + band_top >= big_r - c0, math.pi, w)


def build_bucketed(ps: PointSet, eps_safe: float = 1.0, c0: float = 10.0) -> Graph:
    """Same edge set as build_naive in near-linear expected time.

    Vertices are bucketed into unit type bands; each vertex scans, in every
    band, the angular window of _band_window via binary search on the band's
    angle-sorted points, then candidates are confirmed exactly.
    """
    if c0 < 1.0:
        raise ValueError("c0 must be >= 1 for the pruning window to be safe")
    n = len(ps)
    if n == 0:
        return _csr_from_edges(0, np.empty((0, 2), dtype=np.int64), "bucketed", ps)
    big_r = ps.params.big_r
    thr = _sep_threshold(big_r)
    types = ps.types
    band_of = np.minimum(types.astype(np.int64), int(big_r))
    num_bands = int(band_of.max()) + 1
    band_members = [np.flatnonzero(band_of == b) for b in range(num_bands)]
    band_theta = [ps.theta[idx] for idx in band_members]
    band_theta_ext = [np.concatenate([th, th + TWO_PI]) for th in band_theta]

    edges: list[np.ndarray] = []
    max_candidates = 4_000_000

    for a in range(num_bands):
        src = band_members[a]
        if len(src) == 0:
            continue
        for b in range(a, num_bands):
            members = band_members[b]
            nb = len(members)
            if nb == 0:
                continue
            windows = _band_window(types[src], float(b + 1), big_r, eps_safe, c0)
            lo = ps.theta[src] - windows
            hi = ps.theta[src] + windows
            shift = np.where(lo < 0.0, TWO_PI, 0.0)
            lo += shift
            hi += shift
            i0 = np.searchsorted(band_theta_ext[b], lo, side="left")
            i1 = np.searchsorted(band_theta_ext[b], hi, side="right")
            i1 = np.minimum(i1, i0 + nb)  # a full-circle window sees each point once
            counts = i1 - i0
            # chunk sources so candidate buffers stay bounded
            cum = np.cumsum(counts)
            start = 0
            while start < len(src):
                base = cum[start - 1] if start else 0
                stop = int(np.searchsorted(cum, base + max_candidates, side="right"))
                stop = max(stop, start + 1)
                sel = slice(start, stop)
                c = counts[sel]
                total = int(c.sum())
                if total:
                    flat = np.arange(total, dtype=np.int64)
                    flat += np.repeat(i0[sel] - np.concatenate([[0], np.cumsum(c)[:-1]]), c)
                    cand = members[flat % nb]
                    u = np.repeat(src[sel], c)
                    if a == b:
                        keep = cand > u
                    else:
                        keep = np.ones(total, dtype=bool)
                    u, cand = u[keep], cand[keep]
                    ok = (
                        pair_sep_sq(ps.r[u], ps.theta[u], ps.r[cand], ps.theta[cand]) <= thr
                    )
                    if ok.any():
                        edges.append(np.column_stack([u[ok], cand[ok]]))
                start = stop
    uv = np.concatenate(edges) if edges else np.empty((0, 2), dtype=np.int64)
    return _csr_from_edges(n, uv, "bucketed", ps)


def is_adjacent(g: Graph, u: int, v: int) -> bool:
    """Membership in the sorted neighbor list; O(log deg)."""
    n = g.n
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"vertex index out of range (n = {n})")
    if u == v:
        return False
    row = g.adj(u)
    pos = np.searchsorted(row, v)
    return bool(pos < len(row) and row[pos] == v)


def validate_graph(g: Graph) -> None:
    """Check symmetry, degeneracy, and that every listed edge is a true edge.

    Raises ValueError on the first violated invariant.
    """
    n = g.n
    if g.offsets[0] != 0 or g.offsets[-1] != len(g.neighbors):
        raise ValueError("offsets do not frame the neighbor array")
    if np.any(np.diff(g.offsets) < 0):
        raise ValueError("offsets must be nondecreasing")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.offsets))
    if np.any(src == g.neighbors):
        raise ValueError("self-loop present")
    for v in range(n):
        row = g.adj(v)
        if np.any(np.diff(row) <= 0):
            raise ValueError(f"neighbor list of {v} is not strictly increasing")
    fwd = set(map(tuple, np.column_stack([src, g.neighbors]).tolist()))
    if any((v, u) not in fwd for (u, v) in fwd):
        raise ValueError("adjacency is not symmetric")
    if g.point_set is None:
        raise ValueError("cannot verify edge distances without the point set")
    ps = g.point_set
    mask = src < g.neighbors
    u, v = src[mask], g.neighbors[mask]
    sep = pair_sep_sq(ps.r[u], ps.theta[u], ps.r[v], ps.theta[v])
    if np.any(sep > _sep_threshold(ps.params.big_r)):
        raise ValueError("listed edge exceeds distance R")


# ---------------------------------------------------------------------------
# persistence


def save_graph(g: Graph, path: str | Path) -> None:
    """Binary graph file: header, then offsets (n+1 u64), then neighbors (2m u64)."""
    with open(path, "wb") as fh:
        fh.write(_GRAPH_HEADER.pack(GRAPH_MAGIC, GRAPH_VERSION, g.n, g.m, _METHOD_CODES[g.build_method]))
        fh.write(g.offsets.astype("<u8").tobytes())
        fh.write(g.neighbors.astype("<u8").tobytes())


def load_graph(path: str | Path, point_set: PointSet | None = None) -> Graph:
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read(_GRAPH_HEADER.size)
        if len(raw) < _GRAPH_HEADER.size:
            raise ValueError(f"{path}: truncated graph file header")
        magic, version, n, m, method = _GRAPH_HEADER.unpack(raw)
        if magic != GRAPH_MAGIC or version != GRAPH_VERSION:
            raise ValueError(f"{path}: bad graph file header (magic={magic!r}, version={version})")
        offsets = np.frombuffer(fh.read(8 * (n + 1)), dtype="<u8")
        neighbors = np.frombuffer(fh.read(8 * 2 * m), dtype="<u8")
    if len(offsets) != n + 1 or len(neighbors) != 2 * m:
        raise ValueError(f"{path}: graph file shorter than its header promises")
    if point_set is not None and len(point_set) != n:
        raise ValueError(f"{path}: graph has {n} vertices but point set has {len(point_set)}")
    return Graph(
        point_set,
        offsets.astype(np.int64),
        neighbors.astype(np.int64),
        _METHOD_NAMES.get(method, "bucketed"),
    )


def export_edges_csv(g: Graph, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("u,v\n")
        for u, v in g.edge_array():
            fh.write(f"{u},{v}\n")
