"""Vertex position sampling: binomial, Poissonized, and region-conditioned.

All samplers use a counter-based Philox generator keyed by (seed, stream) so
replay is bit-exact and per-stream draws are independent of any scheduling.
PointSets are stored sorted by angle (the graph builder and the exploration
probes consume angular order) with the original sample order recoverable.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import ModelParams, PolarPoint, TWO_PI, area_disk, radial_cdf, radial_quantile

__all__ = [
    "SectorBand",
    "Region",
    "Provenance",
    "PointSet",
    "sample_binomial",
    "sample_poisson",
    "sample_conditional",
    "expected_count_in_region",
    "save_points",
    "load_points",
    "export_points_csv",
]

MAX_REGION_RECTS = 64

POINT_MAGIC = b"HRGP"
POINT_VERSION = 1
_POINT_HEADER = struct.Struct("<4sIQdddQQ")  # magic, version, count, alpha, nu, big_r, seed[2]

# RNG stream ids, one per purpose, so replays never alias
STREAM_SAMPLE = 0
STREAM_PAIRS = 1
STREAM_PROBES = 2
STREAM_BOOTSTRAP = 3
STREAM_CALIBRATE = 4


def rng_for(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); counter-based and replayable."""
    return np.random.Generator(np.random.Philox(key=[int(seed), int(stream)]))


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class SectorBand:
    """Angular sector [theta_start, theta_start + theta_width) crossed with a
    type band [t_lo, t_hi).  Angles wrap modulo 2*pi."""

    theta_start: float
    theta_width: float
    t_lo: float
    t_hi: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta_start < TWO_PI):
            raise ValueError("theta_start must lie in [0, 2*pi)")
        if not (0.0 < self.theta_width <= TWO_PI):
            raise ValueError("theta_width must lie in (0, 2*pi]")
        if not (0.0 <= self.t_lo < self.t_hi):
            raise ValueError("need 0 <= t_lo < t_hi")

    def contains_angle(self, theta) -> np.ndarray:
        return np.mod(np.asarray(theta) - self.theta_start, TWO_PI) < self.theta_width

    def contains(self, r, theta, big_r: float) -> np.ndarray:
        t = big_r - np.asarray(r)
        return self.contains_angle(theta) & (t >= self.t_lo) & (t < self.t_hi)


def _angles_overlap(a: SectorBand, b: SectorBand) -> bool:
    # start of either interval inside the other (circular intervals)
    return bool(
        a.contains_angle(b.theta_start)
        or b.contains_angle(a.theta_start)
    )


def _rects_overlap(a: SectorBand, b: SectorBand) -> bool:
    bands = a.t_lo < b.t_hi and b.t_lo < a.t_hi
    return bands and _angles_overlap(a, b)


@dataclass(frozen=True)
class Region:
    """A union of up to 64 pairwise-disjoint sector-band rectangles, with its
    area under curvature -alpha^2 computed once."""

    params: ModelParams
    rects: tuple[SectorBand, ...]
    measure: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.rects) > MAX_REGION_RECTS:
            raise ValueError(f"regions are limited to {MAX_REGION_RECTS} rectangles")
        big_r = self.params.big_r
        for rect in self.rects:
            if rect.t_hi > big_r:
                raise ValueError("type band exceeds R")
        for i, a in enumerate(self.rects):
            for b in self.rects[i + 1 :]:
                if _rects_overlap(a, b):
                    raise ValueError("region rectangles must be pairwise disjoint")
        object.__setattr__(self, "measure", sum(self._rect_measure(r) for r in self.rects))

    def _rect_measure(self, rect: SectorBand) -> float:
        alpha, big_r = self.params.alpha, self.params.big_r
        # area of the radial annulus r in (R-t_hi, R-t_lo], weighted by the
        # angular fraction
        hi = 2.0 * math.sinh(alpha * (big_r - rect.t_lo) / 2.0) ** 2
        lo = 2.0 * math.sinh(alpha * (big_r - rect.t_hi) / 2.0) ** 2
        return (rect.theta_width / alpha**2) * (hi - lo)

    @classmethod
    def empty(cls, params: ModelParams) -> "Region":
        return cls(params, ())

    @classmethod
    def sector(
        cls,
        params: ModelParams,
        theta_start: float,
        theta_width: float,
        t_lo: float = 0.0,
        t_hi: float | None = None,
    ) -> "Region":
        return cls(params, (SectorBand(theta_start, theta_width, t_lo, t_hi if t_hi is not None else params.big_r),))

    def is_empty(self) -> bool:
        return not self.rects or self.measure == 0.0

    def contains(self, r, theta) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(r.shape, dtype=bool)
        for rect in self.rects:
            out |= rect.contains(r, theta, self.params.big_r)
        return out

    def overlaps(self, other: "Region") -> bool:
        return any(_rects_overlap(a, b) for a in self.rects for b in other.rects)


def expected_count_in_region(
    region: Region,
    params: ModelParams,
    excluded: Region | None = None,
    fixed_count: int = 0,
) -> float:
    """Mean number of Poisson points landing in a region of the conditioned
    process: (n_target - fixed) * Area(region) / (Area(disk) - Area(excluded))."""
    disk = area_disk(params.big_r, params.alpha)
    excluded_measure = 0.0
    if excluded is not None and not excluded.is_empty():
        if region.overlaps(excluded):
            raise ValueError("region overlaps the excluded set")
        excluded_measure = excluded.measure
    return (params.n_target - fixed_count) * region.measure / (disk - excluded_measure)


# ---------------------------------------------------------------------------
# point sets


@dataclass(frozen=True)
class Provenance:
    kind: str  # "binomial" | "poisson" | "conditional" | "file"
    count: int
    fixed: tuple[PolarPoint, ...] = ()
    excluded: Region | None = None


@dataclass(frozen=True)
class PointSet:
    """Angle-sorted vertex positions with their model parameters.

    ``original_index[j]`` is the sample-order index of the point at sorted
    position j.  Arrays are frozen (non-writeable views).
    """

    params: ModelParams
    r: np.ndarray
    theta: np.ndarray
    original_index: np.ndarray
    provenance: Provenance
    seed: tuple[int, int]

    def __post_init__(self) -> None:
        for name in ("r", "theta", "original_index"):
            arr = getattr(self, name)
            if arr.ndim != 1 or len(arr) != len(self.r):
                raise ValueError("coordinate arrays must be 1-d and equal length")
            arr.setflags(write=False)
        if len(self.r):
            if self.r.min() < 0.0 or self.r.max() > self.params.big_r:
                raise ValueError("point outside the disk of radius R")
            if np.any(np.diff(self.theta) < 0.0):
                raise ValueError("points must be sorted by angle")

    def __len__(self) -> int:
        return len(self.r)

    @property
    def types(self) -> np.ndarray:
        return self.params.big_r - self.r

    def point(self, i: int) -> PolarPoint:
        return PolarPoint(float(self.r[i]), float(self.theta[i]))


def _finish_point_set(
    params: ModelParams,
    r: np.ndarray,
    theta: np.ndarray,
    provenance: Provenance,
    seed: tuple[int, int],
) -> PointSet:
    order = np.argsort(theta, kind="stable")
    return PointSet(
        params=params,
        r=np.ascontiguousarray(r[order]),
        theta=np.ascontiguousarray(theta[order]),
        original_index=np.ascontiguousarray(order.astype(np.int64)),
        provenance=provenance,
        seed=seed,
    )


def _draw_uniform_disk(params: ModelParams, count: int, rng: np.random.Generator):
    theta = rng.random(count) * TWO_PI
    r = radial_quantile(rng.random(count), params)
    return np.atleast_1d(r), np.atleast_1d(theta)


def sample_binomial(params: ModelParams, count: int, seed: int) -> PointSet:
    """Exactly ``count`` i.i.d. points: angle uniform, radius by inverse CDF."""
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = rng_for(seed, STREAM_SAMPLE)
    r, theta = _draw_uniform_disk(params, count, rng)
    return _finish_point_set(params, r, theta, Provenance("binomial", count), (seed, STREAM_SAMPLE))


def sample_poisson(params: ModelParams, seed: int) -> PointSet:
    """Poisson(n_target) many i.i.d. points; region counts are then
    independent Poissons proportional to region area."""
    rng = rng_for(seed, STREAM_SAMPLE)
    count = int(rng.poisson(params.n_target))
    r, theta = _draw_uniform_disk(params, count, rng)
    return _finish_point_set(params, r, theta, Provenance("poisson", count), (seed, STREAM_SAMPLE))


def _sample_outside_region(
    params: ModelParams, count: int, excluded: Region, rng: np.random.Generator
):
    """Exact sampling of the uniform law restricted to disk minus excluded."""
    disk = area_disk(params.big_r, params.alpha)
    frac = excluded.measure / disk
    if frac < 0.10:
        # rejection: cheap and exact at small exclusions
        r_out = np.empty(0)
        th_out = np.empty(0)
        while len(r_out) < count:
            need = count - len(r_out)
            batch = max(32, int(1.2 * need / max(1.0 - frac, 1e-9)))
            r, th = _draw_uniform_disk(params, batch, rng)
            keep = ~excluded.contains(r, th)
            r_out = np.concatenate([r_out, r[keep]])
            th_out = np.concatenate([th_out, th[keep]])
        return r_out[:count], th_out[:count]
    return _stratified_restricted(params, count, excluded, rng)


def _stratified_restricted(
    params: ModelParams, count: int, excluded: Region, rng: np.random.Generator
):
    """Sector/band-restricted inverse-CDF sampling for large exclusions.

    Rectangle boundaries split the circle into angular cells; inside a cell
    the excluded set is a fixed union of type bands, so the allowed radial
    set is a union of intervals sampled by inverse CDF between their CDF
    values.  Strata = (cell, radial interval), picked by exact measure.
    """
    big_r = params.big_r
    bounds = set()
    for rect in excluded.rects:
        bounds.add(rect.theta_start % TWO_PI)
        bounds.add((rect.theta_start + rect.theta_width) % TWO_PI)
    cuts = np.sort(np.array(sorted(bounds)))
    starts = cuts
    widths = np.diff(np.append(cuts, cuts[0] + TWO_PI))
    strata = []  # (theta_start, width, F_lo, F_hi)
    for start, width in zip(starts, widths):
        if width <= 0.0:
            continue
        mid = (start + width / 2.0) % TWO_PI
        banned = sorted(
            (rect.t_lo, rect.t_hi) for rect in excluded.rects if rect.contains_angle(mid)
        )
        # allowed radii: [0, R] minus the banned bands mapped to r = R - t
        edges = [0.0]
        for t_lo, t_hi in reversed(banned):
            edges.extend([big_r - t_hi, big_r - t_lo])
        edges.append(big_r)
        for r_lo, r_hi in zip(edges[::2], edges[1::2]):
            if r_hi > r_lo:
                f_lo = radial_cdf(r_lo, params)
                f_hi = radial_cdf(r_hi, params)
                if f_hi > f_lo:
                    strata.append((start, width, f_lo, f_hi))
    weights = np.array([w * (f_hi - f_lo) for _, w, f_lo, f_hi in strata])
    pick = rng.choice(len(strata), size=count, p=weights / weights.sum())
    start_a = np.array([s[0] for s in strata])
    width_a = np.array([s[1] for s in strata])
    flo_a = np.array([s[2] for s in strata])
    fhi_a = np.array([s[3] for s in strata])
    theta = np.mod(start_a[pick] + rng.random(count) * width_a[pick], TWO_PI)
    u = flo_a[pick] + rng.random(count) * (fhi_a[pick] - flo_a[pick])
    r = radial_quantile(u, params)
    return r, theta


def sample_conditional(
    params: ModelParams,
    fixed: tuple[PolarPoint, ...] | list[PolarPoint],
    excluded: Region | None,
    seed: int,
) -> PointSet:
    """Fixed points plus a Poisson(n_target - |fixed|) process on the disk
    minus the excluded region."""
    fixed = tuple(fixed)
    if excluded is None:
        excluded = Region.empty(params)
    disk = area_disk(params.big_r, params.alpha)
    if excluded.measure >= disk * (1.0 - 1e-12):
        raise ValueError("excluded region covers the disk")
    if len(fixed) > params.n_target:
        raise ValueError("more fixed points than n_target")
    fixed_r = np.array([p.r for p in fixed])
    fixed_th = np.array([p.theta for p in fixed])
    if len(fixed) and excluded.contains(fixed_r, fixed_th).any():
        raise ValueError("fixed point lies inside the excluded region")
    rng = rng_for(seed, STREAM_SAMPLE)
    count = int(rng.poisson(params.n_target - len(fixed)))
    if excluded.is_empty():
        r, theta = _draw_uniform_disk(params, count, rng)
    else:
        r, theta = _sample_outside_region(params, count, excluded, rng)
    r = np.concatenate([fixed_r, r])
    theta = np.concatenate([fixed_th, theta])
    prov = Provenance("conditional", count, fixed=fixed, excluded=excluded)
    return _finish_point_set(params, r, theta, prov, (seed, STREAM_SAMPLE))


# ---------------------------------------------------------------------------
# persistence


def save_points(ps: PointSet, path: str | Path) -> None:
    """Binary point file: little-endian header then (r, theta) f64 records."""
    path = Path(path)
    header = _POINT_HEADER.pack(
        POINT_MAGIC,
        POINT_VERSION,
        len(ps),
        ps.params.alpha,
        ps.params.nu,
        ps.params.big_r,
        ps.seed[0],
        ps.seed[1],
    )
    records = np.column_stack([ps.r, ps.theta]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(records.tobytes())


def load_points(path: str | Path) -> PointSet:
    path = Path(path)
    with open(path, "rb") as fh:
        raw = fh.read(_POINT_HEADER.size)
        if len(raw) < _POINT_HEADER.size:
            raise ValueError(f"{path}: truncated point file header")
        magic, version, count, alpha, nu, big_r, seed0, seed1 = _POINT_HEADER.unpack(raw)
        if magic != POINT_MAGIC or version != POINT_VERSION:
            raise ValueError(
                f"{path}: bad point file header (magic={magic!r}, version={version})"
            )
        records = np.frombuffer(fh.read(16 * count), dtype="<f8")
    if len(records) != 2 * count:
        raise ValueError(f"{path}: point file shorter than its count field")
    records = records.reshape(count, 2)
    params = ModelParams.from_big_r(big_r, alpha, nu)
    return PointSet(
        params=params,
        r=records[:, 0].copy(),
        theta=records[:, 1].copy(),
        original_index=np.arange(count, dtype=np.int64),
        provenance=Provenance("file", count),
        seed=(seed0, seed1),
    )


def export_points_csv(ps: PointSet, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("r,theta,type\n")
        t = ps.types
        for i in range(len(ps)):
            fh.write(f"{ps.r[i]:.17g},{ps.theta[i]:.17g},{t[i]:.17g}\n")
