"""Geometry of the radius-R disk on the hyperbolic plane of curvature -alpha^2.

Positions are polar coordinates (r, theta) on the curvature -1 plane; the
model's alpha only enters through the radial law and area measure.  The
"type" of a point at radius r is t = R - r, its distance from the disk
boundary.  Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PolarPoint",
    "ModelParams",
    "TubeParams",
    "TubeClass",
    "ORIGIN",
    "TWO_PI",
    "hyperbolic_distance",
    "pair_sep_sq",
    "within_distance",
    "relative_angle",
    "signed_angle",
    "radial_cdf",
    "radial_quantile",
    "area_disk",
    "circle_length",
    "tube_threshold",
    "tube_classify",
    "above_edge",
    "calibrate_tube_cutoff",
]

TWO_PI = 2.0 * math.pi

# cosh/sinh arguments beyond this overflow float64 long before; reject early.
_MAX_HYP_ARG = 700.0


def _check_hyp_arg(x: float, what: str) -> None:
    if x > _MAX_HYP_ARG:
        raise ValueError(f"{what} = {x:g} exceeds the numerical range (argument > {_MAX_HYP_ARG:g})")


@dataclass(frozen=True)
class PolarPoint:
    """A point (r, theta) with r >= 0 and theta in [0, 2*pi)."""

    r: float
    theta: float

    def __post_init__(self) -> None:
        if not (self.r >= 0.0 and math.isfinite(self.r)):
            raise ValueError(f"radius must be finite and >= 0, got {self.r}")
        if not (0.0 <= self.theta < TWO_PI):
            raise ValueError(f"angle must lie in [0, 2*pi), got {self.theta}")

    def type_for(self, big_r: float) -> float:
        """Type t = R - r; distance from the boundary of the radius-R disk."""
        return big_r - self.r


ORIGIN = PolarPoint(0.0, 0.0)


@dataclass(frozen=True)
class ModelParams:
    """Model parameters (n_target, alpha, nu) with the derived disk radius R.

    R satisfies n_target = nu * e^{R/2}.  The derived constants:

    * ``tau``: 1 / ln(1/(2*alpha - 1)), defined only for 1/2 < alpha < 1,
    * ``delta``: 2*(1 - alpha)/(2*alpha - 1), defined only for 1/2 < alpha < 1,
    * ``lambda_alpha``: alpha/(2*alpha - 1), defined for alpha > 1/2,

    are reported as None outside their ranges.
    """

    n_target: float
    alpha: float
    nu: float
    big_r: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0):
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not (self.nu > 0.0):
            raise ValueError(f"nu must be > 0, got {self.nu}")
        if not (self.n_target > 0.0):
            raise ValueError(f"n_target must be > 0, got {self.n_target}")
        if not (self.big_r > 0.0):
            raise ValueError(f"big_r must be > 0, got {self.big_r}")
        _check_hyp_arg(self.big_r, "R")
        _check_hyp_arg(self.alpha * self.big_r, "alpha*R")
        if not math.isclose(self.n_target, self.nu * math.exp(self.big_r / 2.0), rel_tol=1e-9):
            raise ValueError("big_r inconsistent with n_target = nu * e^(R/2)")

    @classmethod
    def from_n(cls, n_target: float, alpha: float, nu: float = 1.0) -> "ModelParams":
        if n_target <= 0 or nu <= 0:
            raise ValueError("n_target and nu must be positive")
        return cls(float(n_target), float(alpha), float(nu), 2.0 * math.log(n_target / nu))

    @classmethod
    def from_big_r(cls, big_r: float, alpha: float, nu: float = 1.0) -> "ModelParams":
        return cls(nu * math.exp(big_r / 2.0), float(alpha), float(nu), float(big_r))

    @property
    def tau(self) -> float | None:
        if not 0.5 < self.alpha < 1.0:
            return None
        return 1.0 / math.log(1.0 / (2.0 * self.alpha - 1.0))

    @property
    def delta(self) -> float | None:
        if not 0.5 < self.alpha < 1.0:
            return None
        return 2.0 * (1.0 - self.alpha) / (2.0 * self.alpha - 1.0)

    @property
    def lambda_alpha(self) -> float | None:
        if not self.alpha > 0.5:
            return None
        return self.alpha / (2.0 * self.alpha - 1.0)


@dataclass(frozen=True)
class TubeParams:
    """Slack eps and type-sum cutoff c0 for the tube characterization."""

    eps: float = 0.2
    c0: float = 10.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.c0 > 0.0:
            raise ValueError(f"c0 must be > 0, got {self.c0}")


class TubeClass(enum.Enum):
    INNER = "inner"
    ANNULUS = "annulus"
    OUTSIDE = "outside"
    NOT_APPLICABLE = "not_applicable"


# ---------------------------------------------------------------------------
# distances and angles


def _wrap_angle_diff(dtheta):
    """Map an angle difference to the relative angle in [0, pi].

    Reduces |dtheta| first so the result is bit-exactly symmetric in the
    argument order.
    """
    d = np.mod(np.abs(dtheta), TWO_PI)
    return np.minimum(d, TWO_PI - d)


def pair_sep_sq(r1, theta1, r2, theta2):
    """sinh^2(d/2) for point pairs; the monotone separation the predicate uses.

    Identity: cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos(dtheta) implies
    sinh^2(d/2) = sinh^2((r1-r2)/2) + sinh r1 sinh r2 sin^2(dtheta/2), which
    has no cancellation.  Vectorized over numpy arrays.
    """
    half = _wrap_angle_diff(np.asarray(theta1) - np.asarray(theta2)) / 2.0
    radial = np.sinh((np.asarray(r1) - np.asarray(r2)) / 2.0) ** 2
    return radial + np.sinh(r1) * np.sinh(r2) * np.sin(half) ** 2


def within_distance(r1, theta1, r2, theta2, big_r: float):
    """Closed-ball adjacency predicate d <= R, vectorized."""
    return pair_sep_sq(r1, theta1, r2, theta2) <= math.sinh(big_r / 2.0) ** 2


def hyperbolic_distance(u: PolarPoint, v: PolarPoint) -> float:
    """Curvature -1 distance; equals the hyperbolic law of cosines exactly."""
    _check_hyp_arg(u.r, "r")
    _check_hyp_arg(v.r, "r")
    return 2.0 * math.asinh(math.sqrt(float(pair_sep_sq(u.r, u.theta, v.r, v.theta))))


def relative_angle(u: PolarPoint, v: PolarPoint) -> float:
    """Smaller angle at the origin between u and v, in [0, pi]."""
    return float(_wrap_angle_diff(u.theta - v.theta))


def signed_angle(u: PolarPoint, v: PolarPoint) -> float:
    """Relative angle with orientation, in (-pi, pi].

    Positive when v lies anticlockwise of u along the shorter arc, negative
    when clockwise.  The antipodal tie (relative angle exactly pi) counts as
    anticlockwise, +pi.
    """
    d = math.fmod(v.theta - u.theta, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    if d > math.pi:
        d -= TWO_PI
    return d


def signed_angles_from(theta0: float, thetas: np.ndarray) -> np.ndarray:
    """Vectorized signed angles from a reference angle, in (-pi, pi]."""
    d = np.mod(np.asarray(thetas, dtype=float) - theta0, TWO_PI)
    return np.where(d > math.pi, d - TWO_PI, d)


# ---------------------------------------------------------------------------
# radial law, areas


def _cosh_minus_one(x):
    # cosh(x) - 1 without cancellation for small x
    return 2.0 * np.sinh(np.asarray(x) / 2.0) ** 2


def _acosh_one_plus(x):
    # acosh(1 + x) for x >= 0, stable near 0
    x = np.asarray(x)
    return np.log1p(x + np.sqrt(x * (x + 2.0)))


def radial_cdf(r, params: ModelParams):
    """F(r) = (cosh(alpha r) - 1) / (cosh(alpha R) - 1) on [0, R]."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r > params.big_r):
        raise ValueError("radius outside [0, R]")
    num = np.sinh(params.alpha * r / 2.0) ** 2
    den = math.sinh(params.alpha * params.big_r / 2.0) ** 2
    out = num / den
    return float(out) if np.isscalar(r) or out.ndim == 0 else out

def radial_quantile(u, params: ModelParams):
    """Inverse of radial_cdf: r = acosh(1 + u*(cosh(alpha R) - 1)) / alpha."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise ValueError("quantile argument outside [0, 1]")
    span = _cosh_minus_one(params.alpha * params.big_r)
    r = _acosh_one_plus(u * span) / params.alpha
    r = np.minimum(r, params.big_r)
    return float(r) if np.isscalar(u) or r.ndim == 0 else r


def area_disk(radius: float, alpha: float) -> float:
    """Area of the radius-r disk under curvature -alpha^2: (2pi/a^2)(cosh(ar)-1)."""
    if radius < 0.0 or alpha <= 0.0:
        raise ValueError("need radius >= 0 and alpha > 0")
    _check_hyp_arg(alpha * radius, "alpha*radius")
    return (TWO_PI / alpha**2) * float(_cosh_minus_one(alpha * radius))


def circle_length(radius: float, alpha: float) -> float:
    """Circumference of the radius-r circle under curvature -alpha^2."""
    if radius < 0.0 or alpha <= 0.0:
        raise ValueError("need radius >= 0 and alpha > 0")
    _check_hyp_arg(alpha * radius, "alpha*radius")
    return (TWO_PI / alpha) * math.sinh(alpha * radius)


# ---------------------------------------------------------------------------
# tube characterization of adjacency


def tube_threshold(t_u, t_v, params: ModelParams, eps: float, kind: str):
    """Angular threshold min{2(1 +/- eps)(nu/N) e^{(t_u+t_v)/2}, pi}.

    kind "outer" uses (1+eps), kind "inner" uses (1-eps).  Evaluated as
    2(1 +/- eps) e^{(t_u+t_v-R)/2} so only R enters; vectorized.
    """
    if kind == "outer":
        factor = 1.0 + eps
    elif kind == "inner":
        factor = 1.0 - eps
    else:
        raise ValueError(f"kind must be 'inner' or 'outer', got {kind!r}")
    t_u = np.asarray(t_u, dtype=float)
    t_v = np.asarray(t_v, dtype=float)
    raw = 2.0 * factor * np.exp((t_u + t_v - params.big_r) / 2.0)
    out = np.minimum(raw, math.pi)
    return float(out) if out.ndim == 0 else out


def tube_classify(u: PolarPoint, v: PolarPoint, params: ModelParams, tube: TubeParams) -> TubeClass:
    """Classify v's position relative to u's tubes.

    NOT_APPLICABLE when t_u + t_v >= R - c0 (the characterization holds only
    below the cutoff); otherwise INNER / OUTSIDE by the two thresholds, and
    ANNULUS in between.
    """
    t_u = u.type_for(params.big_r)
    t_v = v.type_for(params.big_r)
    if t_u + t_v >= params.big_r - tube.c0:
        return TubeClass.NOT_APPLICABLE
    theta = relative_angle(u, v)
    if theta <= tube_threshold(t_u, t_v, params, tube.eps, "inner"):
        return TubeClass.INNER
    if theta > tube_threshold(t_u, t_v, params, tube.eps, "outer"):
        return TubeClass.OUTSIDE
    return TubeClass.ANNULUS


def calibrate_tube_cutoff(
    params: ModelParams,
    eps: float = 0.2,
    c0: float = 10.0,
    num_pairs: int = 1_000_000,
    seed: int = 0,
    step: float = 2.0,
    max_c0: float = 60.0,
) -> TubeParams:
    """Raise c0 until tube classification never disagrees with the distance.

    Disagreement means INNER with d > R or OUTSIDE with d <= R over num_pairs
    random pairs drawn from the model's radial law.  The characterization
    only guarantees such a c0 exists, not its value.
    """
    rng = np.random.Generator(np.random.Philox(key=[seed, 4]))
    r1 = radial_quantile(rng.random(num_pairs), params)
    r2 = radial_quantile(rng.random(num_pairs), params)
    th1 = rng.random(num_pairs) * TWO_PI
    th2 = rng.random(num_pairs) * TWO_PI
    adjacent = within_distance(r1, th1, r2, th2, params.big_r)
    t_sum = 2.0 * params.big_r - r1 - r2
    theta = _wrap_angle_diff(th1 - th2)
    inner = theta <= tube_threshold(params.big_r - r1, params.big_r - r2, params, eps, "inner")
    outer = theta > tube_threshold(params.big_r - r1, params.big_r - r2, params, eps, "outer")
    while c0 <= max_c0:
        applicable = t_sum < params.big_r - c0
        bad_inner = applicable & inner & ~adjacent
        bad_outer = applicable & outer & adjacent
        if not (bad_inner.any() or bad_outer.any()):
            return TubeParams(eps=eps, c0=c0)
        c0 += step
    raise RuntimeError(f"tube calibration failed to converge below c0 = {max_c0}")


# ---------------------------------------------------------------------------
# triangle containment


def _hyperboloid(p: PolarPoint) -> np.ndarray:
    return np.array(
        [math.cosh(p.r), math.sinh(p.r) * math.cos(p.theta), math.sinh(p.r) * math.sin(p.theta)]
    )


def above_edge(w: PolarPoint, u1: PolarPoint, u2: PolarPoint, big_r: float, tol: float = 1e-12) -> bool:
    """True iff w lies in the (closed) hyperbolic triangle formed by the
    origin and the edge endpoints u1, u2.

    Requires u1u2 to be an edge (d(u1, u2) <= R).  Geodesics are central
    plane sections in the hyperboloid embedding, so side membership reduces
    to determinant signs; relative tolerance tol puts near-boundary points on
    the boundary, which counts as above.
    """
    if hyperbolic_distance(u1, u2) > big_r:
        raise ValueError("u1u2 is not an edge: hyperbolic distance exceeds R")
    a = np.array([1.0, 0.0, 0.0])  # origin
    b = _hyperboloid(u1)
    c = _hyperboloid(u2)
    x = _hyperboloid(w)
    sides = (
        np.dot(np.cross(a, b), x),
        np.dot(np.cross(b, c), x),
        np.dot(np.cross(c, a), x),
    )
    scales = (
        float(np.linalg.norm(b) * np.linalg.norm(x)),
        float(np.linalg.norm(b) * np.linalg.norm(c) * np.linalg.norm(x)),
        float(np.linalg.norm(c) * np.linalg.norm(x)),
    )
    orient = float(np.dot(np.cross(a, b), c))
    orient_scale = float(np.linalg.norm(b) * np.linalg.norm(c))
    if abs(orient) <= tol * orient_scale:
        # Degenerate triangle (origin and endpoints coplanar through the
        # axis): only its boundary remains, which counts as above.
        return all(abs(s) <= tol * sc for s, sc in zip(sides, scales))
    sign = 1.0 if orient > 0 else -1.0
    return all(sign * s >= -tol * sc for s, sc in zip(sides, scales))
