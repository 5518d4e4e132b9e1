"""Closed sets and point-to-set distances.

Subsystem states are tuples of floats.  Each set variant has a closed
form for the distance and for a minimizing witness, so no optimizer is
involved.  Distances to balls are measured in the ball's own norm; for
points and boxes the caller picks the norm (sup by default, which is
also the norm used componentwise across a network).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .errors import SpecError

Vector = tuple[float, ...]

SUP = "sup"
EUCLIDEAN = "euclidean"


def norm_of(v: Sequence[float], kind: str = SUP) -> float:
    if kind == SUP:
        return max(abs(c) for c in v) if v else 0.0
    if kind == EUCLIDEAN:
        return math.sqrt(math.fsum(c * c for c in v))
    raise SpecError(f"unknown norm {kind!r}")


class ClosedSet:
    """Base class for the closed target-set variants."""

    dim: int


@dataclass(frozen=True)
class PointSet(ClosedSet):
    at: Vector

    def __post_init__(self):
        object.__setattr__(self, "at", tuple(float(c) for c in self.at))

    @property
    def dim(self) -> int:
        return len(self.at)


@dataclass(frozen=True)
class BoxSet(ClosedSet):
    lower: Vector
    upper: Vector

    def __post_init__(self):
        lo = tuple(float(c) for c in self.lower)
        up = tuple(float(c) for c in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)
        if len(lo) != len(up):
            raise SpecError("box bounds must have equal length")
        if any(l > u for l, u in zip(lo, up)):
            raise SpecError("box needs lower <= upper componentwise")

    @property
    def dim(self) -> int:
        return len(self.lower)


@dataclass(frozen=True)
class BallSet(ClosedSet):
    center: Vector
    radius: float
    norm: str = SUP

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not (self.radius >= 0.0):
            raise SpecError("ball needs radius >= 0")
        if self.norm not in (SUP, EUCLIDEAN):
            raise SpecError(f"unknown norm {self.norm!r}")

    @property
    def dim(self) -> int:
        return len(self.center)


@dataclass(frozen=True)
class UnionSet(ClosedSet):
    members: tuple[ClosedSet, ...]

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise SpecError("union needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise SpecError("union members must share a dimension")

    @property
    def dim(self) -> int:
        return self.members[0].dim


class Projection(NamedTuple):
    distance: float
    witness: Vector


def _project(x: Vector, a: ClosedSet, norm: str) -> Projection:
    if len(x) != a.dim:
        raise SpecError(f"point has dim {len(x)}, set has dim {a.dim}")
    if isinstance(a, PointSet):
        delta = tuple(xc - ac for xc, ac in zip(x, a.at))
        return Projection(norm_of(delta, norm), a.at)
    if isinstance(a, BoxSet):
        y = tuple(min(max(xc, lo), up) for xc, lo, up in zip(x, a.lower, a.upper))
        delta = tuple(xc - yc for xc, yc in zip(x, y))
        return Projection(norm_of(delta, norm), y)
    if isinstance(a, BallSet):
        # Closed form only when the ambient norm matches the ball norm:
        # the witness is the radial point and the distance the norm excess.
        if norm != a.norm:
            raise SpecError(
                "distance to a ball is computed in the ball's own norm; "
                f"got ambient {norm!r} vs ball {a.norm!r}"
            )
        delta = tuple(xc - cc for xc, cc in zip(x, a.center))
        d = norm_of(delta, norm)
        if d <= a.radius:
            return Projection(0.0, x)
        scale = a.radius / d
        y = tuple(cc + scale * dc for cc, dc in zip(a.center, delta))
        return Projection(d - a.radius, y)
    if isinstance(a, UnionSet):
        best: Projection | None = None
        for m in a.members:
            p = _project(x, m, norm)
            if best is None or p.distance < best.distance:
                best = p
        assert best is not None
        return best
    raise SpecError(f"unknown set type {type(a).__name__}")


def dist(x: Sequence[float], a: ClosedSet, norm: str = SUP) -> float:
    """Distance from x to the set in the chosen norm."""
    return _project(tuple(float(c) for c in x), a, norm).distance


def nearest_point(x: Sequence[float], a: ClosedSet, norm: str = SUP) -> Vector:
    """A point of the set attaining the distance (ties broken by member order)."""
    return _project(tuple(float(c) for c in x), a, norm).witness


def dist_product(
    window: Mapping[int, Vector],
    sets: Callable[[int], ClosedSet],
    norm: str = SUP,
) -> float:
    """Distance to a product set: sup of componentwise distances.

    The window maps subsystem indices to state tuples; only stored
    entries participate, so the value is a sup over the window.
    """
    worst = 0.0
    for i in sorted(window):
        d = dist(window[i], sets(i), norm)
        if d > worst:
            worst = d
    return worst


@dataclass(frozen=True)
class UniformBoundCheck:
    bounded: bool
    bound: float | None
    radii: tuple[float, ...]
    fitted_slope: float
    witness_index: int


def set_radius(a: ClosedSet) -> float:
    """Sup norm bound on the set: sup over the set of the sup norm."""
    if isinstance(a, PointSet):
        return norm_of(a.at, SUP)
    if isinstance(a, BoxSet):
        return max(max(abs(l), abs(u)) for l, u in zip(a.lower, a.upper))
    if isinstance(a, BallSet):
        # Stated in the ball's own norm; for the euclidean ball this is
        # still an upper bound on the sup norm of its points.
        return norm_of(a.center, SUP) + a.radius
    if isinstance(a, UnionSet):
        return max(set_radius(m) for m in a.members)
    raise SpecError(f"unknown set type {type(a).__name__}")


def uniformly_bounded(
    sets: Callable[[int], ClosedSet],
    sample_n: int,
    slope_tol: float = 1e-9,
) -> UniformBoundCheck:
    """Sampled check that the family of sets shares one norm bound.

    Computes the radius of each set over indices 1..sample_n and fits a
    least-squares line radius ~ index.  A slope within slope_tol counts
    as bounded and the bound is the max radius seen; otherwise the fit
    slope and the index of the largest radius are the violation witness.
    """
    if sample_n < 2:
        raise SpecError("need at least two sampled indices")
    radii = tuple(set_radius(sets(i)) for i in range(1, sample_n + 1))
    n = float(sample_n)
    mean_i = (n + 1.0) / 2.0
    mean_r = math.fsum(radii) / n
    sxx = math.fsum((i - mean_i) ** 2 for i in range(1, sample_n + 1))
    sxy = math.fsum((i - mean_i) * (r - mean_r) for i, r in enumerate(radii, start=1))
    slope = sxy / sxx
    worst = max(range(sample_n), key=lambda j: radii[j])
    bounded = slope <= slope_tol
    return UniformBoundCheck(
        bounded=bounded,
        bound=max(radii) if bounded else None,
        radii=radii,
        fitted_slope=slope,
        witness_index=worst + 1,
    )


class MetricValue(NamedTuple):
    value: float
    tail_bound: float


def extended_metric(
    x: Mapping[int, Vector] | Callable[[int], Vector],
    y: Mapping[int, Vector] | Callable[[int], Vector],
    terms: int,
) -> MetricValue:
    """Truncated product-topology metric sum(2**-i d_i / (1 + d_i)).

    d_i is the sup-norm difference of the i-th states.  The remainder of
    the series is below 2**-terms regardless of the states, which is
    returned as the tail bound.
    """
    if terms < 1:
        raise SpecError("need at least one term")

    def get(w, i: int) -> Vector:
        return w(i) if callable(w) else w[i]

    total = 0.0
    for i in range(1, terms + 1):
        xi, yi = get(x, i), get(y, i)
        if len(xi) != len(yi):
            raise SpecError(f"state dim mismatch at index {i}")
        d = norm_of(tuple(a - b for a, b in zip(xi, yi)), SUP)
        total += 2.0 ** (-i) * d / (1.0 + d)
    return MetricValue(total, 2.0 ** (-terms))


# ---------------------------------------------------------------------------
# JSON forms.


def set_to_json(a: ClosedSet) -> dict:
    if isinstance(a, PointSet):
        return {"kind": "point", "at": list(a.at)}
    if isinstance(a, BoxSet):
        return {"kind": "box", "lower": list(a.lower), "upper": list(a.upper)}
    if isinstance(a, BallSet):
        return {"kind": "ball", "center": list(a.center), "radius": a.radius, "norm": a.norm}
    if isinstance(a, UnionSet):
        return {"kind": "union", "members": [set_to_json(m) for m in a.members]}
    raise SpecError(f"cannot serialize set of type {type(a).__name__}")


def set_from_json(data: dict) -> ClosedSet:
    kind = data.get("kind")
    if kind == "point":
        return PointSet(tuple(data["at"]))
    if kind == "box":
        return BoxSet(tuple(data["lower"]), tuple(data["upper"]))
    if kind == "ball":
        return BallSet(tuple(data["center"]), float(data["radius"]), data.get("norm", SUP))
    if kind == "union":
        return UnionSet(tuple(set_from_json(m) for m in data["members"]))
    raise SpecError(f"unknown set kind {kind!r}")
