"""Comparison-function algebra for gain bookkeeping.

Gains are nonnegative, nondecreasing scalar maps with g(0) = 0, kept as
a closed set of variants so they can be serialized, composed and
checked symbolically where possible and on sample grids otherwise.
Class membership (K, K-infinity) is only ever certified on a sampled
grid; verdicts say "candidate" for that reason.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GainDomainError

# Strictness margin used when deciding "strictly increasing" from samples.
STRICT_TOL = 1e-12


def _check_domain(r: float) -> float:
    r = float(r)
    if math.isnan(r) or r < 0.0:
        raise GainDomainError(f"gain evaluated at r = {r!r}, domain is r >= 0")
    return r


class ScalarGain:
    """Base class; subclasses implement _value on the checked argument."""

    def __call__(self, r: float) -> float:
        return self._value(_check_domain(r))

    def _value(self, r: float) -> float:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Zero(ScalarGain):
    def _value(self, r: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Linear(ScalarGain):
    slope: float

    def __post_init__(self):
        if not (self.slope >= 0.0):
            raise GainDomainError(f"linear gain needs slope >= 0, got {self.slope}")

    def _value(self, r: float) -> float:
        return self.slope * r


@dataclass(frozen=True)
class Power(ScalarGain):
    coeff: float
    exponent: float

    def __post_init__(self):
        if not (self.coeff >= 0.0):
            raise GainDomainError(f"power gain needs coeff >= 0, got {self.coeff}")
        if not (self.exponent > 0.0):
            raise GainDomainError(f"power gain needs exponent > 0, got {self.exponent}")

    def _value(self, r: float) -> float:
        return self.coeff * r ** self.exponent


@dataclass(frozen=True)
class PiecewiseLinear(ScalarGain):
    """Breakpoints ((r0, v0), ..., (rn, vn)) with r0 = v0 = 0.

    Between breakpoints the value is linear; past the last breakpoint
    the final segment slope continues, so the function stays defined on
    all of [0, inf).
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(r), float(v)) for r, v in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise GainDomainError("piecewise gain needs at least two breakpoints")
        if pts[0] != (0.0, 0.0):
            raise GainDomainError("piecewise gain must start at (0, 0)")
        for (r1, v1), (r2, v2) in zip(pts, pts[1:]):
            if not (r2 > r1):
                raise GainDomainError("piecewise breakpoints must strictly increase in r")
            if v2 < v1:
                raise GainDomainError("piecewise values must be nondecreasing")

    def _value(self, r: float) -> float:
        pts = self.points
        if r >= pts[-1][0]:
            (r1, v1), (r2, v2) = pts[-2], pts[-1]
            slope = (v2 - v1) / (r2 - r1)
            return v2 + slope * (r - r2)
        for (r1, v1), (r2, v2) in zip(pts, pts[1:]):
            if r <= r2:
                t = (r - r1) / (r2 - r1)
                return v1 + t * (v2 - v1)
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class MaxOf(ScalarGain):
    parts: tuple[ScalarGain, ...]

    def __post_init__(self):
        if not self.parts:
            raise GainDomainError("max gain needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def _value(self, r: float) -> float:
        return max(p(r) for p in self.parts)


@dataclass(frozen=True)
class SumOf(ScalarGain):
    parts: tuple[ScalarGain, ...]

    def __post_init__(self):
        if not self.parts:
            raise GainDomainError("sum gain needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def _value(self, r: float) -> float:
        return math.fsum(p(r) for p in self.parts)


@dataclass(frozen=True)
class Compose(ScalarGain):
    outer: ScalarGain
    inner: ScalarGain

    def _value(self, r: float) -> float:
        return self.outer(self.inner(r))


def evaluate(g: ScalarGain, r: float) -> float:
    return g(r)


def compose(outer: ScalarGain, inner: ScalarGain) -> ScalarGain:
    return Compose(outer, inner)


def iterate_gain(g: ScalarGain, k: int) -> ScalarGain:
    """k-fold composition of g with itself; k = 0 gives the identity."""
    if k < 0:
        raise GainDomainError("iteration count must be >= 0")
    if k == 0:
        return Linear(1.0)
    out = g
    for _ in range(k - 1):
        out = Compose(out, g)
    return out


def invert(g: ScalarGain) -> ScalarGain:
    """Closed-form inverse, available for Linear and Power variants."""
    if isinstance(g, Linear):
        if g.slope == 0.0:
            raise GainDomainError("zero-slope linear gain has no inverse")
        return Linear(1.0 / g.slope)
    if isinstance(g, Power):
        if g.coeff == 0.0:
            raise GainDomainError("zero-coefficient power gain has no inverse")
        return Power(g.coeff ** (-1.0 / g.exponent), 1.0 / g.exponent)
    raise GainDomainError(f"no closed-form inverse for {type(g).__name__}")


@dataclass(frozen=True)
class IdentityCheck:
    below_identity: bool
    margin: float
    witness_r: float


def is_less_than_identity(g: ScalarGain, radius: float, grid_n: int = 256) -> IdentityCheck:
    """Sampled test of g(r) < r on (0, radius].

    Returns the minimum of r - g(r) over the grid and the argmin as a
    witness.  The grid excludes r = 0 where equality always holds.
    """
    if radius <= 0 or grid_n < 1:
        raise GainDomainError("radius must be positive and grid_n >= 1")
    margin = math.inf
    witness = radius
    for j in range(1, grid_n + 1):
        r = radius * j / grid_n
        m = r - g(r)
        if m < margin:
            margin = m
            witness = r
    return IdentityCheck(margin > 0.0, margin, witness)


def sampled_class_check(
    g: ScalarGain,
    radius: float = 10.0,
    grid_n: int = 256,
    kinf_threshold: float = 1.0,
) -> str:
    """Grid verdict on class membership.

    Returns one of "zero", "K", "K-infinity-candidate", "not-K".  A gain
    counts as strictly increasing when consecutive samples satisfy
    g(r2) - g(r1) > STRICT_TOL * max(1, g(r2)).  Unboundedness cannot be
    decided from samples; the K-infinity verdict is a candidate flag
    triggered when g(radius) >= kinf_threshold.
    """
    if radius <= 0 or grid_n < 2:
        raise GainDomainError("radius must be positive and grid_n >= 2")
    if g(0.0) != 0.0:
        return "not-K"
    values = [g(radius * j / grid_n) for j in range(grid_n + 1)]
    if all(v == 0.0 for v in values):
        return "zero"
    for v1, v2 in zip(values, values[1:]):
        if not (v2 - v1 > STRICT_TOL * max(1.0, v2)):
            return "not-K"
    if values[-1] >= kinf_threshold:
        return "K-infinity-candidate"
    return "K"


# ---------------------------------------------------------------------------
# KL bounds: decay envelopes in the initial distance and the step count.


class KLBound:
    def __call__(self, r: float, k: int) -> float:
        if k < 0:
            raise GainDomainError("KL bound evaluated at negative step")
        return self._value(_check_domain(r), int(k))

    def _value(self, r: float, k: int) -> float:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(KLBound):
    """beta(r, k) = scale * rate**k * r with rate in [0, 1)."""

    scale: float
    rate: float

    def __post_init__(self):
        if not (self.scale >= 0.0):
            raise GainDomainError("exponential bound needs scale >= 0")
        if not (0.0 <= self.rate < 1.0):
            raise GainDomainError("exponential bound needs rate in [0, 1)")

    def _value(self, r: float, k: int) -> float:
        return self.scale * self.rate ** k * r


@dataclass(frozen=True)
class ProductBound(KLBound):
    """beta(r, k) = gain(r) * decay[k], decay strictly decreasing to 0.

    Steps past the recorded decay samples evaluate to 0, which keeps the
    bound nonincreasing in k.
    """

    gain: ScalarGain
    decay: tuple[float, ...]

    def __post_init__(self):
        d = tuple(float(v) for v in self.decay)
        object.__setattr__(self, "decay", d)
        if not d:
            raise GainDomainError("product bound needs at least one decay sample")
        if any(v < 0.0 for v in d):
            raise GainDomainError("decay samples must be nonnegative")
        for v1, v2 in zip(d, d[1:]):
            if not (v2 < v1):
                raise GainDomainError("decay samples must strictly decrease")

    def _value(self, r: float, k: int) -> float:
        if k < len(self.decay):
            return self.gain(r) * self.decay[k]
        return 0.0


# ---------------------------------------------------------------------------
# JSON round-trip.  Kind tags double as the schema documented in docs/.


def gain_to_json(g: ScalarGain) -> dict:
    if isinstance(g, Zero):
        return {"kind": "zero"}
    if isinstance(g, Linear):
        return {"kind": "linear", "slope": g.slope}
    if isinstance(g, Power):
        return {"kind": "power", "coeff": g.coeff, "exponent": g.exponent}
    if isinstance(g, PiecewiseLinear):
        return {"kind": "piecewise", "points": [list(p) for p in g.points]}
    if isinstance(g, MaxOf):
        return {"kind": "max", "parts": [gain_to_json(p) for p in g.parts]}
    if isinstance(g, SumOf):
        return {"kind": "sum", "parts": [gain_to_json(p) for p in g.parts]}
    if isinstance(g, Compose):
        return {"kind": "compose", "outer": gain_to_json(g.outer), "inner": gain_to_json(g.inner)}
    raise GainDomainError(f"cannot serialize gain of type {type(g).__name__}")


def gain_from_json(data: dict) -> ScalarGain:
    kind = data.get("kind")
    if kind == "zero":
        return Zero()
    if kind == "linear":
        return Linear(float(data["slope"]))
    if kind == "power":
        return Power(float(data["coeff"]), float(data["exponent"]))
    if kind == "piecewise":
        return PiecewiseLinear(tuple((float(r), float(v)) for r, v in data["points"]))
    if kind == "max":
        return MaxOf(tuple(gain_from_json(p) for p in data["parts"]))
    if kind == "sum":
        return SumOf(tuple(gain_from_json(p) for p in data["parts"]))
    if kind == "compose":
        return Compose(gain_from_json(data["outer"]), gain_from_json(data["inner"]))
    raise GainDomainError(f"unknown gain kind {kind!r}")


def kl_to_json(b: KLBound) -> dict:
    if isinstance(b, Exponential):
        return {"kind": "exponential", "scale": b.scale, "rate": b.rate}
    if isinstance(b, ProductBound):
        return {"kind": "product", "gain": gain_to_json(b.gain), "decay": list(b.decay)}
    raise GainDomainError(f"cannot serialize KL bound of type {type(b).__name__}")


def kl_from_json(data: dict) -> KLBound:
    kind = data.get("kind")
    if kind == "exponential":
        return Exponential(float(data["scale"]), float(data["rate"]))
    if kind == "product":
        return ProductBound(gain_from_json(data["gain"]), tuple(data["decay"]))
    raise GainDomainError(f"unknown KL bound kind {kind!r}")
