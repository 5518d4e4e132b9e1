"""Finite-step stability certificates and their numeric verification.

A certificate for a network is a family of per-subsystem storage
functions W_i together with a gain table: internal gains bounding how
W_i after M steps depends on the W_j of the subsystems that can reach i
within M steps, and input gains bounding the influence of the external
input.  The checks here evaluate the defining inequalities on grids and
report residuals; passing is a sampled verdict on the grid, never a
proof over the continuum.

The M-step decrease inequality checked for each class representative i:

    W_i(x_i(M)) <= max( max_j gamma_ij(W_j(xi_j)),  gamma_iu(||u||) )

with j ranging over the dependency cone of {i} at depth M.  Gains for
pairs outside the cone cannot influence x_i(M) and are treated as zero.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .comparison import STRICT_TOL, KLBound, Linear, ScalarGain, Zero
from .distance import ClosedSet, Vector, dist, nearest_point
from .errors import GainDomainError, SpecError
from .network import NetworkSpec
from .report import CertificateReport, ReportBuilder, Tolerances
from .rng import SplitMix64, derive
from .sim import Trajectory, dependency_cone, iterate_M


# ---------------------------------------------------------------------------
# Storage functions.


class StorageVariant:
    """Closed set of storage shapes, evaluated against the target set."""

    def value(self, x: Vector, target: ClosedSet) -> float:  # pragma: no cover
        raise NotImplementedError


@dataclass(frozen=True)
class ScaledDistance(StorageVariant):
    """W(x) = weight * |x|_A in the chosen norm."""

    weight: float = 1.0
    norm: str = "sup"

    def value(self, x: Vector, target: ClosedSet) -> float:
        return self.weight * dist(x, target, self.norm)


@dataclass(frozen=True)
class PowerDistance(StorageVariant):
    """W(x) = |x|_A ** exponent."""

    exponent: float = 1.0
    norm: str = "sup"

    def value(self, x: Vector, target: ClosedSet) -> float:
        return dist(x, target, self.norm) ** self.exponent


@dataclass(frozen=True)
class QuadraticDeviation(StorageVariant):
    """W(x) = d' P d with d = x - proj_A(x)."""

    matrix: tuple[tuple[float, ...], ...]
    norm: str = "sup"

    def value(self, x: Vector, target: ClosedSet) -> float:
        y = nearest_point(x, target, self.norm)
        d = tuple(a - b for a, b in zip(x, y))
        total = 0.0
        for r, row in enumerate(self.matrix):
            for c, p in enumerate(row):
                total += p * d[r] * d[c]
        return total


@dataclass(frozen=True)
class ClassStorage:
    variant: StorageVariant
    lower: ScalarGain
    upper: ScalarGain


class StorageFamily:
    """Per-class storage functions with comparison envelopes.

    lower/upper per class sandwich W_i between functions of the set
    distance; omega_lower/omega_upper are the uniform envelopes shared
    by every class.  The family holds its own set and class rules so it
    can be evaluated without the originating network at hand.
    """

    def __init__(
        self,
        per_class: Mapping[str, ClassStorage],
        assign: Callable[[int], str],
        sets: Callable[[int], ClosedSet],
        omega_lower: ScalarGain,
        omega_upper: ScalarGain,
        norm: str = "sup",
    ):
        if not per_class:
            raise SpecError("storage family needs at least one class")
        self.per_class = dict(per_class)
        self.assign = assign
        self.sets = sets
        self.omega_lower = omega_lower
        self.omega_upper = omega_upper
        self.norm = norm

    def class_storage(self, i: int) -> ClassStorage:
        cid = self.assign(i)
        got = self.per_class.get(cid)
        if got is None:
            raise SpecError(f"no storage for class {cid!r}")
        return got

    def value(self, i: int, x: Vector) -> float:
        return self.class_storage(i).variant.value(tuple(x), self.sets(i))

    def set_distance(self, i: int, x: Vector) -> float:
        return dist(x, self.sets(i), self.norm)

    @classmethod
    def uniform(
        cls,
        spec: NetworkSpec,
        variant: StorageVariant,
        lower: ScalarGain,
        upper: ScalarGain,
    ) -> "StorageFamily":
        """Same storage shape and envelopes for every class of the network."""
        per_class = {cid: ClassStorage(variant, lower, upper) for cid in spec.classes}
        return cls(
            per_class,
            assign=spec.class_of,
            sets=spec.target_set,
            omega_lower=lower,
            omega_upper=upper,
        )


def overall_V(family: StorageFamily, window: Mapping[int, Vector]) -> float:
    """Network storage: sup of W_i over the stored window entries."""
    best = 0.0
    for i in window:
        v = family.value(i, window[i])
        if v > best:
            best = v
    return best


# ---------------------------------------------------------------------------
# Gain tables.


_WILD = "*"


class GainTable:
    """Internal and input gains, plus the uniform envelopes.

    internal is keyed by (class_i, class_j, role) where role is "self",
    a neighbor slot "n0", "n1", ..., or "cone" for cone members beyond
    direct neighbors; "*" wildcards any position.  Lookup tries the most
    specific key first and falls back to Zero, which encodes that pairs
    outside the recorded structure carry no influence bound.
    """

    def __init__(
        self,
        internal: Mapping[tuple[str, str, str], ScalarGain],
        input_gains: Mapping[str, ScalarGain],
        alpha: ScalarGain,
        gamma_u_bar: ScalarGain,
    ):
        self.internal = dict(internal)
        self.input_gains = dict(input_gains)
        self.alpha = alpha
        self.gamma_u_bar = gamma_u_bar

    def internal_gain(self, class_i: str, class_j: str, role: str) -> ScalarGain:
        for key in (
            (class_i, class_j, role),
            (class_i, _WILD, role),
            (class_i, class_j, _WILD),
            (class_i, _WILD, _WILD),
            (_WILD, _WILD, _WILD),
        ):
            got = self.internal.get(key)
            if got is not None:
                return got
        return Zero()

    def input_gain(self, class_i: str) -> ScalarGain:
        got = self.input_gains.get(class_i)
        if got is not None:
            return got
        return self.input_gains.get(_WILD, Zero())

    @classmethod
    def uniform(cls, internal: ScalarGain, input_gain: ScalarGain, alpha: ScalarGain, gamma_u_bar: ScalarGain) -> "GainTable":
        return cls({(_WILD, _WILD, _WILD): internal}, {_WILD: input_gain}, alpha, gamma_u_bar)


def small_gain_check(
    gains: GainTable,
    radius: float,
    grid_n: int = 256,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """Uniformity of the table: every internal gain below alpha, every
    input gain below gamma_u_bar, and alpha strictly below identity on
    the sampled range."""
    builder = ReportBuilder("small-gain-uniformity", tolerances)
    rs = [radius * j / grid_n for j in range(grid_n + 1)]
    for key in sorted(gains.internal):
        g = gains.internal[key]
        for r in rs:
            builder.record({"kind": "internal", "key": "/".join(key), "r": r}, g(r), gains.alpha(r))
    for cid in sorted(gains.input_gains):
        g = gains.input_gains[cid]
        for r in rs:
            builder.record({"kind": "input", "key": cid, "r": r}, g(r), gains.gamma_u_bar(r))
    for r in rs[1:]:
        # strictness below the identity uses the same relative margin as
        # the sampled class checks
        a = gains.alpha(r)
        if not (r - a > STRICT_TOL * max(1.0, r)):
            builder.fail({"kind": "alpha-below-identity", "key": "alpha", "r": r}, a, r)
    notes = [f"sampled on [0, {radius}] with {grid_n + 1} points per gain"]
    return builder.build(grid={"radius": radius, "grid_n": grid_n}, notes=notes)


# ---------------------------------------------------------------------------
# Grids.


@dataclass(frozen=True)
class StateGridSpec:
    """How to lay state values over the coordinates of a cone.

    If points_per_axis ** coords stays within max_enumeration the grid
    is the full product of symmetric linspaces; otherwise target_points
    points are drawn uniformly with the seeded portable generator.
    target_points sets points_per_axis as ceil(target ** (1/coords)).
    """

    radius: float = 20.0
    target_points: int = 1000
    max_enumeration: int = 20000
    seed: int = 0

    def axis_values(self, count: int) -> list[float]:
        if count == 1:
            return [0.0]
        return [-self.radius + 2.0 * self.radius * j / (count - 1) for j in range(count)]

    def points(self, coords: int) -> list[tuple[float, ...]]:
        if coords < 1:
            raise SpecError("grid needs at least one coordinate")
        per_axis = max(2, math.ceil(self.target_points ** (1.0 / coords)))
        if per_axis ** coords <= self.max_enumeration:
            axis = self.axis_values(per_axis)
            return [pt for pt in itertools.product(axis, repeat=coords)]
        gen = SplitMix64(derive(self.seed, coords))
        return [
            tuple(gen.uniform(-self.radius, self.radius) for _ in range(coords))
            for _ in range(self.target_points)
        ]

    def describe(self, coords: int) -> dict:
        per_axis = max(2, math.ceil(self.target_points ** (1.0 / coords)))
        enumerated = per_axis ** coords <= self.max_enumeration
        return {
            "radius": self.radius,
            "coords": coords,
            "mode": "product" if enumerated else "sampled",
            "points": per_axis ** coords if enumerated else self.target_points,
        }


def class_representatives(
    spec: NetworkSpec,
    window: int = 64,
    extra_per_class: int = 0,
    seed: int = 0,
) -> dict[str, list[int]]:
    """Smallest index of each class in 1..window, plus optional extra
    members drawn deterministically from the window."""
    members: dict[str, list[int]] = {}
    for i in range(1, window + 1):
        members.setdefault(spec.class_of(i), []).append(i)
    reps: dict[str, list[int]] = {}
    for cid in sorted(members):
        pool = members[cid]
        chosen = [pool[0]]
        if extra_per_class > 0 and len(pool) > 1:
            gen = SplitMix64(derive(seed, 7, *cid.encode("utf-8")))
            rest = pool[1:]
            for _ in range(min(extra_per_class, len(rest))):
                pick = rest.pop(int(gen.uniform01() * len(rest)))
                chosen.append(pick)
        reps[cid] = sorted(chosen)
    return reps


# ---------------------------------------------------------------------------
# Checks.


def check_storage_bounds(
    family: StorageFamily,
    spec: NetworkSpec,
    grid: StateGridSpec = StateGridSpec(),
    window: int = 64,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """Sandwich and envelope inequalities on a per-class state grid.

    Checks lower(|x|_A) <= W(x) <= upper(|x|_A) at the class
    representative, and the envelope ordering omega_lower <= lower and
    upper <= omega_upper on the distance values seen.
    """
    builder = ReportBuilder("storage-bounds", tolerances)
    reps = class_representatives(spec, window)
    for cid in sorted(reps):
        i = reps[cid][0]
        st = family.class_storage(i)
        dim = spec.state_dim(i)
        for pt in grid.points(dim):
            w = family.value(i, pt)
            d = family.set_distance(i, pt)
            builder.record({"class": cid, "index": i, "side": "lower", "state": pt}, st.lower(d), w)
            builder.record({"class": cid, "index": i, "side": "upper", "state": pt}, w, st.upper(d))
            builder.record({"class": cid, "index": i, "side": "envelope-lower", "state": pt}, family.omega_lower(d), st.lower(d))
            builder.record({"class": cid, "index": i, "side": "envelope-upper", "state": pt}, st.upper(d), family.omega_upper(d))
    return builder.build(
        grid={"window": window, **grid.describe(1)},
        notes=["sampled verdict at class representatives " + repr({c: r[0] for c, r in sorted(reps.items())})],
    )


def check_M_step_decrease(
    spec: NetworkSpec,
    family: StorageFamily,
    gains: GainTable,
    M: int,
    state_grid: StateGridSpec = StateGridSpec(),
    input_grid: Sequence[float] = (0.0,),
    window: int = 64,
    extra_per_class: int = 0,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """M-step decrease inequality at class representatives.

    The state grid assigns values jointly to every coordinate of the
    dependency cone of the representative; inputs are held constant in
    time and uniform across subsystems during the M-step window, so the
    input sup norm equals the grid magnitude.
    """
    if M < 1:
        raise SpecError("decrease check needs M >= 1")
    builder = ReportBuilder(f"decrease-M{M}", tolerances)
    reps = class_representatives(spec, window, extra_per_class, state_grid.seed)
    grid_meta: dict[str, dict] = {}
    for cid in sorted(reps):
        for i in reps[cid]:
            cone = sorted(dependency_cone(spec, [i], M))
            nbrs = spec.neighbors_of(i)
            roles = {}
            for j in cone:
                if j == i:
                    roles[j] = "self"
                elif j in nbrs:
                    roles[j] = f"n{nbrs.index(j)}"
                else:
                    roles[j] = "cone"
            dims = [spec.state_dim(j) for j in cone]
            coords = sum(dims)
            grid_meta[cid] = state_grid.describe(coords)
            gamma_iu = gains.input_gain(cid)
            for pt in state_grid.points(coords):
                states: dict[int, Vector] = {}
                ofs = 0
                for j, nd in zip(cone, dims):
                    states[j] = tuple(pt[ofs : ofs + nd])
                    ofs += nd
                for mag in input_grid:
                    mag = float(mag)
                    inputs = [_uniform_input(spec, mag)] * M
                    final = iterate_M(spec, states, inputs, [i])
                    lhs = family.value(i, final[i])
                    rhs = gamma_iu(abs(mag))
                    for j in cone:
                        g = gains.internal_gain(cid, spec.class_of(j), roles[j])
                        v = g(family.value(j, states[j]))
                        if v > rhs:
                            rhs = v
                    builder.record(
                        {"class": cid, "index": i, "state": pt, "input": mag},
                        lhs,
                        rhs,
                    )
    notes = [
        "inputs constant over the M-step window; sup norm equals the grid magnitude",
        "gains for cone members beyond direct neighbors resolve via role 'cone' (default zero)",
    ]
    return builder.build(grid={"classes": grid_meta, "inputs": list(input_grid), "M": M}, notes=notes)


def _uniform_input(spec: NetworkSpec, mag: float) -> Callable[[int], Vector]:
    def at(i: int) -> Vector:
        return (mag,) * spec.input_dim(i)

    return at


def check_overall_decay(
    traj: Trajectory,
    family: StorageFamily,
    alpha: ScalarGain,
    gamma_u_bar: ScalarGain,
    M: int = 1,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """V(x(k+M)) <= max(alpha(V(x(k))), gamma_u_bar(||u||)) along a run.

    V is the sup of the storage over each recorded window, evaluated at
    steps 0, M, 2M, ...; the input norm is the declared sup norm of the
    trajectory's signal.
    """
    if M < 1:
        raise SpecError("decay check needs M >= 1")
    builder = ReportBuilder(f"overall-decay-M{M}", tolerances)
    u_norm = traj.input.declared_sup_norm
    input_term = gamma_u_bar(u_norm)
    k = 0
    while k + M <= traj.horizon:
        v_now = overall_V(family, traj.window(k))
        v_next = overall_V(family, traj.window(k + M))
        builder.record({"k": k}, v_next, max(alpha(v_now), input_term))
        k += M
    return builder.build(
        grid={"horizon": traj.horizon, "stride": M},
        notes=["V is a sup over the recorded window at each step"],
    )


# ---------------------------------------------------------------------------
# Exponential certificates: converse step count and necessity-style
# construction.


@dataclass(frozen=True)
class EissConstants:
    """Constants of an exponential stability estimate.

    overshoot C >= 1 and rate in [0, 1) describe the decay term
    C * rate**k; b > 0 is the storage exponent, w_lower/w_upper the
    storage sandwich weights, kappa in (0, 1) the wanted M-step
    contraction factor.
    """

    overshoot: float
    rate: float
    exponent: float = 1.0
    w_lower: float = 1.0
    w_upper: float = 1.0
    kappa: float = 0.5

    def __post_init__(self):
        if not (self.overshoot >= 1.0):
            raise GainDomainError("overshoot must be >= 1")
        if not (0.0 <= self.rate):
            raise GainDomainError("rate must be >= 0")
        if not (self.exponent > 0.0):
            raise GainDomainError("exponent must be > 0")
        if not (0.0 < self.w_lower <= self.w_upper):
            raise GainDomainError("need 0 < w_lower <= w_upper")
        if not (0.0 < self.kappa < 1.0):
            raise GainDomainError("kappa must be in (0, 1)")


def converse_M(c: EissConstants) -> int:
    """Least M making an exponential estimate an M-step contraction.

    Any M with M >= (1/b) * log_rate(kappa * w_lower / (C**b * w_upper))
    works; rate 0 collapses in one step.  Rates >= 1 carry no decay and
    are a domain error.
    """
    if c.rate >= 1.0:
        raise GainDomainError("rate must be < 1 for a decaying estimate")
    if c.rate == 0.0:
        return 1
    target = c.kappa * c.w_lower / (c.overshoot ** c.exponent * c.w_upper)
    bound = math.log(target) / math.log(c.rate) / c.exponent
    return max(1, math.ceil(bound))


def necessity_construct(
    spec: NetworkSpec,
    c_decay: float,
    gamma: ScalarGain,
    M: int = 1,
) -> tuple[StorageFamily, GainTable]:
    """Canonical certificate from a decay factor and an input gain.

    Storage is the plain set distance for every class, envelopes the
    identity, internal gains the linear decay factor uniformly, and the
    input gain is shared by every class.
    """
    if not (0.0 < c_decay < 1.0):
        raise GainDomainError("decay factor must be in (0, 1)")
    if M < 1:
        raise SpecError("need M >= 1")
    identity = Linear(1.0)
    family = StorageFamily.uniform(spec, ScaledDistance(1.0), identity, identity)
    gains = GainTable.uniform(Linear(c_decay), gamma, Linear(c_decay), gamma)
    return family, gains


def check_iss_estimate(
    trajectories: Sequence[Trajectory],
    beta: KLBound,
    gamma: ScalarGain,
    sets: Callable[[int], ClosedSet],
    stride: int = 1,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """|x(k)|_A <= max(beta(|xi|_A, k/stride), gamma(||u||)) along runs.

    Distances are sups over the recorded windows (product-set
    distances).  With stride M only steps at multiples of M are
    checked and the decay argument counts M-blocks.
    """
    from .distance import dist_product

    if stride < 1:
        raise SpecError("stride must be >= 1")
    builder = ReportBuilder("iss-estimate", tolerances)
    for t, traj in enumerate(trajectories):
        d0 = dist_product(traj.window(0), sets)
        u_norm = traj.input.declared_sup_norm
        input_term = gamma(u_norm)
        for k in range(0, traj.horizon + 1, stride):
            dk = dist_product(traj.window(k), sets)
            builder.record(
                {"trajectory": t, "k": k},
                dk,
                max(beta(d0, k // stride), input_term),
            )
    return builder.build(
        grid={"trajectories": len(trajectories), "stride": stride},
        notes=["set distances are sups over the recorded windows"],
    )
