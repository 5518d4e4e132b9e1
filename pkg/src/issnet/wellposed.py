"""Sampled well-posedness checks for countable networks.

A network map sends bounded states to bounded states exactly when one
growth bound holds uniformly across all subsystems: the next state is
dominated by a constant plus a common comparison function of the state,
neighbor and input norms.  check_growth_bound probes a candidate bound
on sampled indices and points; falsify_uniformity estimates the local
gain per index and flags families whose gains grow without a common
envelope, which is the standard way such a map fails to be well
defined.

Verdicts are sampled: enlarging the sample plan can only add
violations, never remove them, because samples are addressed by
(seed, index, sample number) and a verdict is "no violation among the
samples".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .comparison import Compose, Linear, MaxOf, ScalarGain, sampled_class_check
from .distance import dist, norm_of, uniformly_bounded
from .errors import SpecError
from .network import NetworkSpec, Vector
from .report import CertificateReport, ReportBuilder, Tolerances
from .rng import SplitMix64, derive
from .sim import dependency_cone, iterate_M

STATE_NORM = "state-norm"
SET_FORM_1 = "set-form-1"
SET_FORM_2 = "set-form-2"


@dataclass(frozen=True)
class KBoundEstimate:
    """Candidate growth bound.

    state-norm:  |f_i| <= C + kappa(|x_i|) + kappa(|xbar_i|) + kappa(|u_i|)
    set-form-1:  |f_i|_Ai <= kappa1(|x_i|_Ai) + kappa2(|xbar_i|) + kappa2(|u_i|)
    set-form-2:  like form 1 but the neighbor term is the distance to
                 the product of the neighbors' target sets.
    """

    constant: float = 0.0
    kappa: ScalarGain = Linear(1.0)
    variant: str = STATE_NORM
    kappa1: ScalarGain | None = None
    kappa2: ScalarGain | None = None

    def __post_init__(self):
        if self.variant not in (STATE_NORM, SET_FORM_1, SET_FORM_2):
            raise SpecError(f"unknown growth-bound variant {self.variant!r}")
        if self.constant < 0:
            raise SpecError("constant must be >= 0")
        if self.variant != STATE_NORM and (self.kappa1 is None or self.kappa2 is None):
            raise SpecError("set forms need kappa1 and kappa2")


@dataclass(frozen=True)
class SamplePlan:
    """Where and how much to sample.

    index_window is either an int N (indices 1..N) or an explicit
    sequence.  Per index, the probe points are a fixed list of corner
    configurations plus `samples` seeded random ones, all with state,
    neighbor and input sup norms below the respective radii.
    """

    index_window: int | Sequence[int] = 32
    state_radius: float = 10.0
    input_radius: float = 1.0
    samples: int = 32
    seed: int = 0

    def indices(self) -> list[int]:
        if isinstance(self.index_window, int):
            if self.index_window < 1:
                raise SpecError("index window must cover at least index 1")
            return list(range(1, self.index_window + 1))
        idx = sorted(set(int(i) for i in self.index_window))
        if not idx or idx[0] < 1:
            raise SpecError("explicit index window must be nonempty with indices >= 1")
        return idx


def _corner_probes(
    x_dim: int, nbr_dims: Sequence[int], u_dim: int, rx: float, ru: float
) -> list[tuple[Vector, tuple[Vector, ...], Vector]]:
    """Deterministic extreme points: all-zero, each block at +-radius,
    and everything at +-radius simultaneously."""

    def full(dim: int, v: float) -> Vector:
        return (v,) * dim

    zeros_x = full(x_dim, 0.0)
    zeros_nb = tuple(full(d, 0.0) for d in nbr_dims)
    zeros_u = full(u_dim, 0.0)
    probes = [(zeros_x, zeros_nb, zeros_u)]
    for s in (rx, -rx):
        probes.append((full(x_dim, s), zeros_nb, zeros_u))
        probes.append((zeros_x, tuple(full(d, s) for d in nbr_dims), zeros_u))
    for s in (ru, -ru):
        probes.append((zeros_x, zeros_nb, full(u_dim, s)))
    probes.append((full(x_dim, rx), tuple(full(d, rx) for d in nbr_dims), full(u_dim, ru)))
    probes.append((full(x_dim, -rx), tuple(full(d, -rx) for d in nbr_dims), full(u_dim, -ru)))
    return probes


def _random_probe(
    gen: SplitMix64, x_dim: int, nbr_dims: Sequence[int], u_dim: int, rx: float, ru: float
) -> tuple[Vector, tuple[Vector, ...], Vector]:
    x = tuple(gen.uniform(-rx, rx) for _ in range(x_dim))
    nb = tuple(tuple(gen.uniform(-rx, rx) for _ in range(d)) for d in nbr_dims)
    u = tuple(gen.uniform(-ru, ru) for _ in range(u_dim))
    return x, nb, u


def check_growth_bound(
    spec: NetworkSpec,
    estimate: KBoundEstimate,
    plan: SamplePlan = SamplePlan(),
    M: int = 1,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """Probe the growth bound on sampled indices and points.

    With M > 1 the bound is checked for the M-iterate map: the state
    argument is the representative's own state, the neighbor argument
    collects every other member of the depth-M dependency cone, and the
    input is constant over the window.

    The report notes carry the sampled class verdicts of the gains and,
    for the set forms, the derived one-step constants: with uniformly
    bounded sets of radius C the set forms imply a state-norm bound with
    constant kappa1(2C) + C and gain max(kappa1 o 2id, kappa2).
    """
    if M < 1:
        raise SpecError("need M >= 1")
    builder = ReportBuilder(f"growth-bound-{estimate.variant}", tolerances)
    indices = plan.indices()
    for i in indices:
        cone = sorted(dependency_cone(spec, [i], M))
        others = [j for j in cone if j != i]
        x_dim = spec.state_dim(i)
        nbr_dims = [spec.state_dim(j) for j in others]
        u_dim = spec.input_dim(i)
        probes = _corner_probes(x_dim, nbr_dims, u_dim, plan.state_radius, plan.input_radius)
        gen = SplitMix64(derive(plan.seed, i))
        for _ in range(plan.samples):
            probes.append(_random_probe(gen, x_dim, nbr_dims, u_dim, plan.state_radius, plan.input_radius))
        for s, (x, nb, u) in enumerate(probes):
            states = {i: x}
            for j, xj in zip(others, nb):
                states[j] = xj
            u_norm = norm_of(u)
            # cone members other than i get a constant input of the same
            # sup norm, so the window input norm equals u_norm
            inputs = [
                (lambda v, vn: (lambda jj: v if jj == i else (vn,) * spec.input_dim(jj)))(u, u_norm)
            ] * M
            final = iterate_M(spec, states, inputs, [i])[i]
            x_norm = norm_of(x)
            nb_norm = max((norm_of(v) for v in nb), default=0.0)
            if estimate.variant == STATE_NORM:
                lhs = norm_of(final)
                rhs = estimate.constant + estimate.kappa(x_norm) + estimate.kappa(nb_norm) + estimate.kappa(u_norm)
            else:
                lhs = dist(final, spec.target_set(i))
                if estimate.variant == SET_FORM_1:
                    nb_term = estimate.kappa2(nb_norm)
                else:
                    nb_dist = max(
                        (dist(v, spec.target_set(j)) for j, v in zip(others, nb)),
                        default=0.0,
                    )
                    nb_term = estimate.kappa2(nb_dist)
                rhs = estimate.kappa1(dist(x, spec.target_set(i))) + nb_term + estimate.kappa2(u_norm)
            builder.record({"index": i, "sample": s}, lhs, rhs)
    notes = [
        f"sampled verdict over indices {indices[0]}..{indices[-1]} ({len(indices)} indices), M = {M}",
        f"kappa class: {sampled_class_check(estimate.kappa, max(plan.state_radius, 1.0))}",
    ]
    if estimate.variant != STATE_NORM:
        notes.append(f"kappa1 class: {sampled_class_check(estimate.kappa1, max(plan.state_radius, 1.0))}")
        notes.append(f"kappa2 class: {sampled_class_check(estimate.kappa2, max(plan.state_radius, 1.0))}")
        bound = uniformly_bounded(spec.target_set, max(indices))
        if bound.bounded:
            c = bound.bound
            derived_constant = estimate.kappa1(2.0 * c) + c
            derived_gain = MaxOf((Compose(estimate.kappa1, Linear(2.0)), estimate.kappa2))
            notes.append(
                f"derived state-norm constants: constant {derived_constant!r}, "
                f"gain max(kappa1 o 2id, kappa2) at radius {plan.state_radius}: "
                f"{derived_gain(plan.state_radius)!r}"
            )
        else:
            notes.append("target sets not uniformly bounded over the window; no derived state-norm constants")
    return builder.build(
        grid={
            "indices": len(indices),
            "random_probes_per_index": plan.samples,
            "state_radius": plan.state_radius,
            "input_radius": plan.input_radius,
            "seed": plan.seed,
        },
        notes=notes,
    )


@dataclass(frozen=True)
class GrowthProfile:
    """Empirical local gains per index and radius."""

    indices: tuple[int, ...]
    radii: tuple[float, ...]
    gains: dict[int, tuple[float, ...]]
    sup_per_radius: tuple[float, ...]
    cap: float
    diverges: bool
    cap_witness: tuple[int, float] | None

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("index,radius,empirical_gain\n")
            for i in self.indices:
                for r, g in zip(self.radii, self.gains[i]):
                    fh.write(f"{i},{r!r},{g!r}\n")


def falsify_uniformity(
    spec: NetworkSpec,
    plan: SamplePlan = SamplePlan(),
    radii: Sequence[float] = (0.25, 0.5, 1.0),
    cap: float = 100.0,
) -> GrowthProfile:
    """Estimate the local gain of every sampled subsystem.

    The empirical gain at radius r is the largest |f_i(x, xbar, u)| -
    |f_i(0, 0, 0)| over probes whose state, neighbor and input norms all
    stay within r.  Probes always include the exact +-r corners, so
    piecewise maps attaining their growth on the boundary report it
    exactly.  The family diverges when some sampled gain exceeds the
    cap; the first (index, gain) pair past the cap is the witness.
    """
    indices = plan.indices()
    rs = tuple(float(r) for r in radii)
    gains: dict[int, tuple[float, ...]] = {}
    diverges = False
    witness: tuple[int, float] | None = None
    for i in indices:
        nbrs = spec.neighbors_of(i)
        x_dim = spec.state_dim(i)
        nbr_dims = [spec.state_dim(j) for j in nbrs]
        u_dim = spec.input_dim(i)
        zero = iterate_M(
            spec,
            {i: (0.0,) * x_dim, **{j: (0.0,) * d for j, d in zip(nbrs, nbr_dims)}},
            [lambda jj: (0.0,) * spec.input_dim(jj)],
            [i],
        )[i]
        base = norm_of(zero)
        per_radius: list[float] = []
        for r in rs:
            probes = _corner_probes(x_dim, nbr_dims, u_dim, r, r)
            gen = SplitMix64(derive(plan.seed, i, int(r * 1e6) & 0xFFFFFFFF))
            for _ in range(plan.samples):
                probes.append(_random_probe(gen, x_dim, nbr_dims, u_dim, r, r))
            worst = 0.0
            for x, nb, u in probes:
                states = {i: x}
                for j, xj in zip(nbrs, nb):
                    states[j] = xj
                out = iterate_M(spec, states, [(lambda v: (lambda jj: v if jj == i else (0.0,) * spec.input_dim(jj)))(u)], [i])[i]
                g = norm_of(out) - base
                if g > worst:
                    worst = g
            per_radius.append(worst)
            if worst > cap and not diverges:
                diverges = True
                witness = (i, worst)
        gains[i] = tuple(per_radius)
    sup_per_radius = tuple(max(gains[i][t] for i in indices) for t in range(len(rs)))
    return GrowthProfile(
        indices=tuple(indices),
        radii=rs,
        gains=gains,
        sup_per_radius=sup_per_radius,
        cap=cap,
        diverges=diverges,
        cap_witness=witness,
    )
