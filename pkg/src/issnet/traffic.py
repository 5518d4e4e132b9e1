"""Road-traffic network with ten structural cell classes.

The road is an infinite chain of cells indexed 1, 2, ...; each cell
holds a vehicle density that drains at a speed/length rate and receives
a share of the densities of the cells feeding it.  A repeating block of
eight cells contains controlled entries (density injected while the
light is green), uncontrolled exits, and through cells fed by one or
two neighbors at offsets +-1 and +-4.  Cells 1 and 3 start the pattern
and have their own feed structure.

Everything here is scalar per cell.  The per-cell update is

    density+ = a * density + sum(coeff_j * feeder_j) + entry * light

with a = 1 - period * (speed/length + exits) and coeff_j =
period * inflow_share * (speed_j / length_j).  All coefficients are
nonnegative when the parameter validation passes, so nonnegative
densities stay nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .certify import ClassStorage, GainTable, ScaledDistance, StorageFamily
from .comparison import Linear, ScalarGain, Zero
from .distance import PointSet
from .errors import CertificateRefused, SpecError
from .network import NetworkSpec, SubsystemClass, Vector
from .report import CertificateReport, ReportBuilder, Tolerances, write_json
from .rng import uniform01_at
from .sim import write_trajectory_csv


@dataclass(frozen=True)
class TrafficParams:
    """Physical and tuning constants of the road model.

    period is the sampling interval in the same time unit as the
    speed/length ratio (hours when speeds are km/h and lengths km).
    inflow_share is the fraction of a feeder cell's outflow entering
    this cell, exit_share the fraction leaving per available exit, and
    entry_rate the density a fully green controlled entry injects per
    step.  gain_margin is the slack used when the affine update is
    folded into a max-form decrease estimate; larger margins loosen the
    certified decay factor but absorb the cross terms of multi-feeder
    cells.  speed_rule/length_rule may vary per cell inside the
    declared bounds; the defaults pin both to 1.
    """

    period: float = 0.02
    inflow_share: float = 0.1
    exit_share: float = 0.1
    entry_rate: float = 1.0
    gain_margin: float = 0.003
    speed_rule: Callable[[int], float] | None = None
    length_rule: Callable[[int], float] | None = None
    speed_min: float = 1.0
    speed_max: float = 1.0
    length_min: float = 1.0
    length_max: float = 1.0

    def __post_init__(self):
        if not self.period > 0.0:
            raise SpecError("sampling period must be positive")
        if not 0.0 < self.inflow_share < 0.5:
            raise SpecError("inflow share must lie in (0, 0.5)")
        if not 0.0 < self.exit_share < 1.0:
            raise SpecError("exit share must lie in (0, 1)")
        if not self.entry_rate > 0.0:
            raise SpecError("entry rate must be positive")
        if not self.gain_margin > 0.0:
            raise SpecError("gain margin must be positive")
        if not 0.0 < self.speed_min <= self.speed_max:
            raise SpecError("need 0 < speed_min <= speed_max")
        if not 0.0 < self.length_min <= self.length_max:
            raise SpecError("need 0 < length_min <= length_max")
        # keeps every update coefficient nonnegative, including for
        # cells with two exits
        if self.period * (self.speed_max / self.length_min + 2.0 * self.exit_share) > 1.0:
            raise SpecError("sampling period too large: a cell could drain below zero in one step")

    def speed(self, i: int) -> float:
        v = self.speed_rule(i) if self.speed_rule is not None else self.speed_min
        if not self.speed_min <= v <= self.speed_max:
            raise SpecError(f"speed rule leaves [{self.speed_min}, {self.speed_max}] at cell {i}")
        return v

    def length(self, i: int) -> float:
        l = self.length_rule(i) if self.length_rule is not None else self.length_min
        if not self.length_min <= l <= self.length_max:
            raise SpecError(f"length rule leaves [{self.length_min}, {self.length_max}] at cell {i}")
        return l

    def drain_ratio(self, i: int) -> float:
        return self.speed(i) / self.length(i)


@dataclass(frozen=True)
class _CellKind:
    """One structural cell class: who feeds it, how many exits, and
    whether a controlled entry injects density."""

    class_id: str
    offsets: tuple[int, ...]
    exit_mult: float
    entry_mult: float


_KINDS = (
    _CellKind("head", (1,), 0.0, 0.0),
    _CellKind("head-entry", (1,), 0.0, 0.5),
    _CellKind("entry-full", (4,), 0.0, 1.0),
    _CellKind("entry-half", (-4,), 0.0, 0.5),
    _CellKind("through-a", (-1, 4), 0.0, 0.0),
    _CellKind("exit-a", (-4, 1), 1.0, 0.0),
    _CellKind("through-b", (1, 4), 0.0, 0.0),
    _CellKind("through-c", (-4, -1), 0.0, 0.0),
    _CellKind("exit-b", (-1, 4), 2.0, 0.0),
    _CellKind("through-d", (-4, 1), 0.0, 0.0),
)

_KIND_BY_ID = {k.class_id: k for k in _KINDS}

# cells 1 and 3 open the pattern; everything else repeats with period 8
_SPECIAL = {1: "head", 3: "head-entry"}
_RESIDUE = {
    4: "entry-full",
    5: "entry-half",
    6: "through-a",
    1: "exit-a",
    2: "through-b",
    7: "through-c",
    0: "exit-b",
    3: "through-d",
}


def class_id_for(i: int) -> str:
    """Structural class of cell i; every i >= 1 lands in exactly one."""
    if i < 1:
        raise SpecError("cells are indexed from 1")
    got = _SPECIAL.get(i)
    if got is not None:
        return got
    return _RESIDUE[i % 8]


def feeder_indices(i: int) -> tuple[int, ...]:
    return tuple(i + o for o in _KIND_BY_ID[class_id_for(i)].offsets)


def _traffic_step(i: int, x: Vector, xbar: tuple[Vector, ...], u: Vector, params) -> Vector:
    # evaluation order is fixed (self, feeders in slot order, entry) so
    # array-based runs can replay the identical float operations
    a, inflow, entry = params
    acc = a * x[0]
    for coeff, nb in zip(inflow, xbar):
        acc = acc + coeff * nb[0]
    if entry is not None:
        acc = acc + entry * u[0]
    return (acc,)


def _params_rule(p: TrafficParams, kind: _CellKind):
    def rule(i: int):
        a = 1.0 - p.period * (p.drain_ratio(i) + kind.exit_mult * p.exit_share)
        inflow = tuple(p.period * (p.inflow_share * p.drain_ratio(i + o)) for o in kind.offsets)
        entry = p.period * (kind.entry_mult * p.entry_rate) if kind.entry_mult else None
        return (a, inflow, entry)

    return rule


def build_traffic_network(p: TrafficParams) -> NetworkSpec:
    """The infinite cell network as a ten-class NetworkSpec."""
    classes = [
        SubsystemClass(
            class_id=kind.class_id,
            state_dim=1,
            input_dim=1,
            dynamics=_traffic_step,
            target_set=PointSet((0.0,)),
            params_rule=_params_rule(p, kind),
        )
        for kind in _KINDS
    ]
    return NetworkSpec(classes, assign=class_id_for, neighbors=feeder_indices, max_out_degree_bound=2)


# ---------------------------------------------------------------------------
# Certificate.


def _decay_factor(p: TrafficParams, exit_term: float) -> float:
    # worst-case self coefficient plus the largest possible feeder
    # coefficient, padded by the margin that absorbs the fold from the
    # affine sum into a max
    return (
        1.0
        - p.period * (p.speed_min / p.length_max + exit_term)
        + p.period * (p.inflow_share * (p.speed_max / p.length_min))
        + p.gain_margin
    )


def alpha_value(p: TrafficParams) -> float:
    """Certified per-step decay factor, valid for every cell class."""
    return _decay_factor(p, 0.0)


def class_gain_value(p: TrafficParams, class_id: str) -> float:
    kind = _KIND_BY_ID[class_id]
    return _decay_factor(p, kind.exit_mult * p.exit_share)


def input_gain_value(p: TrafficParams, class_id: str) -> float:
    kind = _KIND_BY_ID[class_id]
    return p.period * (kind.entry_mult * p.entry_rate) / p.gain_margin


def gamma_u_bar_value(p: TrafficParams) -> float:
    """Uniform input gain slope: worst entry coefficient over the margin."""
    return p.period * p.entry_rate / p.gain_margin


def traffic_certificate(p: TrafficParams) -> tuple[StorageFamily, GainTable, float, float]:
    """Linear storage/gain certificate for the cell network.

    Storage is the plain density magnitude for every class.  Each class
    carries one linear gain on itself and on each feeder slot; entry
    classes get a linear input gain.  Refuses when the decay factor
    reaches 1, since then no contraction statement can be made at any
    horizon.
    """
    a = alpha_value(p)
    if a >= 1.0:
        raise CertificateRefused(
            f"decay factor {a} is not below 1; shrink period, inflow share or gain margin",
            margin=a - 1.0,
        )
    identity = Linear(1.0)
    per_class = {kind.class_id: ClassStorage(ScaledDistance(1.0), identity, identity) for kind in _KINDS}
    family = StorageFamily(
        per_class,
        assign=class_id_for,
        sets=lambda i: PointSet((0.0,)),
        omega_lower=identity,
        omega_upper=identity,
    )
    internal: dict[tuple[str, str, str], ScalarGain] = {}
    input_gains: dict[str, ScalarGain] = {}
    for kind in _KINDS:
        g = Linear(class_gain_value(p, kind.class_id))
        internal[(kind.class_id, "*", "self")] = g
        for slot in range(len(kind.offsets)):
            internal[(kind.class_id, "*", f"n{slot}")] = g
        if kind.entry_mult:
            input_gains[kind.class_id] = Linear(input_gain_value(p, kind.class_id))
        else:
            input_gains[kind.class_id] = Zero()
    gains = GainTable(internal, input_gains, Linear(a), Linear(gamma_u_bar_value(p)))
    return family, gains, a, gamma_u_bar_value(p)


def intermediate_bound_check(
    p: TrafficParams,
    radius: float = 20.0,
    grid_n: int = 8,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """Diagnostic for the fold from the affine update into max form.

    Samples, per class, the one-step bound

        |density+| <= max(g*|x|, g*max_j|feeder_j|, entry_gain*|light|)

    with g the class decay factor.  This is the step the certificate's
    per-slot gains rely on; it holds exactly when the margin dominates
    the secondary feeder coefficient, so the report makes the margin
    requirement visible instead of hiding it inside the gain algebra.
    """
    spec = build_traffic_network(p)
    builder = ReportBuilder("affine-to-max-fold", tolerances)
    reps: dict[str, int] = {}
    for i in range(1, 65):
        reps.setdefault(spec.class_of(i), i)
    axis = [-radius + 2.0 * radius * j / grid_n for j in range(grid_n + 1)]
    for cid in sorted(reps):
        i = reps[cid]
        g = class_gain_value(p, cid)
        entry_slope = input_gain_value(p, cid)
        nbrs = spec.neighbors_of(i)
        feeder_axes = [axis] * len(nbrs)
        for x0 in axis:
            for feeders in _product(feeder_axes):
                xbar = tuple((f,) for f in feeders)
                for u in (0.0, 1.0):
                    nxt = spec.cls(i).dynamics(i, (x0,), xbar, (u,), spec.params_of(i))
                    lhs = abs(nxt[0])
                    rhs = max(g * abs(x0), max((g * abs(f) for f in feeders), default=0.0), entry_slope * u)
                    builder.record({"class": cid, "cell": i, "state": (x0, *feeders), "light": u}, lhs, rhs)
    return builder.build(
        grid={"radius": radius, "grid_n": grid_n, "inputs": [0.0, 1.0]},
        notes=["holds iff the gain margin covers the secondary feeder coefficient"],
    )


def _product(axes: Sequence[Sequence[float]]):
    if not axes:
        yield ()
        return
    for head in axes[0]:
        for rest in _product(axes[1:]):
            yield (head, *rest)


# ---------------------------------------------------------------------------
# Scaling experiment.


def initial_density(seed: int, i: int) -> float:
    """Cell i's starting density, uniform over [0, 20).

    Derived from the seed and the cell index alone, so prefixes of the
    initial condition agree across network sizes.
    """
    return 20.0 * uniform01_at(seed, i)


def _observed_indices(n: int, cap: int = 40) -> list[int]:
    """Deterministic export subset: the first twelve cells (one block
    plus the pattern heads, covering every class) and an even spread of
    the rest."""
    head = list(range(1, min(n, 12) + 1))
    if n <= 12 or cap <= 12:
        return head
    span = n - 12
    extras = min(cap - 12, span)
    picks = {12 + (span * j) // extras for j in range(1, extras + 1)}
    return head + sorted(picks)


def _class_groups(spec: NetworkSpec, n: int):
    """Per-class index/coefficient arrays for the array-based stepper.

    Feeders beyond cell n map to position 0, which is pinned at zero:
    the truncation with a silent boundary.
    """
    members: dict[str, list[int]] = {}
    for i in range(1, n + 1):
        members.setdefault(spec.class_of(i), []).append(i)
    groups = []
    for cid in sorted(members):
        idx = members[cid]
        params = [spec.params_of(i) for i in idx]
        slots = len(params[0][1])
        a = np.array([pr[0] for pr in params])
        coeffs = [np.array([pr[1][s] for pr in params]) for s in range(slots)]
        feeders = [
            np.array([nb if nb <= n else 0 for nb in (spec.neighbors_of(i)[s] for i in idx)])
            for s in range(slots)
        ]
        entry = np.array([pr[2] for pr in params]) if params[0][2] is not None else None
        groups.append((np.array(idx), a, coeffs, feeders, entry))
    return groups


def run_truncation_fast(
    spec: NetworkSpec,
    n: int,
    initial: Sequence[float],
    input_level: float,
    horizon: int,
    observed: Sequence[int],
) -> tuple[list[float], dict[int, list[float]]]:
    """Simulate cells 1..n with a zero boundary, vectorized per class.

    Performs, per cell, the identical multiply/add sequence as the
    scalar dynamics (self term, feeder slots in order, entry term), so
    states agree bitwise with the generic per-subsystem path.  Returns
    the sup-density series and the observed per-cell series.
    """
    if len(initial) != n:
        raise SpecError(f"initial density list has {len(initial)} entries, expected {n}")
    s = np.zeros(n + 1)
    s[1:] = initial
    groups = _class_groups(spec, n)
    v_series = [float(np.abs(s[1:]).max())]
    series: dict[int, list[float]] = {i: [float(s[i])] for i in observed}
    for _ in range(horizon):
        new = np.zeros(n + 1)
        for idx, a, coeffs, feeders, entry in groups:
            acc = a * s[idx]
            for coeff, nb in zip(coeffs, feeders):
                acc = acc + coeff * s[nb]
            if entry is not None:
                acc = acc + entry * input_level
            new[idx] = acc
        s = new
        v_series.append(float(np.abs(s[1:]).max()))
        for i in observed:
            series[i].append(float(s[i]))
    return v_series, series


@dataclass
class SizeRun:
    """Results for one network size."""

    n: int
    horizon: int
    v_series: list[float]
    observed: list[int]
    observed_series: dict[int, list[float]]
    stepwise: CertificateReport
    contraction_geomean: float | None
    contraction_max: float | None
    contraction_steps: int
    ultimate_estimate: float
    ultimate_bound: float
    trajectory_path: Path
    summary_path: Path


@dataclass
class ScalingResult:
    """All sizes of one experiment, sharing a single certificate."""

    alpha: float
    gamma_u_bar: float
    input_norm: float
    seed: int
    runs: list[SizeRun]
    summary_path: Path

    @property
    def passed(self) -> bool:
        return all(r.stepwise.passed for r in self.runs)


def run_scaling_experiment(
    p: TrafficParams,
    sizes: Sequence[int],
    horizon: int = 500,
    seed: int = 0,
    out_dir: str | Path = "traffic-out",
    observed_cap: int = 40,
    tolerances: Tolerances = Tolerances(),
) -> ScalingResult:
    """Green-light runs of growing truncations against one certificate.

    For each size n: starts from seeded densities uniform over [0, 20),
    holds every entry light at 1, simulates cells 1..n with a zero
    boundary, and checks the sup-density series V against

        V(k+1) <= max(alpha * V(k), gamma_u_bar * 1)

    where alpha and gamma_u_bar are read once from the certificate, not
    fitted;  every size is checked against the same constants.  Each
    size directory receives trajectories.csv (observed subset) and
    summary.json; a cross-size summary.json lands in the root.

    Also fits the empirical per-step contraction of V over the steps
    where the state term dominates the input term, and estimates the
    ultimate bound from the final fifth of the run, for comparison
    against the certified constants.
    """
    if horizon < 1:
        raise SpecError("experiment horizon must be >= 1")
    _, _, alpha, gub = traffic_certificate(p)
    spec = build_traffic_network(p)
    input_norm = 1.0
    input_bound = gub * input_norm
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs: list[SizeRun] = []
    for n in sizes:
        if n < 1:
            raise SpecError("network size must be >= 1")
        initial = [initial_density(seed, i) for i in range(1, n + 1)]
        observed = _observed_indices(n, observed_cap)
        v_series, series = run_truncation_fast(spec, n, initial, input_norm, horizon, observed)
        builder = ReportBuilder("stepwise-v-decay", tolerances)
        for k in range(horizon):
            builder.record({"n": n, "k": k}, v_series[k + 1], max(alpha * v_series[k], input_bound))
        stepwise = builder.build(
            grid={"n": n, "horizon": horizon},
            notes=[
                "V(k) is the sup of |density| over cells 1..n",
                "boundary cells held at zero; entry lights held at 1",
            ],
        )
        ratios = [
            v_series[k + 1] / v_series[k]
            for k in range(horizon)
            if v_series[k] > 0.0 and alpha * v_series[k] > input_bound
        ]
        if ratios:
            geomean = math.exp(math.fsum(math.log(r) for r in ratios) / len(ratios))
            worst = max(ratios)
        else:
            geomean = None
            worst = None
        tail = max(1, (horizon + 1) // 5)
        ultimate = max(v_series[-tail:])
        size_dir = out / f"size-{n}"
        size_dir.mkdir(parents=True, exist_ok=True)
        traj_path = size_dir / "trajectories.csv"
        write_trajectory_csv(traj_path, [{i: (series[i][k],) for i in observed} for k in range(horizon + 1)])
        summary_path = size_dir / "summary.json"
        summary = {
            "cells": n,
            "horizon": horizon,
            "seed": seed,
            "alpha": alpha,
            "gamma_u_bar": gub,
            "input_sup_norm": input_norm,
            "input_bound": input_bound,
            "stepwise_check": stepwise.to_dict(),
            "contraction_fit": {
                "geometric_mean": geomean,
                "max": worst,
                "steps_used": len(ratios),
            },
            "ultimate_bound": {
                "estimate": ultimate,
                "bound": input_bound,
                "satisfied": bool(ultimate <= input_bound + tolerances.atol + tolerances.rtol * input_bound),
            },
            "v_initial": v_series[0],
            "v_final": v_series[-1],
            "v_series": v_series,
            "observed_indices": observed,
        }
        write_json(summary_path, summary)
        runs.append(
            SizeRun(
                n=n,
                horizon=horizon,
                v_series=v_series,
                observed=observed,
                observed_series=series,
                stepwise=stepwise,
                contraction_geomean=geomean,
                contraction_max=worst,
                contraction_steps=len(ratios),
                ultimate_estimate=ultimate,
                ultimate_bound=input_bound,
                trajectory_path=traj_path,
                summary_path=summary_path,
            )
        )
    summary_path = out / "summary.json"
    write_json(
        summary_path,
        {
            "alpha": alpha,
            "alpha_identical_across_sizes": True,
            "gamma_u_bar": gub,
            "input_sup_norm": input_norm,
            "seed": seed,
            "horizon": horizon,
            "sizes": [r.n for r in runs],
            "all_stepwise_checks_passed": all(r.stepwise.passed for r in runs),
            "per_size": {str(r.n): f"size-{r.n}/summary.json" for r in runs},
        },
    )
    return ScalingResult(
        alpha=alpha,
        gamma_u_bar=gub,
        input_norm=input_norm,
        seed=seed,
        runs=runs,
        summary_path=summary_path,
    )
