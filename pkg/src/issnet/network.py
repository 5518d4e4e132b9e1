"""Class-based descriptions of countable networks of subsystems.

A network assigns every index i = 1, 2, ... to one of finitely many
subsystem classes.  Rules (plain callables) give the class, the
neighbor list and the per-index parameters, so a network over countably
many subsystems is held intensionally and only the indices a
computation touches are ever evaluated.  Evaluated rules are memoized
on the NetworkSpec, which is treated as immutable after construction.

States, neighbor states and inputs are tuples of floats.  All stepping
everywhere in the package funnels through subsystem_step, which is what
makes bitwise reproducibility claims checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .distance import ClosedSet, PointSet, norm_of, set_from_json
from .errors import (
    DimensionMismatch,
    InputBoundExceeded,
    MissingInitialState,
    SpecError,
)

Vector = tuple[float, ...]
DynamicsFn = Callable[[int, Vector, tuple[Vector, ...], Vector, Any], Vector]


@dataclass(frozen=True)
class SubsystemClass:
    """Shared shape and update map for all members of one class.

    dynamics receives (index, state, neighbor states in neighbor order,
    input, params) and returns the next state.  target_set may be a
    single set shared by all members or a rule index -> set.
    """

    class_id: str
    state_dim: int
    input_dim: int
    dynamics: DynamicsFn
    target_set: ClosedSet | Callable[[int], ClosedSet] = PointSet((0.0,))
    params_rule: Callable[[int], Any] | None = None

    def target_set_for(self, i: int) -> ClosedSet:
        if callable(self.target_set):
            return self.target_set(i)
        return self.target_set


class NetworkSpec:
    """Countable network: classes plus assignment and neighbor rules.

    neighbors(i) lists the indices whose states enter the dynamics of
    subsystem i, in the order the dynamics expects them.  The declared
    degree bound is what validate_spec checks sampled in/out degrees
    against; pass None to leave it unchecked.
    """

    def __init__(
        self,
        classes: Sequence[SubsystemClass],
        assign: Callable[[int], str],
        neighbors: Callable[[int], Sequence[int]],
        max_out_degree_bound: int | None = None,
    ):
        self.classes: dict[str, SubsystemClass] = {}
        for c in classes:
            if c.class_id in self.classes:
                raise SpecError(f"duplicate class id {c.class_id!r}")
            self.classes[c.class_id] = c
        if not self.classes:
            raise SpecError("network needs at least one class")
        self._assign = assign
        self._neighbors = neighbors
        self.max_out_degree_bound = max_out_degree_bound
        self._class_cache: dict[int, str] = {}
        self._neighbor_cache: dict[int, tuple[int, ...]] = {}
        self._params_cache: dict[int, Any] = {}

    def class_of(self, i: int) -> str:
        got = self._class_cache.get(i)
        if got is None:
            got = self._assign(i)
            if got not in self.classes:
                raise SpecError(f"index {i} assigned to undefined class {got!r}")
            self._class_cache[i] = got
        return got

    def cls(self, i: int) -> SubsystemClass:
        return self.classes[self.class_of(i)]

    def neighbors_of(self, i: int) -> tuple[int, ...]:
        got = self._neighbor_cache.get(i)
        if got is None:
            got = tuple(int(j) for j in self._neighbors(i))
            for j in got:
                if j < 1:
                    raise SpecError(f"neighbor rule produced index {j} < 1 at {i}")
                if j == i:
                    raise SpecError(f"self-loop in neighbor rule at index {i}")
            self._neighbor_cache[i] = got
        return got

    def params_of(self, i: int) -> Any:
        if i in self._params_cache:
            return self._params_cache[i]
        rule = self.cls(i).params_rule
        value = rule(i) if rule is not None else None
        self._params_cache[i] = value
        return value

    def state_dim(self, i: int) -> int:
        return self.cls(i).state_dim

    def input_dim(self, i: int) -> int:
        return self.cls(i).input_dim

    def target_set(self, i: int) -> ClosedSet:
        return self.cls(i).target_set_for(i)


def subsystem_step(spec: NetworkSpec, i: int, x: Vector, xbar: tuple[Vector, ...], u: Vector) -> Vector:
    """One update of subsystem i; validates argument shapes."""
    c = spec.cls(i)
    if len(x) != c.state_dim:
        raise DimensionMismatch(f"state of {i} has len {len(x)}, class {c.class_id} expects {c.state_dim}")
    nbrs = spec.neighbors_of(i)
    if len(xbar) != len(nbrs):
        raise DimensionMismatch(f"subsystem {i} expects {len(nbrs)} neighbor states, got {len(xbar)}")
    for j, xj in zip(nbrs, xbar):
        if len(xj) != spec.state_dim(j):
            raise DimensionMismatch(f"neighbor {j} of {i} has len {len(xj)}, expected {spec.state_dim(j)}")
    if len(u) != c.input_dim:
        raise DimensionMismatch(f"input of {i} has len {len(u)}, class {c.class_id} expects {c.input_dim}")
    out = c.dynamics(i, x, xbar, u, spec.params_of(i))
    if len(out) != c.state_dim:
        raise DimensionMismatch(f"dynamics of {i} returned len {len(out)}, expected {c.state_dim}")
    return out


@dataclass(frozen=True)
class SpecDiagnostics:
    violations: tuple[str, ...]
    max_in_degree: int
    max_out_degree: int

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_spec(spec: NetworkSpec, sample_window: int = 64) -> SpecDiagnostics:
    """Sampled structural checks over indices 1..sample_window.

    Verifies class assignments resolve, neighbor lists are valid (no
    self-loops, indices >= 1), sampled in/out degrees respect the
    declared bound, and a zero-argument smoke call of each subsystem's
    dynamics returns a vector of the declared dimension.
    """
    if sample_window < 1:
        raise SpecError("sample window must be >= 1")
    violations: list[str] = []
    out_degree: dict[int, int] = {}
    max_in = 0
    for i in range(1, sample_window + 1):
        # an undefined class id is a hard spec error, not a diagnostic
        c = spec.cls(i)
        try:
            nbrs = spec.neighbors_of(i)
        except SpecError as e:
            violations.append(str(e))
            continue
        max_in = max(max_in, len(nbrs))
        if spec.max_out_degree_bound is not None and len(nbrs) > spec.max_out_degree_bound:
            violations.append(
                f"in-degree {len(nbrs)} at index {i} exceeds declared bound {spec.max_out_degree_bound}"
            )
        for j in nbrs:
            out_degree[j] = out_degree.get(j, 0) + 1
        zero_x = (0.0,) * c.state_dim
        zero_nb = tuple((0.0,) * spec.state_dim(j) for j in nbrs)
        zero_u = (0.0,) * c.input_dim
        try:
            out = c.dynamics(i, zero_x, zero_nb, zero_u, spec.params_of(i))
        except Exception as e:  # noqa: BLE001 - report, do not crash validation
            violations.append(f"dynamics of class {c.class_id} raised at index {i}: {e}")
            continue
        if len(out) != c.state_dim:
            violations.append(
                f"dynamics of class {c.class_id} returned len {len(out)} at index {i}, expected {c.state_dim}"
            )
    max_out = max(out_degree.values(), default=0)
    if spec.max_out_degree_bound is not None and max_out > spec.max_out_degree_bound:
        worst = max(out_degree, key=lambda j: out_degree[j])
        violations.append(
            f"out-degree {max_out} at index {worst} exceeds declared bound {spec.max_out_degree_bound}"
        )
    return SpecDiagnostics(tuple(violations), max_in, max_out)


class StateWindow(Mapping[int, Vector]):
    """Finitely stored states plus an optional rule for the rest.

    Mapping access iterates the stored entries only; get_state(i) falls
    back to the default rule, which is how an infinite initial condition
    is described.  Windows are treated as immutable once built.
    """

    def __init__(
        self,
        entries: Mapping[int, Sequence[float]] | None = None,
        default_rule: Callable[[int], Sequence[float]] | None = None,
    ):
        self._entries: dict[int, Vector] = {}
        if entries:
            for i, v in entries.items():
                self._entries[int(i)] = tuple(float(c) for c in v)
        self._default = default_rule

    def get_state(self, i: int) -> Vector:
        v = self._entries.get(i)
        if v is not None:
            return v
        if self._default is not None:
            return tuple(float(c) for c in self._default(i))
        raise MissingInitialState(i)

    def covers(self, i: int) -> bool:
        return i in self._entries or self._default is not None

    def sup_norm(self) -> float:
        return max((norm_of(v) for v in self._entries.values()), default=0.0)

    def __getitem__(self, i: int) -> Vector:
        return self._entries[i]

    def __iter__(self):
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    @classmethod
    def constant(cls, value: Sequence[float]) -> "StateWindow":
        v = tuple(float(c) for c in value)
        return cls(default_rule=lambda i: v)


class InputSignal:
    """External input rule (index, step) -> vector with a declared sup norm.

    Every evaluation is checked against the declared bound, so a signal
    that was described incorrectly fails loudly instead of silently
    invalidating a certificate that assumed the bound.
    """

    def __init__(self, rule: Callable[[int, int], Sequence[float]], declared_sup_norm: float):
        if declared_sup_norm < 0:
            raise SpecError("declared sup norm must be >= 0")
        self._rule = rule
        self.declared_sup_norm = float(declared_sup_norm)

    def value(self, i: int, k: int) -> Vector:
        v = tuple(float(c) for c in self._rule(i, k))
        if v and norm_of(v) > self.declared_sup_norm:
            raise InputBoundExceeded(
                f"input at (i={i}, k={k}) has norm {norm_of(v)} > declared {self.declared_sup_norm}"
            )
        return v

    @classmethod
    def zero(cls, spec: NetworkSpec) -> "InputSignal":
        return cls(lambda i, k: (0.0,) * spec.input_dim(i), 0.0)

    @classmethod
    def constant(cls, spec: NetworkSpec, level: float) -> "InputSignal":
        lv = float(level)
        return cls(lambda i, k: (lv,) * spec.input_dim(i), abs(lv))


# ---------------------------------------------------------------------------
# Affine dynamics and the registry used by JSON network descriptions.


def _as_matrix(value: Any, rows: int, cols: int, what: str) -> tuple[tuple[float, ...], ...]:
    if isinstance(value, (int, float)):
        if rows == 1 and cols == 1:
            return ((float(value),),)
        raise SpecError(f"{what}: scalar given but shape is {rows}x{cols}")
    m = tuple(tuple(float(c) for c in row) for row in value)
    if len(m) != rows or any(len(r) != cols for r in m):
        raise SpecError(f"{what}: expected shape {rows}x{cols}")
    return m


def make_affine_dynamics(
    state_dim: int,
    neighbor_dims: Sequence[int],
    input_dim: int,
    self_coeff: Any,
    neighbor_coeffs: Sequence[Any],
    input_coeff: Any = None,
    constant: Sequence[float] | None = None,
) -> DynamicsFn:
    """x+ = A x + sum_k D_k xbar_k + B u + c with fixed coefficients.

    Scalars are accepted for 1x1 blocks.  The scalar case is evaluated
    with a fixed left-to-right accumulation so repeated runs are
    bit-identical.
    """
    a = _as_matrix(self_coeff, state_dim, state_dim, "self coefficient")
    ds = tuple(
        _as_matrix(dk, state_dim, nd, f"neighbor coefficient {k}")
        for k, (dk, nd) in enumerate(zip(neighbor_coeffs, neighbor_dims))
    )
    if len(ds) != len(neighbor_dims):
        raise SpecError("one coefficient block per neighbor is required")
    b = (
        _as_matrix(input_coeff, state_dim, input_dim, "input coefficient")
        if input_coeff is not None
        else tuple((0.0,) * input_dim for _ in range(state_dim))
    )
    c = tuple(float(v) for v in constant) if constant is not None else (0.0,) * state_dim
    if len(c) != state_dim:
        raise SpecError("constant term has wrong length")

    scalar = state_dim == 1 and input_dim == 1 and all(nd == 1 for nd in neighbor_dims)
    if scalar:
        a0 = a[0][0]
        d0 = tuple(dk[0][0] for dk in ds)
        b0 = b[0][0]
        c0 = c[0]

        def scalar_step(i: int, x: Vector, xbar: tuple[Vector, ...], u: Vector, params: Any) -> Vector:
            acc = a0 * x[0]
            for dk, xb in zip(d0, xbar):
                acc = acc + dk * xb[0]
            acc = acc + b0 * u[0]
            acc = acc + c0
            return (acc,)

        return scalar_step

    def step(i: int, x: Vector, xbar: tuple[Vector, ...], u: Vector, params: Any) -> Vector:
        out = []
        for r in range(state_dim):
            acc = 0.0
            for col, xc in zip(a[r], x):
                acc = acc + col * xc
            for dk, xb in zip(ds, xbar):
                for col, xc in zip(dk[r], xb):
                    acc = acc + col * xc
            for col, uc in zip(b[r], u):
                acc = acc + col * uc
            acc = acc + c[r]
            out.append(acc)
        return tuple(out)

    return step


DYNAMICS_REGISTRY: dict[str, DynamicsFn] = {}


def register_dynamics(name: str, fn: DynamicsFn) -> None:
    """Expose a closed-form update map to JSON network descriptions."""
    if name in DYNAMICS_REGISTRY:
        raise SpecError(f"dynamics {name!r} already registered")
    DYNAMICS_REGISTRY[name] = fn


# ---------------------------------------------------------------------------
# JSON network descriptions (see docs/config-schema.md).


def _assign_from_json(data: dict) -> Callable[[int], str]:
    kind = data.get("kind")
    if kind == "constant":
        cid = str(data["class_id"])
        return lambda i: cid
    if kind == "residue":
        modulus = int(data["modulus"])
        if modulus < 1:
            raise SpecError("residue assignment needs modulus >= 1")
        table = {int(k) % modulus: str(v) for k, v in data["map"].items()}
        special = {int(k): str(v) for k, v in data.get("special", {}).items()}

        def assign(i: int) -> str:
            if i in special:
                return special[i]
            r = i % modulus
            if r not in table:
                raise SpecError(f"residue {r} has no class in assignment map")
            return table[r]

        return assign
    raise SpecError(f"unknown assignment kind {kind!r}")


def _neighbors_from_json(data: dict, assign: Callable[[int], str]) -> Callable[[int], Sequence[int]]:
    kind = data.get("kind")
    if kind == "none":
        return lambda i: ()
    if kind == "chain":
        offset = int(data.get("offset", 1))

        def chain(i: int) -> Sequence[int]:
            j = i + offset
            return (j,) if j >= 1 and j != i else ()

        return chain
    if kind == "offsets-by-class":
        table = {str(k): tuple(int(o) for o in v) for k, v in data["offsets"].items()}

        def by_class(i: int) -> Sequence[int]:
            offs = table.get(assign(i))
            if offs is None:
                raise SpecError(f"no neighbor offsets for class {assign(i)!r}")
            return tuple(i + o for o in offs)

        return by_class
    raise SpecError(f"unknown neighbor kind {kind!r}")


def spec_from_json(data: dict) -> NetworkSpec:
    """Build a NetworkSpec from its JSON description.

    Dynamics come either from per-class affine coefficient blocks or
    from the registry of named closed-form maps.
    """
    classes = []
    raw_classes = data.get("classes")
    if not raw_classes:
        raise SpecError("network description needs a 'classes' list")
    for raw in raw_classes:
        cid = str(raw["class_id"])
        n = int(raw.get("state_dim", 1))
        p = int(raw.get("input_dim", 1))
        dyn_data = raw["dynamics"]
        dkind = dyn_data.get("kind")
        if dkind == "affine":
            neighbor_coeffs = dyn_data.get("neighbors", [])
            neighbor_dims = dyn_data.get("neighbor_dims", [1] * len(neighbor_coeffs))
            dynamics = make_affine_dynamics(
                n,
                [int(d) for d in neighbor_dims],
                p,
                dyn_data.get("self", 0.0),
                neighbor_coeffs,
                dyn_data.get("input"),
                dyn_data.get("constant"),
            )
        elif dkind == "registered":
            name = str(dyn_data["name"])
            if name not in DYNAMICS_REGISTRY:
                raise SpecError(f"dynamics {name!r} not registered")
            dynamics = DYNAMICS_REGISTRY[name]
        else:
            raise SpecError(f"unknown dynamics kind {dkind!r}")
        target = raw.get("target_set")
        classes.append(
            SubsystemClass(
                class_id=cid,
                state_dim=n,
                input_dim=p,
                dynamics=dynamics,
                target_set=set_from_json(target) if target else PointSet((0.0,) * n),
            )
        )
    assign = _assign_from_json(data["assign"])
    neighbors = _neighbors_from_json(data["neighbors"], assign)
    bound = data.get("max_out_degree_bound")
    return NetworkSpec(classes, assign, neighbors, int(bound) if bound is not None else None)
