"""Small built-in networks used by tests, docs and the CLI.

Each builder returns a NetworkSpec over indices 1, 2, ...; all of them
are scalar per subsystem with a one-dimensional input slot (possibly
unused) so they compose with every checker in the package.
"""

from __future__ import annotations

from .distance import BoxSet, PointSet
from .network import NetworkSpec, SubsystemClass, Vector, make_affine_dynamics


def scalar_chain(self_factor: float = 0.5, coupling: float = 0.0, input_coeff: float = 0.0) -> NetworkSpec:
    """x_i+ = a x_i + c x_{i+1} + b u_i on the forward chain."""
    dynamics = make_affine_dynamics(1, [1], 1, self_factor, [coupling], input_coeff)
    cls = SubsystemClass(
        class_id="chain",
        state_dim=1,
        input_dim=1,
        dynamics=dynamics,
        target_set=PointSet((0.0,)),
    )
    return NetworkSpec([cls], assign=lambda i: "chain", neighbors=lambda i: (i + 1,), max_out_degree_bound=1)


def decoupled(self_factor: float) -> NetworkSpec:
    """x_i+ = a x_i with no neighbors; a > 1 gives an expanding family."""
    dynamics = make_affine_dynamics(1, [], 1, self_factor, [])
    cls = SubsystemClass(
        class_id="cell",
        state_dim=1,
        input_dim=1,
        dynamics=dynamics,
        target_set=PointSet((0.0,)),
    )
    return NetworkSpec([cls], assign=lambda i: "cell", neighbors=lambda i: (), max_out_degree_bound=0)


def two_class_pair(up: float = 1.5, down: float = 0.1) -> NetworkSpec:
    """Disjoint pairs (2m-1, 2m) exchanging state: odd members amplify
    their partner by `up`, even members attenuate by `down`.

    The composition over two steps contracts by up * down even though a
    single step expands, which is the canonical example separating
    one-step from multi-step decrease certificates.
    """
    amp = SubsystemClass(
        class_id="amplifier",
        state_dim=1,
        input_dim=1,
        dynamics=make_affine_dynamics(1, [1], 1, 0.0, [up]),
        target_set=PointSet((0.0,)),
    )
    att = SubsystemClass(
        class_id="attenuator",
        state_dim=1,
        input_dim=1,
        dynamics=make_affine_dynamics(1, [1], 1, 0.0, [down]),
        target_set=PointSet((0.0,)),
    )

    def assign(i: int) -> str:
        return "amplifier" if i % 2 == 1 else "attenuator"

    def neighbors(i: int):
        return (i + 1,) if i % 2 == 1 else (i - 1,)

    return NetworkSpec([amp, att], assign=assign, neighbors=neighbors, max_out_degree_bound=1)


def _index_scaled_step(i: int, x: Vector, xbar: tuple[Vector, ...], u: Vector, params) -> Vector:
    """Piecewise map with target interval [-i, i] and local slope i.

    Outside the interval the state moves half the distance back toward
    it; on [-1/2, 1/2] the map is x -> i * x; in between, an odd linear
    ramp keeps the interval invariant and the map continuous.  The local
    slope grows with the index, so the family admits no uniform growth
    bound: a constant state of 1/4 maps to an unbounded sequence.
    """
    v = x[0]
    hi = float(i)
    av = abs(v)
    sign = 1.0 if v >= 0.0 else -1.0
    if av > hi:
        return (v - 0.5 * (av - hi) * sign,)
    if av <= 0.5:
        return (hi * v,)
    ramp = (hi / 2.0) * (1.0 + (av - 0.5) / (hi - 0.5)) if hi > 0.5 else av
    return (sign * ramp,)


def index_scaled_family() -> NetworkSpec:
    """Decoupled family whose local gain at radius 1/4 equals i/4."""
    cls = SubsystemClass(
        class_id="scaled",
        state_dim=1,
        input_dim=1,
        dynamics=_index_scaled_step,
        target_set=lambda i: BoxSet((-float(i),), (float(i),)),
    )
    return NetworkSpec([cls], assign=lambda i: "scaled", neighbors=lambda i: (), max_out_degree_bound=0)
