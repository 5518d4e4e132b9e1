"""Shared factories for seeded random network specs.

Every factory derives all coefficients from the seed through the
portable generator, so a given seed names the same network on every
platform and run.
"""

from issnet.network import NetworkSpec, StateWindow, SubsystemClass, make_affine_dynamics
from issnet.rng import SplitMix64, derive, uniform01_at


def random_chain_spec(seed: int) -> NetworkSpec:
    """Forward-reading chain with seeded affine coefficients.

    Even indices read the next cell, odd ones the next two, so the
    network is locally finite with out-degree at most 2 and every finite
    observation window has a finite dependency cone.  Seeds that are
    multiples of three get a two-dimensional even class, exercising the
    matrix path of the affine dynamics.
    """
    rng = SplitMix64(derive(seed, 11))
    a_even = rng.uniform(-0.45, 0.45)
    a_odd = rng.uniform(-0.45, 0.45)
    b_even = rng.uniform(0.0, 0.5)
    b_odd = rng.uniform(0.0, 0.5)
    matrix = seed % 3 == 0
    if matrix:
        even_dim = 2
        even_dyn = make_affine_dynamics(
            2,
            (1,),
            1,
            [[a_even, rng.uniform(-0.2, 0.2)], [0.0, a_even]],
            ([[rng.uniform(-0.2, 0.2)], [rng.uniform(-0.2, 0.2)]],),
            [[b_even], [0.0]],
        )
        odd_dyn = make_affine_dynamics(
            1,
            (2, 1),
            1,
            a_odd,
            ([[rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)]], [[rng.uniform(-0.2, 0.2)]]),
            b_odd,
        )
    else:
        even_dim = 1
        even_dyn = make_affine_dynamics(1, (1,), 1, a_even, (rng.uniform(-0.2, 0.2),), b_even)
        odd_dyn = make_affine_dynamics(
            1, (1, 1), 1, a_odd, (rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)), b_odd
        )
    even = SubsystemClass("even", even_dim, 1, even_dyn)
    odd = SubsystemClass("odd", 1, 1, odd_dyn)
    return NetworkSpec(
        [even, odd],
        assign=lambda i: "even" if i % 2 == 0 else "odd",
        neighbors=lambda i: (i + 1,) if i % 2 == 0 else (i + 1, i + 2),
        max_out_degree_bound=2,
    )


def random_window(spec: NetworkSpec, seed: int, radius: float = 5.0) -> StateWindow:
    """Initial states drawn per (index, component) from the seed."""

    def rule(i: int):
        return tuple(
            radius * (2.0 * uniform01_at(seed, 3, i, c) - 1.0) for c in range(spec.state_dim(i))
        )

    return StateWindow(default_rule=rule)


def random_step_inputs(seed: int, steps: int, amp: float = 1.0):
    """Per-step input maps u_0..u_{steps-1}, values in [0, amp)."""

    def step_fn(k: int):
        return lambda i: (amp * uniform01_at(seed, 5, i, k),)

    return [step_fn(k) for k in range(steps)]


def brute_force_scalar_dist(x: float, a, step: float = 1e-3) -> float:
    """Grid-minimization oracle for scalar point and box sets.

    Enumerates candidate set members on a grid of the given step and
    returns the smallest absolute difference.  Deliberately independent
    of the library's projection code.
    """
    from issnet.distance import BoxSet, PointSet

    if isinstance(a, PointSet):
        candidates = [a.at[0]]
    elif isinstance(a, BoxSet):
        lo, hi = a.lower[0], a.upper[0]
        n = int(round((hi - lo) / step))
        candidates = [lo + j * step for j in range(n + 1)]
        if not candidates or candidates[-1] < hi:
            candidates.append(hi)
    else:
        raise TypeError(f"oracle covers point and box sets, not {type(a).__name__}")
    return min(abs(x - c) for c in candidates)
