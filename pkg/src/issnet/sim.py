"""Lazy simulation driven by dependency cones.

To produce K steps of the subsystems in an observation set S, only the
indices that can influence S within K steps matter.  The cone is the
breadth-first closure of S under the neighbor rule; simulation runs on
a shrinking sequence of windows, cone(S, K) at time 0 down to S itself
at time K.  This is what makes networks over countably many subsystems
runnable.

Determinism contract: windows are evaluated in sorted index order, each
step reads only the previous window, and all arithmetic is plain IEEE
double, so equal seeds and configs give bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .errors import SpecError
from .network import InputSignal, NetworkSpec, StateWindow, Vector, subsystem_step


def dependency_cone(spec: NetworkSpec, observed: Iterable[int], depth: int) -> frozenset[int]:
    """Indices that can influence the observed set within `depth` steps."""
    levels = cone_levels(spec, observed, depth)
    return levels[-1]


def cone_levels(spec: NetworkSpec, observed: Iterable[int], depth: int) -> list[frozenset[int]]:
    """All cones [I_S(0), ..., I_S(depth)], grown one neighbor layer at a time."""
    if depth < 0:
        raise SpecError("cone depth must be >= 0")
    current = set(int(i) for i in observed)
    if not current:
        raise SpecError("observation set must be nonempty")
    if min(current) < 1:
        raise SpecError("indices start at 1")
    levels = [frozenset(current)]
    frontier = set(current)
    for _ in range(depth):
        fresh: set[int] = set()
        for i in frontier:
            for j in spec.neighbors_of(i):
                if j not in current:
                    fresh.add(j)
        current |= fresh
        frontier = fresh
        levels.append(frozenset(current))
    return levels


@dataclass
class Trajectory:
    """Recorded run: states[k] covers cone(S, K - k), ending at S.

    The observed indices are present in every window.  sup norms and
    certificate checks computed from a trajectory are sups over the
    recorded windows.
    """

    spec: NetworkSpec
    observed: tuple[int, ...]
    horizon: int
    states: list[dict[int, Vector]]
    input: InputSignal

    def window(self, k: int) -> dict[int, Vector]:
        return self.states[k]

    def value(self, k: int, i: int) -> Vector:
        return self.states[k][i]

    def to_csv(self, path) -> None:
        write_trajectory_csv(path, self.states)


def write_trajectory_csv(path, states: Sequence[Mapping[int, Vector]]) -> None:
    """Rows (k, index, component, value) sorted, header mandatory.

    Values are written with repr, which round-trips doubles exactly.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,index,component,value\n")
        for k, window in enumerate(states):
            for i in sorted(window):
                for comp, value in enumerate(window[i]):
                    fh.write(f"{k},{i},{comp},{value!r}\n")


def _input_at(u: InputSignal, i: int, k: int) -> Vector:
    return u.value(i, k)


def _run_window_steps(
    spec: NetworkSpec,
    levels: Sequence[frozenset[int]],
    initial: StateWindow | Mapping[int, Vector],
    input_at: Callable[[int, int], Vector],
    steps: int,
) -> list[dict[int, Vector]]:
    """Shared stepping core for simulate and iterate_M.

    levels[j] is the index set needed j steps before the end; the
    window at time k covers levels[steps - k].
    """

    def initial_state(i: int) -> Vector:
        if isinstance(initial, StateWindow):
            return initial.get_state(i)
        return initial[i]

    states: list[dict[int, Vector]] = []
    first = {i: initial_state(i) for i in sorted(levels[steps])}
    states.append(first)
    for k in range(steps):
        prev = states[-1]
        cover = levels[steps - k - 1]
        nxt: dict[int, Vector] = {}
        for i in sorted(cover):
            xbar = tuple(prev[j] for j in spec.neighbors_of(i))
            nxt[i] = subsystem_step(spec, i, prev[i], xbar, input_at(i, k))
        states.append(nxt)
    return states


def simulate(
    spec: NetworkSpec,
    initial: StateWindow,
    u: InputSignal,
    horizon: int,
    observed: Iterable[int],
) -> Trajectory:
    """Run the network `horizon` steps for the observed indices.

    The initial window must cover cone(S, horizon); a missing value
    raises MissingInitialState before any stepping happens.
    """
    if horizon < 0:
        raise SpecError("horizon must be >= 0")
    obs = tuple(sorted(set(int(i) for i in observed)))
    levels = cone_levels(spec, obs, horizon)
    for i in levels[-1]:
        if not initial.covers(i):
            # get_state raises the precise error with the index
            initial.get_state(i)
    states = _run_window_steps(spec, levels, initial, lambda i, k: _input_at(u, i, k), horizon)
    return Trajectory(spec=spec, observed=obs, horizon=horizon, states=states, input=u)


InputStep = Callable[[int], Vector]


def iterate_M(
    spec: NetworkSpec,
    initial: StateWindow | Mapping[int, Vector],
    inputs: Sequence[InputStep | Mapping[int, Vector]] | InputSignal,
    observed: Iterable[int],
) -> dict[int, Vector]:
    """State after len(inputs) steps, restricted to the observed set.

    inputs is the sequence u_0, ..., u_{M-1}: per-step maps index ->
    input vector (callables or mappings).  A signal can be adapted with
    input_steps_from_signal.  Runs the same stepping core as simulate,
    so the result is bit-identical to simulate(...).states[M].
    """
    if isinstance(inputs, InputSignal):
        raise SpecError("iterate_M takes a sequence of per-step inputs; adapt a signal with input_steps_from_signal")
    steps = len(inputs)
    obs = tuple(sorted(set(int(i) for i in observed)))
    levels = cone_levels(spec, obs, steps)

    def input_at(i: int, k: int) -> Vector:
        uk = inputs[k]
        v = uk(i) if callable(uk) else uk[i]
        return tuple(float(c) for c in v)

    states = _run_window_steps(spec, levels, initial, input_at, steps)
    return {i: states[-1][i] for i in obs}


def input_steps_from_signal(spec: NetworkSpec, u: InputSignal, steps: int) -> list[InputStep]:
    """Materialize u_0..u_{steps-1} as per-step maps for iterate_M."""
    return [(lambda k: (lambda i: u.value(i, k)))(k) for k in range(steps)]
