"""Finite truncations of countable networks.

Keeping subsystems 1..n turns the states the retained part reads from
outside, the interface set, into extra inputs.  Feeding the recorded
interface signal of a full run back into the truncation reproduces the
retained components exactly, which is the consistency check; feeding
zeros (or any other signal) gives the truncated system in its own
right.  The decrease certificate survives truncation with the same
contraction and one extra interface term, independent of n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .certify import StorageFamily, overall_V
from .comparison import KLBound, ScalarGain
from .distance import nearest_point, norm_of
from .errors import SpecError
from .network import InputSignal, NetworkSpec, StateWindow, Vector, subsystem_step
from .report import CertificateReport, ReportBuilder, Tolerances
from .sim import Trajectory, simulate

InterfaceSignal = Callable[[int, int], Vector]


@dataclass(frozen=True)
class TruncatedNetwork:
    """Subsystems 1..n of a network, interface states promoted to inputs."""

    spec: NetworkSpec
    n: int
    interface: tuple[int, ...]


def build_truncation(spec: NetworkSpec, n: int) -> TruncatedNetwork:
    """Retain subsystems 1..n; the interface is every outside neighbor."""
    if n < 1:
        raise SpecError("truncation needs n >= 1")
    outside: set[int] = set()
    for i in range(1, n + 1):
        for j in spec.neighbors_of(i):
            if j > n:
                outside.add(j)
    return TruncatedNetwork(spec=spec, n=n, interface=tuple(sorted(outside)))


def zero_interface(spec: NetworkSpec) -> InterfaceSignal:
    return lambda j, k: (0.0,) * spec.state_dim(j)


def inside_sets_interface(spec: NetworkSpec) -> InterfaceSignal:
    """Interface held at the point of each target set nearest the origin."""

    def at(j: int, k: int) -> Vector:
        return nearest_point((0.0,) * spec.state_dim(j), spec.target_set(j))

    return at


@dataclass
class TruncatedTrajectory:
    """Full windows over 1..n plus the interface values that drove them."""

    network: TruncatedNetwork
    horizon: int
    states: list[dict[int, Vector]]
    interface_values: list[dict[int, Vector]]
    input: InputSignal

    def window(self, k: int) -> dict[int, Vector]:
        return self.states[k]

    def interface_norm(self, k: int) -> float:
        vals = self.interface_values[k]
        return max((norm_of(v) for v in vals.values()), default=0.0)


def simulate_truncated(
    tn: TruncatedNetwork,
    initial: StateWindow | Mapping[int, Vector],
    u: InputSignal,
    horizon: int,
    interface: InterfaceSignal | None = None,
) -> TruncatedTrajectory:
    """Run the truncation with the given interface signal (zeros if None).

    Every retained subsystem is stepped at every time, reading outside
    neighbors from the interface signal.  The stepping is the shared
    subsystem_step, so runs agree bitwise with the full network whenever
    the interface values agree.
    """
    if horizon < 0:
        raise SpecError("horizon must be >= 0")
    spec = tn.spec
    signal = interface if interface is not None else zero_interface(spec)

    def initial_state(i: int) -> Vector:
        if isinstance(initial, StateWindow):
            return initial.get_state(i)
        return initial[i]

    states: list[dict[int, Vector]] = [{i: initial_state(i) for i in range(1, tn.n + 1)}]
    used: list[dict[int, Vector]] = []
    for k in range(horizon):
        prev = states[-1]
        boundary: dict[int, Vector] = {}
        for j in tn.interface:
            v = tuple(float(c) for c in signal(j, k))
            if len(v) != spec.state_dim(j):
                raise SpecError(f"interface value for {j} has len {len(v)}, expected {spec.state_dim(j)}")
            boundary[j] = v
        nxt: dict[int, Vector] = {}
        for i in range(1, tn.n + 1):
            xbar = tuple(prev[j] if j <= tn.n else boundary[j] for j in spec.neighbors_of(i))
            nxt[i] = subsystem_step(spec, i, prev[i], xbar, u.value(i, k))
        states.append(nxt)
        used.append(boundary)
    used.append({j: tuple(float(c) for c in signal(j, horizon)) for j in tn.interface})
    return TruncatedTrajectory(network=tn, horizon=horizon, states=states, interface_values=used, input=u)


def truncated_V(family: StorageFamily, n: int, window: Mapping[int, Vector]) -> float:
    """Storage of the truncation: max of W_i over i = 1..n."""
    best = 0.0
    for i in range(1, n + 1):
        v = family.value(i, window[i])
        if v > best:
            best = v
    return best


def check_truncated_decay(
    tn: TruncatedNetwork,
    family: StorageFamily,
    alpha: ScalarGain,
    omega_upper: ScalarGain,
    gamma_u_bar: ScalarGain,
    traj: TruncatedTrajectory,
    tolerances: Tolerances = Tolerances(),
) -> CertificateReport:
    """Stepwise decrease with the interface as a disturbance:

        V(k+1) <= max( alpha(V(k)),
                       alpha(omega_upper(|interface(k)|)),
                       gamma_u_bar(||u||) )

    The contraction alpha is the one certified for the full network;
    nothing in the bound depends on n.
    """
    builder = ReportBuilder("truncated-decay", tolerances)
    input_term = gamma_u_bar(traj.input.declared_sup_norm)
    for k in range(traj.horizon):
        v_now = truncated_V(family, tn.n, traj.window(k))
        v_next = truncated_V(family, tn.n, traj.window(k + 1))
        boundary = alpha(omega_upper(traj.interface_norm(k)))
        builder.record({"k": k}, v_next, max(alpha(v_now), boundary, input_term))
    return builder.build(
        grid={"n": tn.n, "horizon": traj.horizon, "interface_size": len(tn.interface)},
        notes=["V is a max over the retained subsystems"],
    )


@dataclass
class InterfaceRecording:
    """Interface trace of a full run, with its boundedness profile."""

    n: int
    interface: tuple[int, ...]
    values: list[dict[int, Vector]]
    sup_norms: tuple[float, ...]
    bound_report: CertificateReport | None

    def signal(self) -> InterfaceSignal:
        vals = self.values

        def at(j: int, k: int) -> Vector:
            return vals[k][j]

        return at

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("k,index,component,value\n")
            for k, window in enumerate(self.values):
                for j in sorted(window):
                    for comp, value in enumerate(window[j]):
                        fh.write(f"{k},{j},{comp},{value!r}\n")


def record_interface_signal(
    spec: NetworkSpec,
    n: int,
    initial: StateWindow,
    u: InputSignal,
    horizon: int,
    beta: KLBound | None = None,
    gamma: ScalarGain | None = None,
    tolerances: Tolerances = Tolerances(),
) -> tuple[Trajectory, InterfaceRecording]:
    """Simulate the full network watching 1..n plus the interface, and
    extract the interface trace.

    When a decay bound beta and input gain gamma are supplied, the trace
    norms are checked against max(beta(r0, k), gamma(||u||)), where r0
    is the sup norm of the initial window over the observed indices, and
    the verdict is attached to the recording.
    """
    tn = build_truncation(spec, n)
    observed = tuple(range(1, n + 1)) + tn.interface
    traj = simulate(spec, initial, u, horizon, observed)
    values: list[dict[int, Vector]] = []
    sup_norms: list[float] = []
    for k in range(horizon + 1):
        window = traj.window(k)
        vals = {j: window[j] for j in tn.interface}
        values.append(vals)
        sup_norms.append(max((norm_of(v) for v in vals.values()), default=0.0))
    bound_report = None
    if beta is not None and gamma is not None:
        builder = ReportBuilder("interface-boundedness", tolerances)
        first = traj.window(0)
        r0 = max((norm_of(first[i]) for i in observed), default=0.0)
        input_term = gamma(u.declared_sup_norm)
        for k, s in enumerate(sup_norms):
            builder.record({"k": k}, s, max(beta(r0, k), input_term))
        bound_report = builder.build(grid={"n": n, "horizon": horizon})
    rec = InterfaceRecording(
        n=n,
        interface=tn.interface,
        values=values,
        sup_norms=tuple(sup_norms),
        bound_report=bound_report,
    )
    return traj, rec


@dataclass(frozen=True)
class ConsistencyResult:
    passed: bool
    max_deviation: float
    n: int
    horizon: int
    checked_values: int

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "n": self.n,
            "horizon": self.horizon,
            "checked_values": self.checked_values,
        }


def consistency_check(
    spec: NetworkSpec,
    n: int,
    initial: StateWindow,
    u: InputSignal,
    horizon: int,
) -> ConsistencyResult:
    """Truncation driven by the recorded interface signal must equal the
    full run on components 1..n at every step, bitwise.

    Both paths execute the same subsystem_step on the same doubles, so
    the deviation of a correct implementation is exactly zero; any
    nonzero deviation means the two evaluation routes diverged.
    """
    traj, rec = record_interface_signal(spec, n, initial, u, horizon)
    tn = build_truncation(spec, n)
    trunc = simulate_truncated(tn, {i: traj.window(0)[i] for i in range(1, n + 1)}, u, horizon, rec.signal())
    worst = 0.0
    checked = 0
    for k in range(horizon + 1):
        full_w = traj.window(k)
        trunc_w = trunc.window(k)
        for i in range(1, n + 1):
            for a, b in zip(full_w[i], trunc_w[i]):
                d = abs(a - b)
                checked += 1
                if d > worst:
                    worst = d
    return ConsistencyResult(
        passed=worst == 0.0,
        max_deviation=worst,
        n=n,
        horizon=horizon,
        checked_values=checked,
    )
