import pytest

from conftest import random_chain_spec, random_window
from issnet import zoo
from issnet.certify import ScaledDistance, StorageFamily
from issnet.comparison import Exponential, Linear
from issnet.errors import SpecError
from issnet.network import InputSignal, StateWindow
from issnet.report import Tolerances
from issnet.sim import simulate
from issnet.traffic import TrafficParams, build_traffic_network, traffic_certificate
from issnet.truncate import (
    build_truncation,
    check_truncated_decay,
    consistency_check,
    inside_sets_interface,
    record_interface_signal,
    simulate_truncated,
    truncated_V,
    zero_interface,
)

TOL = Tolerances(atol=1e-9, rtol=1e-9)


def test_interface_enumeration_chain():
    tn = build_truncation(zoo.scalar_chain(), 5)
    assert tn.interface == (6,)
    assert build_truncation(zoo.decoupled(0.5), 7).interface == ()
    with pytest.raises(SpecError):
        build_truncation(zoo.scalar_chain(), 0)


def test_interface_enumeration_traffic():
    spec = build_traffic_network(TrafficParams())
    assert build_truncation(spec, 8).interface == (10, 12)
    assert build_truncation(spec, 30).interface == (32, 34)


def test_truncated_run_with_zero_interface():
    spec = zoo.scalar_chain(0.5, coupling=0.5)
    tn = build_truncation(spec, 2)
    traj = simulate_truncated(tn, StateWindow.constant((1.0,)), InputSignal.zero(spec), 2)
    # cell 2 reads the zeroed interface cell 3, cell 1 reads cell 2
    assert traj.window(1) == {1: (1.0,), 2: (0.5,)}
    assert traj.window(2) == {1: (0.75,), 2: (0.25,)}
    assert traj.interface_norm(0) == 0.0


def test_interface_signal_variants():
    spec = zoo.index_scaled_family()
    zero = zero_interface(spec)
    assert zero(4, 0) == (0.0,)
    inside = inside_sets_interface(spec)
    # the origin already lies in every box target, so the nearest point
    # is the origin itself
    assert inside(4, 0) == (0.0,)


def test_consistency_zero_deviation_chain():
    spec = zoo.scalar_chain(0.5, coupling=0.25)
    initial = StateWindow(default_rule=lambda i: (float(i % 5),))
    got = consistency_check(spec, 4, initial, InputSignal.zero(spec), 12)
    assert got.passed
    assert got.max_deviation == 0.0
    assert got.checked_values == 4 * 13


@pytest.mark.parametrize("seed", [0, 1, 5])
def test_consistency_zero_deviation_random_specs(seed):
    spec = random_chain_spec(seed)
    win = random_window(spec, seed)
    u = InputSignal(lambda i, k: (0.5,), declared_sup_norm=0.5)
    got = consistency_check(spec, 6, win, u, 10)
    assert got.passed
    assert got.max_deviation == 0.0


def test_truncation_nesting():
    # a larger truncation replayed on recorded interface data agrees
    # with a smaller one on the shared cells, both equal to the full run
    spec = build_traffic_network(TrafficParams())
    initial = StateWindow(default_rule=lambda i: (float((i * 7) % 11),))
    u = InputSignal.constant(spec, 0.5)
    small = consistency_check(spec, 8, initial, u, 10)
    large = consistency_check(spec, 16, initial, u, 10)
    assert small.passed and large.passed


def test_truncated_V_and_decay():
    params = TrafficParams()
    spec = build_traffic_network(params)
    family, _, alpha, gub = traffic_certificate(params)
    tn = build_truncation(spec, 8)
    initial = StateWindow(default_rule=lambda i: (10.0,))
    u = InputSignal.constant(spec, 1.0)
    traj = simulate_truncated(tn, initial, u, 40, zero_interface(spec))
    assert truncated_V(family, 8, traj.window(0)) == 10.0
    rep = check_truncated_decay(tn, family, Linear(alpha), Linear(1.0), Linear(gub), traj, TOL)
    assert rep.passed

    # an interface held at a large constant must enter the bound; with
    # the interface term dropped the check fails
    big = simulate_truncated(tn, StateWindow.constant((0.0,)), InputSignal.zero(spec), 5, lambda j, k: (50.0,))
    with_term = check_truncated_decay(tn, family, Linear(alpha), Linear(1.0), Linear(gub), big, TOL)
    assert with_term.passed
    without = check_truncated_decay(tn, family, Linear(alpha), Linear(0.0), Linear(gub), big, TOL)
    assert not without.passed


def test_record_interface_with_bound_report():
    spec = zoo.scalar_chain(0.5, coupling=0.25)
    initial = StateWindow.constant((2.0,))
    traj, rec = record_interface_signal(
        spec, 3, initial, InputSignal.zero(spec), 6,
        beta=Exponential(1.0, 0.75), gamma=Linear(1.0), tolerances=TOL,
    )
    assert rec.interface == (4,)
    assert rec.n == 3
    assert len(rec.values) == 7
    assert rec.bound_report is not None
    assert rec.bound_report.passed
    # interface values replay the full trajectory
    for k in range(7):
        assert rec.signal()(4, k) == traj.value(k, 4)


def test_recording_csv(tmp_path):
    spec = zoo.scalar_chain(0.5)
    _, rec = record_interface_signal(spec, 2, StateWindow.constant((1.0,)), InputSignal.zero(spec), 1)
    out = tmp_path / "i.csv"
    rec.to_csv(out)
    assert out.read_text() == "k,index,component,value\n0,3,0,1.0\n1,3,0,0.5\n"
