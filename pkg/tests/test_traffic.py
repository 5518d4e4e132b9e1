import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from issnet.certify import check_M_step_decrease, small_gain_check, StateGridSpec
from issnet.comparison import Linear, Zero
from issnet.errors import CertificateRefused, SpecError
from issnet.network import InputSignal, StateWindow, validate_spec
from issnet.report import Tolerances
from issnet.sim import dependency_cone
from issnet.traffic import (
    TrafficParams,
    alpha_value,
    build_traffic_network,
    class_gain_value,
    class_id_for,
    feeder_indices,
    gamma_u_bar_value,
    initial_density,
    input_gain_value,
    intermediate_bound_check,
    run_scaling_experiment,
    run_truncation_fast,
    traffic_certificate,
)
from issnet.truncate import build_truncation, simulate_truncated, zero_interface

TOL = Tolerances(atol=1e-9, rtol=1e-9)

CLASS_TABLE_1_TO_12 = [
    "head",
    "through-b",
    "head-entry",
    "entry-full",
    "entry-half",
    "through-a",
    "through-c",
    "exit-b",
    "exit-a",
    "through-b",
    "through-d",
    "entry-full",
]


def test_first_block_classes():
    assert [class_id_for(i) for i in range(1, 13)] == CLASS_TABLE_1_TO_12
    # the pattern repeats with period 8 past the opening cells
    for i in range(4, 100):
        assert class_id_for(i + 8) == class_id_for(i)


def test_every_cell_has_exactly_one_class():
    for i in range(1, 201):
        assert class_id_for(i) in set(CLASS_TABLE_1_TO_12) | {"through-d"}
    with pytest.raises(SpecError):
        class_id_for(0)


def test_feeder_structure():
    assert feeder_indices(1) == (2,)
    assert feeder_indices(3) == (4,)
    assert feeder_indices(4) == (8,)
    assert feeder_indices(5) == (1,)
    assert feeder_indices(6) == (5, 10)
    assert feeder_indices(8) == (7, 12)


def test_out_degree_at_most_two():
    readers = {}
    for i in range(1, 401):
        for j in feeder_indices(i):
            readers[j] = readers.get(j, 0) + 1
    # interior cells are fully covered by the sampled readers
    assert max(readers[j] for j in range(1, 201)) == 2


def test_network_validates():
    spec = build_traffic_network(TrafficParams())
    diag = validate_spec(spec, sample_window=128)
    assert diag.ok
    assert diag.max_in_degree == 2
    assert diag.max_out_degree == 2


def test_dependency_cone_example():
    spec = build_traffic_network(TrafficParams())
    assert dependency_cone(spec, [6], 1) == frozenset({5, 6, 10})


def test_cell_coefficients():
    p = TrafficParams()
    spec = build_traffic_network(p)
    # through cell: keeps all but the outflow share, one per feeder slot
    a, inflow, entry = spec.params_of(6)
    assert a == 1.0 - 0.02
    assert inflow == (0.02 * 0.1, 0.02 * 0.1)
    assert entry is None
    # full entry cell reads one feeder and the light
    a4, inflow4, entry4 = spec.params_of(4)
    assert a4 == 1.0 - 0.02
    assert inflow4 == (0.02 * 0.1,)
    assert entry4 == 0.02
    # double exit drains twice the share
    a8, _, _ = spec.params_of(8)
    assert a8 == 1.0 - 0.02 * (1.0 + 2.0 * 0.1)


def test_params_validation():
    with pytest.raises(SpecError):
        TrafficParams(period=0.0)
    with pytest.raises(SpecError):
        TrafficParams(inflow_share=0.5)
    with pytest.raises(SpecError):
        TrafficParams(gain_margin=0.0)
    with pytest.raises(SpecError):
        TrafficParams(speed_min=2.0, speed_max=1.0)
    # drain plus exits may not push a cell negative in one period
    with pytest.raises(SpecError):
        TrafficParams(period=0.5, exit_share=0.9)


def test_alpha_and_gains():
    p = TrafficParams()
    assert alpha_value(p) == 0.985
    # classes without exits share the certified decay factor bitwise
    for cid in ("head", "head-entry", "entry-full", "entry-half", "through-a", "through-b", "through-c", "through-d"):
        assert class_gain_value(p, cid) == alpha_value(p)
    assert class_gain_value(p, "exit-a") < alpha_value(p)
    assert class_gain_value(p, "exit-b") < class_gain_value(p, "exit-a")
    assert gamma_u_bar_value(p) == 0.02 * 1.0 / 0.003
    assert input_gain_value(p, "entry-full") == gamma_u_bar_value(p)
    assert input_gain_value(p, "entry-half") == 0.02 * 0.5 / 0.003
    assert input_gain_value(p, "through-a") == 0.0


def test_certificate_structure_and_checks():
    p = TrafficParams()
    family, gains, alpha, gub = traffic_certificate(p)
    assert alpha == alpha_value(p)
    assert gub == gamma_u_bar_value(p)
    assert gains.alpha == Linear(alpha)
    assert gains.internal_gain("through-a", "entry-half", "n0") == Linear(alpha)
    assert gains.input_gain("through-a") == Zero()
    assert gains.input_gain("entry-full") == Linear(gub)
    assert small_gain_check(gains, 10.0, tolerances=TOL).passed
    assert family.value(1, (3.0,)) == 3.0


def test_certificate_refused_when_margin_eats_decay():
    p = TrafficParams(gain_margin=0.05)
    with pytest.raises(CertificateRefused) as err:
        traffic_certificate(p)
    assert err.value.margin == pytest.approx(alpha_value(p) - 1.0)
    assert err.value.margin > 0


def test_certificate_with_tighter_margin():
    # the margin can shrink to the secondary feeder coefficient and the
    # certificate still issues, with a smaller decay factor
    p = TrafficParams(gain_margin=0.001)
    _, _, alpha, _ = traffic_certificate(p)
    assert alpha == 0.983
    # but the fold into max form now fails on two-feeder cells
    assert not intermediate_bound_check(p, tolerances=TOL).passed


def test_intermediate_bound_holds_with_default_margin():
    rep = intermediate_bound_check(TrafficParams(), tolerances=TOL)
    assert rep.passed


def test_one_step_decrease_on_grid():
    p = TrafficParams()
    spec = build_traffic_network(p)
    family, gains, _, _ = traffic_certificate(p)
    rep = check_M_step_decrease(
        spec, family, gains, 1,
        StateGridSpec(radius=20.0, target_points=200),
        (0.0, 1.0),
        tolerances=TOL,
    )
    assert rep.passed


def test_initial_density_deterministic_and_bounded():
    assert initial_density(0, 1) == initial_density(0, 1)
    assert initial_density(0, 1) != initial_density(0, 2)
    assert initial_density(0, 1) != initial_density(1, 1)
    assert all(0.0 <= initial_density(0, i) < 20.0 for i in range(1, 1000))


def test_fast_stepper_matches_generic_bitwise():
    p = TrafficParams()
    spec = build_traffic_network(p)
    n, horizon = 12, 15
    initial = [initial_density(3, i) for i in range(1, n + 1)]
    observed = list(range(1, n + 1))
    _, series = run_truncation_fast(spec, n, initial, 1.0, horizon, observed)

    tn = build_truncation(spec, n)
    window = StateWindow({i: (initial[i - 1],) for i in range(1, n + 1)})
    traj = simulate_truncated(tn, window, InputSignal.constant(spec, 1.0), horizon, zero_interface(spec))
    for k in range(horizon + 1):
        for i in observed:
            assert series[i][k] == traj.window(k)[i][0], (i, k)


def test_fast_stepper_v_series_is_sup_density():
    p = TrafficParams()
    spec = build_traffic_network(p)
    initial = [float(i) for i in range(1, 9)]
    v_series, series = run_truncation_fast(spec, 8, initial, 0.0, 5, [1])
    assert v_series[0] == 8.0
    assert len(v_series) == 6
    with pytest.raises(SpecError):
        run_truncation_fast(spec, 8, [1.0], 0.0, 5, [1])


@given(st.integers(min_value=0, max_value=50), st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=30, deadline=None)
def test_densities_stay_nonnegative(seed, level):
    p = TrafficParams()
    spec = build_traffic_network(p)
    n = 16
    initial = [initial_density(seed, i) for i in range(1, n + 1)]
    v_series, series = run_truncation_fast(spec, n, initial, level, 20, list(range(1, n + 1)))
    assert all(v >= 0.0 for vals in series.values() for v in vals)


def test_scaling_experiment_artifacts(tmp_path):
    p = TrafficParams()
    result = run_scaling_experiment(p, [16, 48], horizon=25, seed=0, out_dir=tmp_path / "out", tolerances=TOL)
    assert result.passed
    assert result.alpha == alpha_value(p)
    assert [r.n for r in result.runs] == [16, 48]
    for run in result.runs:
        assert run.stepwise.passed
        assert run.trajectory_path.is_file()
        assert run.summary_path.is_file()
        payload = json.loads(run.summary_path.read_text())
        assert payload["alpha"] == result.alpha
        assert payload["stepwise_check"]["passed"] is True
        # the fitted contraction may not beat the certified factor
        if run.contraction_max is not None:
            assert run.contraction_max <= result.alpha + 1e-12
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["alpha_identical_across_sizes"] is True

    # the shared-prefix initial condition makes small sizes prefixes of
    # large ones at time zero
    first = result.runs[0]
    second = result.runs[1]
    assert first.observed_series[1][0] == second.observed_series[1][0]


def test_scaling_experiment_reruns_identically(tmp_path):
    p = TrafficParams()
    a = run_scaling_experiment(p, [16], horizon=10, seed=4, out_dir=tmp_path / "a", tolerances=TOL)
    b = run_scaling_experiment(p, [16], horizon=10, seed=4, out_dir=tmp_path / "b", tolerances=TOL)
    assert a.runs[0].trajectory_path.read_bytes() == b.runs[0].trajectory_path.read_bytes()
    assert a.runs[0].v_series == b.runs[0].v_series
