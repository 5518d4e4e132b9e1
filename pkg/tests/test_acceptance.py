"""Acceptance suite: one test per shipped guarantee.

Each test pins its own tolerances and time budget; run with -v to get
one pass/fail line per criterion.
"""

import json
import subprocess
import sys
import time

from conftest import brute_force_scalar_dist, random_chain_spec, random_step_inputs, random_window

from issnet import zoo
from issnet.certify import (
    EissConstants,
    GainTable,
    ScaledDistance,
    StateGridSpec,
    StorageFamily,
    check_M_step_decrease,
    converse_M,
    necessity_construct,
)
from issnet.comparison import Linear, Zero
from issnet.distance import BoxSet, PointSet, dist_product
from issnet.network import (
    InputSignal,
    NetworkSpec,
    StateWindow,
    SubsystemClass,
    make_affine_dynamics,
)
from issnet.report import Tolerances
from issnet.rng import uniform01_at
from issnet.sim import iterate_M, simulate
from issnet.traffic import (
    TrafficParams,
    build_traffic_network,
    initial_density,
    run_scaling_experiment,
    traffic_certificate,
)
from issnet.truncate import consistency_check
from issnet.wellposed import SamplePlan, falsify_uniformity

STRICT = Tolerances(atol=1e-9, rtol=0.0)


def test_criterion_01_traffic_certificate_and_single_step_decrease():
    """Default road parameters certify a decay factor below one, and the
    one-step decrease holds on a thousand-point grid per cell class with
    residual tolerance 1e-9, inside ten seconds."""
    params = TrafficParams()
    start = time.monotonic()
    family, gains, alpha, _ = traffic_certificate(params)
    assert alpha < 1.0
    assert alpha == 0.985
    spec = build_traffic_network(params)
    report = check_M_step_decrease(
        spec, family, gains, 1,
        StateGridSpec(radius=20.0, target_points=1000),
        (0.0, 1.0),
        tolerances=STRICT,
    )
    elapsed = time.monotonic() - start
    assert report.passed, report.to_dict()
    assert report.evaluations >= 1000
    assert elapsed < 10.0


def test_criterion_02_scaling_runs_obey_certified_envelope(tmp_path):
    """Truncations with 100, 1000 and 10000 cells run 500 green-light
    steps; the sup-density satisfies V(k+1) <= max(alpha V(k), input
    bound) at every step for the certified alpha, not a fitted one,
    within sixty seconds."""
    params = TrafficParams()
    _, _, alpha, gamma_u_bar = traffic_certificate(params)
    start = time.monotonic()
    result = run_scaling_experiment(
        params, [100, 1000, 10000], horizon=500, seed=0,
        out_dir=tmp_path / "scaling", tolerances=STRICT,
    )
    elapsed = time.monotonic() - start
    assert result.alpha == alpha
    assert result.passed
    bound = gamma_u_bar * result.input_norm
    for run in result.runs:
        assert run.stepwise.passed
        v = run.v_series
        for k in range(run.horizon):
            assert v[k + 1] <= max(alpha * v[k], bound) + 1e-9, (run.n, k)
    assert elapsed < 60.0


def test_criterion_03_product_distance_matches_grid_oracle():
    """On 100 random instances with up to four scalar components and
    point or box sets, the product-set distance agrees with brute-force
    grid minimization at step 1e-3 to within 1e-3."""
    for case in range(100):
        components = 1 + int(uniform01_at(900, case) * 4)
        window = {}
        sets = {}
        for c in range(1, components + 1):
            x = -3.0 + 6.0 * uniform01_at(901, case, c)
            if uniform01_at(902, case, c) < 0.5:
                target = PointSet((-2.0 + 4.0 * uniform01_at(903, case, c),))
            else:
                lo = -2.0 + 3.0 * uniform01_at(904, case, c)
                target = BoxSet((lo,), (lo + 2.0 * uniform01_at(905, case, c),))
            window[c] = (x,)
            sets[c] = target
        got = dist_product(window, lambda i: sets[i])
        want = max(brute_force_scalar_dist(window[i][0], sets[i]) for i in sets)
        assert abs(got - want) <= 1e-3, (case, got, want)


def test_criterion_04_m_fold_map_equals_stepped_simulation():
    """Over 50 seeded chain networks and M in {1, 2, 5}, the M-fold
    iteration map returns bit-identical states to stepping the
    simulator M times."""
    for seed in range(50):
        spec = random_chain_spec(seed)
        window = random_window(spec, seed)
        observed = [1, 2, 3]
        for m in (1, 2, 5):
            steps = random_step_inputs(seed, m)
            got = iterate_M(spec, window, steps, observed)
            u = InputSignal(
                lambda i, k, _steps=steps, _m=m: _steps[k](i) if k < _m else (0.0,),
                declared_sup_norm=1.0,
            )
            ref = simulate(spec, window, u, m, observed)
            assert got == {i: ref.value(m, i) for i in observed}, (seed, m)


def test_criterion_05_converse_horizon_is_constructive():
    """The converse horizon for overshoot 2, rate 0.9, exponent 1, unit
    envelope weights and contraction 1/2 is exactly 14, and the 14-step
    inequality for x+ = 0.9 x + u holds on a 100 x 10 state/input grid
    with residual at most 1e-9."""
    constants = EissConstants(overshoot=2.0, rate=0.9, exponent=1.0, w_lower=1.0, w_upper=1.0, kappa=0.5)
    m = converse_M(constants)
    assert m == 14

    dynamics = make_affine_dynamics(1, [], 1, 0.9, [], 1.0)
    cell = SubsystemClass("cell", 1, 1, dynamics, PointSet((0.0,)))
    spec = NetworkSpec([cell], assign=lambda i: "cell", neighbors=lambda i: (), max_out_degree_bound=0)
    family = StorageFamily.uniform(spec, ScaledDistance(1.0), Linear(1.0), Linear(1.0))
    gains = GainTable.uniform(Linear(constants.kappa), Linear(20.0), Linear(constants.kappa), Linear(20.0))
    report = check_M_step_decrease(
        spec, family, gains, m,
        StateGridSpec(radius=20.0, target_points=100),
        [2.0 * j / 9 for j in range(10)],
        tolerances=STRICT,
    )
    assert report.passed, report.to_dict()
    assert report.evaluations >= 100 * 10


def test_criterion_06_expanding_pair_needs_two_steps():
    """The amplify/attenuate pair admits no one-step certificate but
    passes the two-step decrease with linear gain 0.15 + 1e-6."""
    spec = zoo.two_class_pair(1.5, 0.1)
    slope = 0.15 + 1e-6
    grid = StateGridSpec(radius=10.0, target_points=200)

    family1, gains1 = necessity_construct(spec, slope, Zero(), 1)
    one = check_M_step_decrease(spec, family1, gains1, 1, grid, (0.0,), tolerances=STRICT)
    assert not one.passed

    family2, gains2 = necessity_construct(spec, slope, Zero(), 2)
    two = check_M_step_decrease(spec, family2, gains2, 2, grid, (0.0,), tolerances=STRICT)
    assert two.passed, two.to_dict()


def test_criterion_07_truncation_replay_deviation_is_exactly_zero():
    """The truncation driven by the recorded interface signal matches
    the full run bitwise: max deviation exactly 0.0 for road networks
    with 100 and 1000 cells over 500 steps, and for 20 seeded chains."""
    params = TrafficParams()
    spec = build_traffic_network(params)
    window = StateWindow(default_rule=lambda i: (initial_density(0, i),))
    lights = InputSignal.constant(spec, 1.0)
    for n in (100, 1000):
        res = consistency_check(spec, n, window, lights, 500)
        assert res.passed
        assert res.max_deviation == 0.0
        assert res.checked_values == n * 501

    for seed in range(20):
        chain = random_chain_spec(seed)
        win = random_window(chain, seed)
        u = InputSignal(
            lambda i, k, _s=seed: (0.5 * uniform01_at(_s, 9, i, k),),
            declared_sup_norm=0.5,
        )
        res = consistency_check(chain, 4, win, u, 8)
        assert res.passed, seed
        assert res.max_deviation == 0.0


def test_criterion_08_index_scaled_family_fails_uniformity():
    """Local growth probing flags the index-scaled family as divergent
    within the first thousand indices, and the empirical gain at radius
    1/4 equals index/4 exactly."""
    spec = zoo.index_scaled_family()
    plan = SamplePlan(index_window=1000, state_radius=10.0, input_radius=1.0, samples=16)
    profile = falsify_uniformity(spec, plan, (0.25, 0.5, 1.0), 100.0)
    assert profile.diverges
    assert profile.cap_witness is not None
    index, gain = profile.cap_witness
    assert index <= 1000
    assert index == 200
    assert gain > 100.0
    for i in profile.indices:
        assert profile.gains[i][0] == i * 0.25, i


def test_criterion_09_halving_chain_certificate_has_zero_residual():
    """For x+ = x/2 on the chain, the canonical certificate with decay
    1/2 passes the one-step decrease with worst residual exactly 0.0."""
    spec = zoo.scalar_chain(0.5)
    family, gains = necessity_construct(spec, 0.5, Zero(), 1)
    report = check_M_step_decrease(
        spec, family, gains, 1,
        StateGridSpec(radius=20.0, target_points=1000),
        (0.0,),
        tolerances=Tolerances(atol=1e-12, rtol=0.0),
    )
    assert report.passed
    assert report.worst_residual == 0.0


def _artifact_bytes(root):
    found = {}
    for path in sorted(root.rglob("*")):
        if path.suffix in (".csv", ".json"):
            found[str(path.relative_to(root))] = path.read_bytes()
    return found


def _without_out(raw: bytes) -> dict:
    data = json.loads(raw)
    data.pop("out", None)
    return data


def test_criterion_10_cli_artifacts_reproduce_bitwise(tmp_path):
    """Rerunning the demo from its echoed config, and running two copies
    simultaneously, yields byte-identical CSV and JSON artifacts; only
    the echoed output directory may differ."""
    base = [sys.executable, "-m", "issnet"]
    demo = ["traffic-demo", "--sizes", "20,40", "--horizon", "40", "--seed", "3", "--no-figures"]
    out_a, out_b, out_c, out_d = (tmp_path / name for name in "abcd")

    first = subprocess.run(base + demo + ["--out", str(out_a)], capture_output=True, text=True)
    assert first.returncode == 0, first.stderr

    rerun = subprocess.run(
        base + ["traffic-demo", "--config", str(out_a / "config.json"), "--out", str(out_b)],
        capture_output=True, text=True,
    )
    assert rerun.returncode == 0, rerun.stderr

    left = subprocess.Popen(base + demo + ["--out", str(out_c)], stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
    right = subprocess.Popen(base + demo + ["--out", str(out_d)], stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
    assert left.wait(timeout=120) == 0, left.stderr.read()
    assert right.wait(timeout=120) == 0, right.stderr.read()

    reference = _artifact_bytes(out_a)
    assert reference, "demo produced no artifacts"
    for other in (out_b, out_c, out_d):
        produced = _artifact_bytes(other)
        assert produced.keys() == reference.keys()
        for rel, expected in reference.items():
            if rel == "config.json":
                assert _without_out(produced[rel]) == _without_out(expected)
            else:
                assert produced[rel] == expected, rel
