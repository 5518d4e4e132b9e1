from hypothesis import given, settings
from hypothesis import strategies as st

from issnet.distance import dist
from issnet.network import subsystem_step, validate_spec
from issnet.zoo import decoupled, index_scaled_family, scalar_chain, two_class_pair


def test_scalar_chain_step_and_shape():
    spec = scalar_chain(0.5, 0.25, 2.0)
    assert spec.neighbors_of(7) == (8,)
    assert subsystem_step(spec, 3, (4.0,), ((8.0,),), (1.0,)) == (0.5 * 4.0 + 0.25 * 8.0 + 2.0 * 1.0,)
    assert validate_spec(spec).ok


def test_decoupled_has_no_neighbors():
    spec = decoupled(2.0)
    assert spec.neighbors_of(1) == ()
    assert subsystem_step(spec, 9, (3.0,), (), (5.0,)) == (6.0,)
    assert validate_spec(spec).ok


def test_two_class_pair_swaps_and_scales():
    spec = two_class_pair()
    assert spec.class_of(1) == "amplifier"
    assert spec.class_of(2) == "attenuator"
    assert spec.neighbors_of(5) == (6,)
    assert spec.neighbors_of(6) == (5,)
    assert subsystem_step(spec, 1, (0.0,), ((2.0,),), (0.0,)) == (3.0,)
    assert subsystem_step(spec, 2, (0.0,), ((2.0,),), (0.0,)) == (0.2,)
    assert validate_spec(spec).ok


def test_index_scaled_local_slope():
    spec = index_scaled_family()
    step = spec.cls(3).dynamics
    assert step(3, (0.25,), (), (0.0,), None) == (0.75,)
    assert step(3, (-0.25,), (), (0.0,), None) == (-0.75,)
    assert step(1, (0.5,), (), (0.0,), None) == (0.5,)
    # the quarter-radius probe scales linearly with the index
    for i in (1, 2, 10, 400):
        assert step(i, (0.25,), (), (0.0,), None) == (i * 0.25,)


def test_index_scaled_outside_moves_halfway_back():
    spec = index_scaled_family()
    step = spec.cls(2).dynamics
    assert step(2, (6.0,), (), (0.0,), None) == (4.0,)
    assert step(2, (-6.0,), (), (0.0,), None) == (-4.0,)


@given(st.integers(min_value=1, max_value=12), st.floats(min_value=-30.0, max_value=30.0))
@settings(max_examples=200, deadline=None)
def test_index_scaled_target_interval_invariant(i, v):
    spec = index_scaled_family()
    step = spec.cls(i).dynamics
    out = step(i, (v,), (), (0.0,), None)[0]
    if abs(v) <= i:
        assert abs(out) <= i + 1e-12
    else:
        # strictly closer to the interval, never overshooting it
        assert i <= abs(out) < abs(v)
        assert out * v > 0


def test_index_scaled_target_sets_grow():
    spec = index_scaled_family()
    assert dist((1.5,), spec.target_set(2)) == 0.0
    assert dist((1.5,), spec.target_set(1)) == 0.5
