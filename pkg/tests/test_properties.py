"""Property-based invariants (hypothesis)."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import ordsub as o

positive_weights = st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4)
seeds = st.integers(0, 99999)

SETTINGS = dict(max_examples=60, deadline=None)


def distribution(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    return arr / arr.sum()


@given(seed=seeds, length=st.integers(1, 5))
@settings(**SETTINGS)
def test_coverage_prefixes_never_lose_value(seed, length):
    inst = o.random_coverage(seed % 1000, 5, 3, 4)
    fn = o.make_coverage_fn(inst)
    seq = tuple(int(x) for x in
                np.random.default_rng(seed).permutation(5)[:length])
    assert fn(seq) >= fn(seq[:-1]) - 1e-12
    assert 0.0 <= fn(seq) <= 1.0 + 1e-12


@given(seed=seeds)
@settings(**SETTINGS)
def test_patient_users_make_order_irrelevant(seed):
    base = o.random_coverage(seed % 1000, 4, 3, 1)
    inst = o.CoverageInstance(pi=base.pi, p_sat=base.p_sat,
                              theta=np.full(3, 4))
    fn = o.make_coverage_fn(inst)
    rng = np.random.default_rng(seed)
    seq = tuple(int(x) for x in rng.permutation(4)[:3])
    shuffled = tuple(int(x) for x in rng.permutation(list(seq)))
    assert fn(seq) == pytest.approx(fn(shuffled), abs=1e-12)


@given(pv=positive_weights, qv=positive_weights)
@settings(**SETTINGS)
def test_overlap_measures_bounded_by_one(pv, qv):
    assume(len(pv) == len(qv))
    p, q = distribution(pv), distribution(qv)
    for spec in (o.hellinger_spec(), o.power_spec(0.3), o.power_spec(0.8),
                 o.hellinger_divergence_spec()):
        value = o.overlap(spec, p, q)
        assert -1e-12 <= value <= 1.0 + 1e-12
        assert o.overlap(spec, p, p) == pytest.approx(1.0, abs=1e-12)


@given(pv=positive_weights, qv=positive_weights,
       bump=st.lists(st.floats(0.0, 0.5), min_size=2, max_size=4))
@settings(**SETTINGS)
def test_extra_mass_never_hurts(pv, qv, bump):
    assume(len(pv) == len(qv) == len(bump))
    p = distribution(pv)
    q = distribution(qv) * 0.5  # subdistribution with headroom
    grown = q + np.asarray(bump) * 0.1
    for spec in (o.hellinger_spec(), o.power_spec(0.5),
                 o.hellinger_divergence_spec(), o.log_ratio_spec()):
        assert o.overlap(spec, p, grown) >= o.overlap(spec, p, q) - 1e-12


@given(pv=positive_weights, qv=positive_weights)
@settings(**SETTINGS)
def test_divergence_between_distributions_in_unit_range(pv, qv):
    assume(len(pv) == len(qv))
    p, q = distribution(pv), distribution(qv)
    d = o.f_divergence(o.hellinger_sq_generator, p, q)
    assert -1e-12 <= d <= 1.0 + 1e-12
    assert o.f_divergence(o.hellinger_sq_generator, p, p) == 0.0


@given(seed=seeds, length=st.integers(0, 4))
@settings(**SETTINGS)
def test_built_mass_equals_spent_weight(seed, length):
    inst = o.random_calibration(seed % 1000, 5, 3, 4)
    seq = tuple(int(x) for x in
                np.random.default_rng(seed).permutation(5)[:length])
    q = o.build_q(inst, seq)
    assert q.sum() == pytest.approx(inst.rank_weights[:length].sum(),
                                    abs=1e-12)
    assert np.all(q >= -1e-15)


@given(seed=seeds, kind=st.sampled_from(["coverage", "hellinger", "power"]))
@settings(max_examples=40, deadline=None)
def test_greedy_keeps_half_the_optimum(seed, kind):
    if kind == "coverage":
        fn = o.make_coverage_fn(o.random_coverage(seed % 500, 5, 3, 3))
    else:
        inst = o.random_calibration(seed % 500, 5, 3, 3)
        spec = o.hellinger_spec() if kind == "hellinger" else o.power_spec(0.6)
        fn = o.make_calibration_fn(inst, spec)
    result = o.compare(fn, 3)
    assert result.value >= 0.5 * result.optimum_value - 1e-9


@given(seed=seeds)
@settings(max_examples=15, deadline=None)
def test_random_calibration_passes_definition_checker(seed):
    inst = o.random_calibration(seed % 300, 4, 3, 4)
    fn = o.make_calibration_fn(inst, o.hellinger_spec())
    assert o.check_ordered_submodularity(fn, 3).holds


def perspective(f, c, y):
    return y * f(c / y)


@given(c=st.floats(0.05, 3.0), y=st.floats(0.05, 3.0))
@settings(**SETTINGS)
def test_perspective_transform_stays_convex(c, y):
    # numerical second derivative in y; convex generators must keep it >= 0
    h = 1e-4 * y
    for f in (o.hellinger_sq_generator,
              lambda t: t * math.log(t) if t > 0 else 0.0):
        second = (perspective(f, c, y - h) - 2.0 * perspective(f, c, y)
                  + perspective(f, c, y + h)) / (h * h)
        assert second >= -1e-5
