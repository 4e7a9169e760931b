import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdre.core import BandwidthSpec, GridSpec, SampleSet, lattice_points
from kdre.estimators import (
    IndirectKdre,
    estimate_direct,
    estimate_indirect,
    evaluate_field,
    fit_direct,
    kde,
)
from kdre.kernels import GAUSSIAN_PRODUCT, GAUSSIAN_RADIAL, KernelSpec
from kdre.synth import X_STREAM, Y_STREAM, SeededStream, sample_mvn


def univariate_direct(x, y, z, h):
    """Loop transcription of the univariate direct estimator with the boxcar kernel."""
    m, n = len(y), len(x)

    def G(t):
        return sum(1 for yj in y if yj <= t) / m

    gz = G(z)
    total = 0.0
    for xi in x:
        u = (gz - G(xi)) / h
        total += 1.0 if abs(u) <= 0.5 else 0.0
    return total / n / h


def test_kde_single_point_at_its_own_location():
    s = SampleSet([[0.3, -0.2]])
    assert kde(s, KernelSpec(GAUSSIAN_PRODUCT, 2), 1.0, [0.3, -0.2]) == pytest.approx(1 / (2 * math.pi), rel=1e-15)


def test_kde_integrates_to_one(favorable_pair, rng):
    y = sample_mvn(favorable_pair.G, 200, SeededStream(3, Y_STREAM))
    step = 0.025
    mids = np.arange(-6 + step / 2, 6, step)
    g1, g2 = np.meshgrid(mids, mids, indexing="ij")
    vals = kde(y, KernelSpec(GAUSSIAN_PRODUCT, 2), 0.1, np.stack([g1.ravel(), g2.ravel()], axis=-1))
    assert np.all(vals >= 0)
    assert vals.sum() * step**2 == pytest.approx(1.0, abs=0.01)


def test_indirect_ratio_arithmetic():
    # with single-point samples the KDE at the point is phi(0)/h, so pick h to get 0.2 and 0.4
    phi0 = 1 / math.sqrt(2 * math.pi)
    model = IndirectKdre(SampleSet([[0.0]]), SampleSet([[0.0]]), hX=phi0 / 0.2, hY=phi0 / 0.4)
    value, dz = estimate_indirect(model, [0.0])
    assert value == pytest.approx(0.5, rel=1e-14)
    assert not dz


def test_indirect_identical_samples_give_one(rng):
    s = SampleSet(rng.normal(size=(50, 2)))
    model = IndirectKdre(s, s, 0.3)
    for z in rng.normal(size=(20, 2)):
        assert model.estimate(z) == (1.0, False)


def test_indirect_divide_by_zero_is_flagged():
    model = IndirectKdre(SampleSet([[0.0, 0.0]]), SampleSet([[1000.0, 1000.0]]), 0.1)
    assert model.estimate([0.0, 0.0]) == (0.0, True)


def test_fit_direct_cache_examples():
    bw = BandwidthSpec(0.1)
    assert fit_direct(SampleSet([[0.0]]), SampleSet([[1.0]]), bw).hx_cache.tolist() == [[0.0]]
    assert fit_direct(SampleSet([[2.0]]), SampleSet([[1.0]]), bw).hx_cache.tolist() == [[1.0]]
    assert fit_direct(SampleSet([[0.5]]), SampleSet([[0.0], [1.0]]), bw).hx_cache.tolist() == [[0.5]]


def test_direct_hand_example():
    model = fit_direct(SampleSet([[0.5]]), SampleSet([[0.0], [1.0]]), BandwidthSpec(0.1))
    assert estimate_direct(model, [0.5]) == 10.0


def test_fit_is_deterministic(favorable_pair, bw2):
    x = sample_mvn(favorable_pair.F, 300, SeededStream(5, X_STREAM))
    y = sample_mvn(favorable_pair.G, 300, SeededStream(5, Y_STREAM))
    a, b = fit_direct(x, y, bw2), fit_direct(x, y, bw2)
    assert a.hx_cache.tobytes() == b.hx_cache.tobytes()


def test_cache_equals_on_demand_evaluation(favorable_pair, bw2):
    x = sample_mvn(favorable_pair.F, 200, SeededStream(9, X_STREAM))
    y = sample_mvn(favorable_pair.G, 500, SeededStream(9, Y_STREAM))
    model = fit_direct(x, y, bw2)
    for xi, cached in zip(x.points, model.hx_cache):
        assert model.cdf_model.cdf_vector(xi).tobytes() == cached.tobytes()


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 100),
    st.integers(1, 100),
    st.sampled_from([0.05, 0.1, 0.5]),
    st.integers(0, 2**32 - 1),
)
def test_univariate_reduction_is_exact(n, m, h, seed):
    r = np.random.default_rng(seed)
    x, y = r.normal(size=n), r.normal(0.3, 1.2, size=m)
    model = fit_direct(SampleSet(x[:, None]), SampleSet(y[:, None]), BandwidthSpec(h))
    for z in r.normal(size=5):
        assert estimate_direct(model, [z]) == univariate_direct(x.tolist(), y.tolist(), float(z), h)


def test_univariate_reduction_with_gaussian_main_kernel(rng):
    x, y, h = rng.normal(size=40), rng.normal(size=60), 0.2
    model = fit_direct(SampleSet(x[:, None]), SampleSet(y[:, None]), BandwidthSpec(h), main_family=GAUSSIAN_RADIAL)
    G = lambda t: sum(1 for yj in y if yj <= t) / len(y)  # noqa: E731
    for z in rng.normal(size=10):
        terms = [math.exp(-(((G(z) - G(xi)) / h) ** 2)) / math.sqrt(math.pi) for xi in x]
        assert estimate_direct(model, [z]) == pytest.approx(math.fsum(terms) / len(x) / h, rel=1e-14)


@pytest.mark.parametrize("family", ["boxcar", GAUSSIAN_RADIAL])
def test_bounded_by_sup_over_h_to_the_d(family, favorable_pair, bw2, scenario_grid):
    x = sample_mvn(favorable_pair.F, 400, SeededStream(11, X_STREAM))
    y = sample_mvn(favorable_pair.G, 400, SeededStream(11, Y_STREAM))
    model = fit_direct(x, y, bw2, main_family=family)
    bound = KernelSpec(family, 2).sup / 0.1**2
    assert model.upper_bound == bound
    if family == "boxcar":
        assert bound <= 100.0
    for z in lattice_points(scenario_grid):
        assert 0.0 <= estimate_direct(model, z) <= bound


def test_estimate_reaches_bound_when_all_mass_sits_in_one_box():
    # every X maps to the same cube point as z, so every kernel term is 1
    x = SampleSet(np.zeros((5, 2)))
    y = SampleSet([[1.0, 1.0], [2.0, 2.0]])
    model = fit_direct(x, y, BandwidthSpec(0.1, (0.1,)))
    assert estimate_direct(model, [0.0, 0.0]) == model.upper_bound


def test_kernel_arguments_are_scale_free(favorable_pair, rng):
    h = 0.07
    x = sample_mvn(favorable_pair.F, 300, SeededStream(2, X_STREAM))
    y = sample_mvn(favorable_pair.G, 300, SeededStream(2, Y_STREAM))
    model = fit_direct(x, y, BandwidthSpec(h, (0.1,)))
    for z in rng.uniform(-4, 4, size=(100, 2)):
        u = model.kernel_arguments(z)
        assert u.shape == (300, 2)
        assert np.all(np.abs(u) <= 1 / h)


@pytest.fixture(scope="module")
def small_models(favorable_pair):
    bw = BandwidthSpec(0.1, (0.1,))
    x = sample_mvn(favorable_pair.F, 500, SeededStream(4, X_STREAM))
    y = sample_mvn(favorable_pair.G, 500, SeededStream(4, Y_STREAM))
    return fit_direct(x, y, bw), IndirectKdre(x, y, 0.1)


def test_evaluate_field_channels(small_models, favorable_pair, scenario_grid):
    direct, indirect = small_models
    f = evaluate_field(scenario_grid, ["true", "direct", "indirect"], direct=direct, indirect=indirect, pair=favorable_pair)
    assert f.channels == ["true", "direct", "indirect"]
    assert all(v.shape == (225,) for v in f.values.values())
    assert np.all(f.values["true"] > 0)
    empty = evaluate_field(scenario_grid, [])
    assert empty.channels == []


def test_evaluate_field_is_deterministic_and_parallel_safe(small_models, favorable_pair, scenario_grid):
    direct, indirect = small_models
    kw = dict(direct=direct, indirect=indirect, pair=favorable_pair)
    a = evaluate_field(scenario_grid, ["true", "direct", "indirect"], **kw)
    b = evaluate_field(scenario_grid, ["true", "direct", "indirect"], **kw)
    c = evaluate_field(scenario_grid, ["true", "direct", "indirect"], workers=4, **kw)
    for name in a.values:
        assert a.values[name].tobytes() == b.values[name].tobytes() == c.values[name].tobytes()
    assert a.flags == b.flags == c.flags


def test_evaluate_field_argument_errors(small_models, scenario_grid):
    direct, _ = small_models
    with pytest.raises(ValueError):
        evaluate_field(scenario_grid, ["indirect"], direct=direct)
    with pytest.raises(ValueError):
        evaluate_field(scenario_grid, ["bogus"])
    with pytest.raises(ValueError):
        evaluate_field(GridSpec([0.0], [1.0], (3,)), ["direct"], direct=direct)


def test_field_flags_divide_by_zero_cells():
    x = SampleSet([[0.0, 0.0]])
    y = SampleSet([[0.0, 0.0]])
    grid = GridSpec([0.0, 0.0], [100.0, 100.0], (2, 2))
    f = evaluate_field(grid, ["indirect"], indirect=IndirectKdre(x, y, 0.1))
    assert f.flag_strings() == ["ok", "divide-by-zero", "divide-by-zero", "divide-by-zero"]
    assert f.values["indirect"][1:].tolist() == [0.0, 0.0, 0.0]
