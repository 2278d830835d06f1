import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.signal import find_peaks, peak_prominences

from acfhorizon import (
    AcfCell,
    DepthSummary,
    classify_components,
    detect_oscillation,
    detect_peaks,
    recommend_horizon,
)
from acfhorizon.errors import EmptySummary, SeriesTooShort


def test_single_bump():
    r = detect_peaks([0, 1, 0], 0.5)
    assert r.peak_times == (1,)
    assert r.dominant_period is None


def test_monotone_has_no_peaks():
    assert detect_peaks(np.arange(10.0), 0.0).peak_times == ()


def test_too_short():
    with pytest.raises(SeriesTooShort):
        detect_peaks([1, 2])


def test_plateau_resolves_left():
    assert detect_peaks([0, 2, 2, 2, 0, 1, 0], 1.5).peak_times == (1,)
    # a plateau that rises again is not a peak
    assert detect_peaks([0, 2, 2, 3, 0], 0.1).peak_times == (3,)


def test_times_and_dominant_period():
    y = np.cos(2 * np.pi * (np.arange(50) - 2) / 10)
    r = detect_peaks(y, times=np.arange(50) + 100, k=7)
    assert r.k == 7
    assert r.peak_times == (102, 112, 122, 132, 142)
    assert r.dominant_period == 10.0


def test_default_prominence_is_tenth_of_range():
    y = [0, 10, 0, 0.5, 0, 10, 0]
    r = detect_peaks(y)
    assert r.prominence_used == pytest.approx(1.0)
    assert r.peak_times == (1, 5)


def test_prominence_matches_scipy(rng):
    for _ in range(30):
        y = np.cumsum(rng.normal(size=40))
        ours = detect_peaks(y, 0.0)
        idx, _ = find_peaks(y)
        assert list(ours.peak_times) == list(idx)
        np.testing.assert_allclose(ours.prominences, peak_prominences(y, idx)[0], rtol=0, atol=1e-12)
        thr = 0.5 * np.ptp(y) / 4
        idx2, _ = find_peaks(y, prominence=thr)
        assert list(detect_peaks(y, thr).peak_times) == list(idx2)


@given(
    seed=st.integers(0, 2**32),
    shift=st.floats(-100, 100),
    scale=st.floats(0.1, 10),
)
def test_peak_stability(seed, shift, scale):
    y = np.round(np.random.default_rng(seed).normal(size=30), 3)
    base = detect_peaks(y, 0.3)
    assert detect_peaks(y + shift, 0.3).peak_times == base.peak_times or _near_tie(y, 0.3)
    assert detect_peaks(scale * y, 0.3 * scale).peak_times == base.peak_times or _near_tie(y, 0.3)


def _near_tie(y, prom):
    # floating rounding can flip a peak whose prominence equals the threshold
    p = detect_peaks(y, 0.0).prominences
    return any(abs(v - prom) < 1e-9 for v in p)


def test_sawtooth_period_three():
    y = np.tile([0.0, 1.0, 2.0], 12)
    r = detect_oscillation(y, 3)
    assert r.coverage >= 0.9


def test_constant_has_no_oscillation():
    assert detect_oscillation(np.ones(20), 3).coverage == 0.0


def test_period_twelve_sinusoid_not_period_three():
    y = np.sin(2 * np.pi * np.arange(48) / 12)
    assert detect_oscillation(y, 3).coverage < 0.5


def test_oscillation_hits_oracle():
    y = np.tile([0.0, -1.0, 0.5], 10)
    r = detect_oscillation(y, 3, times=np.arange(30) + 5)
    # brute force: minima at 1, 4, ..., 28, every gap is exactly three
    assert r.extremum in ("max", "min")
    assert r.expected_hits == (30 - 3) // 3 + 1
    expected_min = [5 + i for i in range(1, 29, 3)]
    if r.extremum == "min":
        assert list(r.hit_times) == expected_min
    assert r.coverage == 1.0


def test_oscillation_too_short():
    with pytest.raises(SeriesTooShort):
        detect_oscillation([1, 2, 1, 2, 1], 3)
    with pytest.raises(ValueError):
        detect_oscillation(np.ones(10), 1)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_oscillation_coverage_in_unit_interval(values):
    if len(values) < 6:
        return
    r = detect_oscillation(values, 3)
    assert 0.0 <= r.coverage <= 1.0


def test_flat_summary_uses_depth_two():
    r = recommend_horizon(DepthSummary((10.0,) * 8))
    assert (r.short_k, r.medium_k, r.long_k) == (2, 2, 2)


def test_jump_at_twelve():
    W = [1.0] * 10 + [50.0] * 9
    r = recommend_horizon(DepthSummary(tuple(W)))
    # E = [1, 0, ..., 0, 49, 0, ...]: the jump sits at k = 12
    cum = np.cumsum(np.abs(np.diff([0.0] + W)))
    assert r.long_k == 2 + int(np.argmax(cum >= 0.95 * cum[-1]))
    assert r.long_k >= 12


def test_zero_summary():
    r = recommend_horizon(DepthSummary((0.0, 0.0, 0.0)))
    assert (r.short_k, r.medium_k, r.long_k) == (2, 2, 2)
    assert r.rationale == (0.0, 0.0, 0.0)


def test_empty_summary_and_bad_tiers():
    with pytest.raises(EmptySummary):
        recommend_horizon(DepthSummary(()))
    with pytest.raises(ValueError):
        recommend_horizon(DepthSummary((1.0,)), (0.8, 0.5, 0.9))


@given(
    W=st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=50),
    tiers=st.lists(st.floats(0.01, 1.0), min_size=3, max_size=3, unique=True).map(sorted),
)
def test_monotone_tiers(W, tiers):
    r = recommend_horizon(DepthSummary(tuple(W)), tiers)
    assert 2 <= r.short_k <= r.medium_k <= r.long_k <= len(W) + 1
    assert all(0.0 <= f <= 1.0 + 1e-12 for f in r.rationale)
    assert recommend_horizon(DepthSummary(tuple(W)), tiers) == r


def _cells(values_by_param):
    return [AcfCell(i, t, 4, 1, v) for i, vals in values_by_param.items() for t, v in enumerate(vals)]


def test_classification_examples():
    cells = _cells({0: [0.5, 0.2, 0.9], 1: [-0.1, -0.4], 2: [0.3, -0.3, 0.3, -0.3]})
    out = classify_components(cells, n_params=4)
    assert [c.label for c in out] == ["developing", "decaying", "mixed", "undefined"]
    assert out[0].positive_fraction == 1.0
    assert out[1].positive_fraction == 0.0
    assert out[2].positive_fraction == 0.5
    assert out[3].positive_fraction is None


def test_classification_bad_thresholds():
    with pytest.raises(ValueError):
        classify_components([], (0.7, 0.3))


@given(st.lists(st.tuples(st.integers(0, 5), st.floats(-1, 1)), max_size=60))
def test_classification_partitions(pairs):
    cells = [AcfCell(i, t, 3, 1, v) for t, (i, v) in enumerate(pairs)]
    out = classify_components(cells, n_params=6)
    assert [c.i for c in out] == list(range(6))
    for c in out:
        if c.n_cells == 0:
            assert c.label == "undefined"
        elif c.positive_fraction >= 0.65:
            assert c.label == "developing"
        elif c.positive_fraction <= 0.35:
            assert c.label == "decaying"
        else:
            assert c.label == "mixed"
