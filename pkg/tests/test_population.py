import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsecp import (
    DetectorConfig,
    PiecewiseSignal,
    PulseError,
    UnsupportedGeometryError,
    closed_form_dtilde,
    population_curves,
    pulse_curve,
    pulse_pattern_check,
)
from pulsecp.simulate import CP_LEVELS, cp_local_model, cp_model


def step(n, z, beta, base=0.0):
    return PiecewiseSignal(n, (z,), (base, base + beta))


# -- PiecewiseSignal ---------------------------------------------------------

def test_signal_derived_quantities():
    sig = cp_model(1).signal
    assert sig.k == 11
    # 638 - 485 is the shortest gap in the boundary list
    assert sig.min_segment_length == 153
    assert sig.segment_lengths[0] == 161
    assert sig.min_jump == 1.0
    assert sig.segment_lengths.sum() == 2048


def test_signal_local_levels():
    assert cp_local_model(1).signal.min_jump == pytest.approx(0.7)


def test_signal_expand_boundaries():
    x = PiecewiseSignal(10, (4, 8), (0.0, 1.0, 2.0)).expand()
    np.testing.assert_array_equal(x, [0, 0, 0, 1, 1, 1, 1, 2, 2, 2])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=10, boundaries=(1,), levels=(0, 1)),
        dict(n=10, boundaries=(10,), levels=(0, 1)),
        dict(n=10, boundaries=(5, 3), levels=(0, 1, 2)),
        dict(n=10, boundaries=(5,), levels=(0, 1, 2)),
        dict(n=10, boundaries=(5,), levels=(1, 1)),
        dict(n=10, boundaries=(5,), levels=(0, np.nan)),
        dict(n=10, boundaries=(5,), levels=(1, -2), target="variance"),
    ],
)
def test_signal_invalid(kwargs):
    with pytest.raises(PulseError):
        PiecewiseSignal(**kwargs)


def test_signal_merged_drops_equal_neighbours():
    sig = PiecewiseSignal.merged(10, (3, 6, 8), (0, 0, 1, 1))
    assert sig.boundaries == (6,)
    assert tuple(sig.levels) == (0, 1)


# -- population_curves -------------------------------------------------------

def test_flat_signal():
    pc = population_curves(PiecewiseSignal(200, (), (2.0,)), 8, 0.3)
    assert np.all(pc.d == 0) and np.all(pc.dtilde == 0) and np.all(pc.t == 1)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, -3.0])
def test_dtilde_peak_three_quarters(beta):
    alpha = 32
    pc = population_curves(step(600, 301, beta), alpha, 0.4882)
    peak = np.max(np.abs(pc.dtilde))
    assert peak == pytest.approx(0.75 * abs(beta), rel=1e-12)
    # the cap is flat over two neighbouring indices for even alpha
    at = np.flatnonzero(np.isclose(np.abs(pc.dtilde), peak, rtol=1e-12)) + 1
    np.testing.assert_array_equal(at, [301 - 3 * alpha // 2, 301 - 3 * alpha // 2 + 1])


@pytest.mark.parametrize("alpha", [8, 16, 32])
def test_ratio_dip_and_spike(alpha):
    c, beta, z = 0.4882, 1.0, 20 * alpha + 1
    t = population_curves(step(40 * alpha, z, beta), alpha, c).t
    assert t.min() == pytest.approx(c / (0.75 * beta + c), rel=1e-12)
    assert t.max() == pytest.approx((0.75 * beta + c) / c, rel=1e-12)
    i_min = int(np.argmin(t)) + 1
    i_max = int(np.argmax(t)) + 1
    assert i_max - i_min == 3 * alpha // 2


def test_population_equals_sample_cp_model():
    sig = cp_model(1).signal
    cfg = DetectorConfig(alpha=32, ridge=0.4882)
    pop, smp = population_curves(sig, 32, 0.4882), pulse_curve(sig.expand(), cfg)
    for a, b in [(pop.d, smp.d), (pop.dtilde, smp.dtilde), (pop.t, smp.t)]:
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


def test_population_variance_target_flat_ratio():
    sig = PiecewiseSignal(600, (301,), (1.0, 3.0), target="variance")
    pc = population_curves(sig, 32, 0.5)
    # window scales are RMS values, so the cap sits just above 3/4 of the sd jump
    peak = np.max(np.abs(pc.dtilde))
    assert 1.5 <= peak <= 1.5 + 1e-3
    assert pc.t[0] == 1.0 and pc.t[-1] == 1.0


def test_population_too_short():
    with pytest.raises(PulseError):
        population_curves(step(100, 50, 1.0), 32, 0.5)


@st.composite
def separated_signals(draw):
    alpha = draw(st.sampled_from([4, 6, 8, 10]))
    k = draw(st.integers(1, 4))
    lengths = [draw(st.integers(4 * alpha + 1, 8 * alpha)) for _ in range(k + 1)]
    bounds = tuple(int(b) for b in np.cumsum(lengths[:-1]) + 1)
    levels = [0.0]
    for _ in range(k):
        jump = draw(st.floats(0.1, 5.0)) * draw(st.sampled_from([-1, 1]))
        levels.append(levels[-1] + jump)
    return PiecewiseSignal(int(sum(lengths)), bounds, tuple(levels)), alpha


@settings(max_examples=50, deadline=None)
@given(separated_signals(), st.floats(0.05, 2.0))
def test_population_equals_sample_random(data, c):
    sig, alpha = data
    pop = population_curves(sig, alpha, c)
    smp = pulse_curve(sig.expand(), DetectorConfig(alpha=alpha, ridge=c))
    scale = max(1.0, float(np.max(np.abs(sig.levels))))
    np.testing.assert_allclose(pop.d, smp.d, rtol=0, atol=1e-12 * scale)
    np.testing.assert_allclose(pop.dtilde, smp.dtilde, rtol=0, atol=1e-12 * scale)
    np.testing.assert_allclose(pop.t, smp.t, rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(separated_signals(), st.floats(0.05, 2.0))
def test_ratio_bounds_and_isolated_peaks(data, c):
    sig, alpha = data
    pc = population_curves(sig, alpha, c)
    bmax = float(np.max(sig.jumps))
    assert pc.t.min() >= c / (0.75 * bmax + c) - 1e-12
    assert pc.t.max() <= (0.75 * bmax + c) / c + 1e-12
    # every isolated change shows its own 3/4 peak in |Dt|
    for z, beta in zip(sig.boundaries, sig.jumps):
        lo, hi = max(0, z - 2 * alpha - 1), min(pc.dtilde.size, z + 1)
        assert np.max(np.abs(pc.dtilde[lo:hi])) == pytest.approx(0.75 * beta, rel=1e-10)


def test_ratio_bounds_cp_model():
    c = 0.4882
    pc = population_curves(cp_model(1).signal, 32, c)
    bmax = float(np.max(np.abs(np.diff(CP_LEVELS))))
    assert pc.t.min() >= c / (0.75 * bmax + c)
    assert pc.t.max() <= (0.75 * bmax + c) / c


# -- closed_form_dtilde ------------------------------------------------------

def _best_shift(closed, brute, alpha):
    # smallest |shift| s with closed(i) ~ brute(i + s) everywhere
    best = None
    for s in range(-alpha, alpha + 1):
        if s >= 0:
            a, b = closed[: closed.size - s], brute[s:]
        else:
            a, b = closed[-s:], brute[: brute.size + s]
        err = float(np.max(np.abs(a - b)))
        if best is None or (err, abs(s)) < best[:2]:
            best = (err, abs(s), s)
    return best[2], best[0]


@pytest.mark.parametrize("alpha", [8, 16, 32])
@pytest.mark.parametrize("convention", ["display", "segment"])
def test_closed_form_matches_brute_force(alpha, convention):
    sig = PiecewiseSignal(30 * alpha, (6 * alpha + 1, 14 * alpha + 1, 21 * alpha + 1),
                          (0.0, 2.0, -1.0, 0.5))
    brute = np.abs(population_curves(sig, alpha, 0.5).dtilde)
    closed = closed_form_dtilde(sig, alpha, convention)
    shift, err = _best_shift(closed, brute, alpha)
    assert abs(shift) <= alpha
    assert err <= 2 * float(np.max(sig.jumps)) / alpha
    if convention == "segment":
        assert shift == 0
        np.testing.assert_allclose(closed, brute, rtol=0, atol=1e-12)
    else:
        assert shift == -alpha


def test_closed_form_cp_model():
    sig = cp_model(1).signal
    brute = np.abs(population_curves(sig, 32, 0.5).dtilde)
    np.testing.assert_allclose(closed_form_dtilde(sig, 32, "segment"), brute, atol=1e-12)
    shift, err = _best_shift(closed_form_dtilde(sig, 32), brute, 32)
    assert abs(shift) <= 32 and err <= 2 * 4 / 32


def test_closed_form_flat_and_peak():
    alpha, z, beta = 16, 201, 2.0
    sig = step(400, z, beta)
    cf = closed_form_dtilde(sig, alpha, "display")
    # flat away from the change
    assert np.all(cf[: z - 2 * alpha - 1] == 0)
    assert np.all(cf[z + alpha :] == 0)
    # cap value at z - alpha/2 in the display indexing
    assert cf[z - alpha // 2 - 1] == pytest.approx(0.75 * beta, rel=1e-12)


def test_closed_form_rejects_overlap():
    sig = PiecewiseSignal(400, (100, 200), (0.0, 1.0, 0.0))
    with pytest.raises(UnsupportedGeometryError):
        closed_form_dtilde(sig, 32)


def test_closed_form_rejects_variance():
    sig = PiecewiseSignal(400, (200,), (1.0, 2.0), target="variance")
    with pytest.raises(PulseError):
        closed_form_dtilde(sig, 8)


# -- pulse_pattern_check -----------------------------------------------------

def test_pattern_single_step():
    sig = step(600, 301, 2.0)
    rep = pulse_pattern_check(population_curves(sig, 32, 0.4882), sig, 32, 0.4882)
    assert rep.passed, rep.failures
    ((_, i_min, _),) = rep.dips
    ((_, i_max, _),) = rep.peaks
    assert i_max - i_min == 48


def test_pattern_flat_signal():
    sig = PiecewiseSignal(600, (), (1.0,))
    rep = pulse_pattern_check(population_curves(sig, 32, 0.4882), sig, 32, 0.4882)
    assert rep.passed and rep.dips == []


def test_pattern_cp_model_all_changes():
    sig = cp_model(1).signal
    rep = pulse_pattern_check(population_curves(sig, 32, 0.4882), sig, 32, 0.4882)
    assert rep.passed, rep.failures
    assert len(rep.dips) == 11


def test_pattern_reports_offenders():
    sig = step(600, 301, 2.0)
    curves = population_curves(sig, 32, 0.4882)
    bad = curves.t.copy()
    bad[10] = 0.9
    bad_curves = type(curves)(curves.d, curves.dtilde, bad, 32, "mean", 0.4882)
    rep = pulse_pattern_check(bad_curves, sig, 32, 0.4882)
    assert not rep.passed
    assert any(11 in idx for _, _, idx in rep.failures)


def test_pattern_detects_shallow_dip():
    # curves computed with a larger ridge miss the bound stated for c
    sig = step(600, 301, 2.0)
    rep = pulse_pattern_check(population_curves(sig, 32, 2.0), sig, 32, 0.4882)
    assert not rep.passed
