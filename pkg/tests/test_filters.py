import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazefilt import (DigitalFilter, FirTapParams, analytic_frequency_response,
                      apply_centered, apply_forward, apply_zero_phase,
                      design_butterworth_lowpass, design_fir_lowpass,
                      design_savitzky_golay, estimate_fir_taps, is_stable)

FS = 1000.0


def mag_db(filt, freq_hz, fs_hz=FS):
    resp = analytic_frequency_response(filt, np.atleast_1d(float(freq_hz)), fs_hz)
    return float(resp.magnitude_db[0])


# --- tap count formula ---

def test_tap_count_matches_canonical_design():
    assert estimate_fir_taps(FirTapParams(0.01, 0.01, 1000.0, 25.0)) == 80


def test_tap_count_clamps_to_two():
    # (2/3) * (1000/450) = 1.48 rounds to 1, clamped up
    assert estimate_fir_taps(FirTapParams(0.1, 0.1, 1000.0, 450.0)) == 2


def test_tap_count_rounds():
    # (2/3) * 5 * 20 = 66.67
    assert estimate_fir_taps(FirTapParams(0.001, 0.001, 1000.0, 50.0)) == 67


@pytest.mark.parametrize("bad", [
    dict(delta1=0.0, delta2=0.01, fs_hz=1000.0, transition_width_hz=25.0),
    dict(delta1=0.01, delta2=-1.0, fs_hz=1000.0, transition_width_hz=25.0),
    dict(delta1=0.01, delta2=0.01, fs_hz=1000.0, transition_width_hz=600.0),
])
def test_tap_count_rejects_bad_params(bad):
    with pytest.raises(ValueError):
        FirTapParams(**bad)


# --- Savitzky-Golay ---

def sg_oracle(window_length, poly_order):
    # independent route: pseudoinverse of the Vandermonde, center row
    half = window_length // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    design = np.vander(offsets, poly_order + 1, increasing=True)
    return np.linalg.pinv(design)[0]  # weights for the constant coefficient


def test_sg_11_2_exact_kernel():
    expected = np.array([-36, 9, 44, 69, 84, 89, 84, 69, 44, 9, -36]) / 429.0
    filt = design_savitzky_golay(11, 2)
    assert np.max(np.abs(filt.b - expected)) < 1e-12
    assert np.array_equal(filt.a, [1.0])
    assert not filt.zero_phase


@pytest.mark.parametrize("window,order", [(5, 2), (11, 2), (9, 4), (21, 3), (91, 2)])
def test_sg_matches_pseudoinverse_oracle(window, order):
    filt = design_savitzky_golay(window, order)
    assert np.max(np.abs(filt.b - sg_oracle(window, order))) < 1e-12
    assert abs(filt.b.sum() - 1.0) < 1e-12
    assert np.max(np.abs(filt.b - filt.b[::-1])) == 0.0


def test_sg_full_order_reproduces_quartic():
    filt = design_savitzky_golay(5, 4)
    coeffs = [0.3, -1.2, 0.5, 0.07, -0.01]
    window = np.polyval(coeffs, np.arange(-2.0, 3.0))
    assert abs(np.dot(filt.b, window) - window[2]) < 1e-9


@pytest.mark.parametrize("window,order", [(10, 2), (5, 5), (5, 7)])
def test_sg_rejects_bad_geometry(window, order):
    with pytest.raises(ValueError):
        design_savitzky_golay(window, order)


@given(st.integers(min_value=0, max_value=4), st.data())
@settings(max_examples=30, deadline=None)
def test_sg_reproduces_low_order_polynomials(degree, data):
    window = data.draw(st.sampled_from([7, 11, 15, 21]))
    order = data.draw(st.integers(min_value=degree, max_value=min(6, window - 1)))
    coeffs = data.draw(st.lists(st.floats(-3, 3), min_size=degree + 1,
                                max_size=degree + 1))
    filt = design_savitzky_golay(window, order)
    t = np.linspace(-1.0, 1.0, 200)
    x = np.polyval(coeffs, t)
    smoothed = apply_centered(filt, x)
    half = window // 2
    interior = slice(half, len(x) - half)
    assert np.max(np.abs(smoothed[interior] - x[interior])) < 1e-9


# --- Butterworth ---

def test_butterworth_half_power_at_cutoff():
    filt = design_butterworth_lowpass(7, 100.0, FS, zero_phase=False)
    assert abs(mag_db(filt, 100.0) - 20.0 * math.log10(2 ** -0.5)) < 0.01
    assert abs(mag_db(filt, 0.0)) < 1e-9


def test_butterworth_unit_dc_gain():
    filt = design_butterworth_lowpass(7, 100.0, FS)
    assert abs(filt.b.sum() / filt.a.sum() - 1.0) < 1e-9


def test_butterworth_zero_phase_minus40_near_135():
    filt = design_butterworth_lowpass(7, 100.0, FS)
    freqs = np.linspace(120.0, 150.0, 3001)
    resp = analytic_frequency_response(filt, freqs, FS)
    crossing = freqs[np.argmax(resp.magnitude_db <= -40.0)]
    assert abs(crossing - 135.0) <= 5.0


def test_butterworth_rejects_cutoff_at_nyquist():
    with pytest.raises(ValueError):
        design_butterworth_lowpass(7, 500.0, FS)
    with pytest.raises(ValueError):
        design_butterworth_lowpass(0, 100.0, FS)


# --- windowed-sinc FIR ---

def test_fir_tuned_to_minus3db_at_cutoff():
    filt = design_fir_lowpass(80, 100.0, FS, zero_phase=False)
    assert abs(mag_db(filt, 100.0) - (-3.0)) < 0.1
    assert abs(filt.b.sum() - 1.0) < 1e-12
    assert np.max(np.abs(filt.b - filt.b[::-1])) < 1e-15


@pytest.mark.parametrize("level,target,tol", [(-30.0, 110.0, 5.0), (-40.0, 114.0, 5.0)])
def test_fir_zero_phase_rolloff(level, target, tol):
    filt = design_fir_lowpass(80, 100.0, FS)
    freqs = np.linspace(100.0, 130.0, 3001)
    resp = analytic_frequency_response(filt, freqs, FS)
    crossing = freqs[np.argmax(resp.magnitude_db <= level)]
    assert abs(crossing - target) <= tol


def test_fir_rejects_bad_args():
    with pytest.raises(ValueError):
        design_fir_lowpass(1, 100.0, FS)
    with pytest.raises(ValueError):
        design_fir_lowpass(80, 600.0, FS)


# --- stability ---

def test_designed_filters_are_stable():
    assert is_stable(design_fir_lowpass(80, 100.0, FS))
    assert is_stable(design_butterworth_lowpass(7, 100.0, FS))
    assert is_stable(design_savitzky_golay(11, 2))


def test_pole_outside_unit_circle_detected():
    filt = DigitalFilter(b=np.array([1.0]), a=np.array([1.0, -2.0]))
    assert not is_stable(filt)


# --- application ---

def test_forward_identity():
    ident = DigitalFilter(b=np.array([1.0]))
    x = np.random.default_rng(0).standard_normal(50)
    assert np.array_equal(apply_forward(ident, x), x)


def test_forward_sg_preserves_constant_interior():
    filt = design_savitzky_golay(11, 2)
    y = apply_forward(filt, np.full(100, 3.7))
    assert np.max(np.abs(y[10:] - 3.7)) < 1e-12


def test_forward_impulse_matches_high_precision_recursion():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    filt = design_butterworth_lowpass(7, 100.0, FS)
    impulse = np.zeros(200)
    impulse[0] = 1.0
    got = apply_forward(filt, impulse)
    b = [mp.mpf(float(v)) for v in filt.b]
    a = [mp.mpf(float(v)) for v in filt.a]
    ref = []
    for n in range(200):
        acc = b[n] if n < len(b) else mp.mpf(0)
        for k in range(1, len(a)):
            if n - k >= 0:
                acc -= a[k] * ref[n - k]
        ref.append(acc)
    assert max(abs(float(r) - g) for r, g in zip(ref, got)) < 1e-9


def test_forward_rejects_empty_signal():
    with pytest.raises(ValueError):
        apply_forward(DigitalFilter(b=np.array([1.0])), np.array([]))


def test_zero_phase_identity_is_exact():
    ident = DigitalFilter(b=np.array([1.0]), zero_phase=True)
    x = np.random.default_rng(1).standard_normal(64)
    assert np.array_equal(apply_zero_phase(ident, x), x)


def test_zero_phase_preserves_passband_sinusoid():
    # 50 Hz is well inside the 100 Hz passband: amplitude kept, no lag
    t = np.arange(2000) / FS
    x = np.sin(2.0 * math.pi * 50.0 * t)
    for filt in (design_butterworth_lowpass(7, 100.0, FS),
                 design_fir_lowpass(80, 100.0, FS)):
        y = apply_zero_phase(filt, x)
        basis = np.stack([np.sin(2.0 * math.pi * 50.0 * t),
                          np.cos(2.0 * math.pi * 50.0 * t)]).T
        coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
        assert abs(math.hypot(*coef) - 1.0) < 0.01
        lags = np.arange(-8, 9)
        xcorr = [np.dot(y[8:-8], x[8 + lag:len(x) - 8 + lag]) for lag in lags]
        assert lags[int(np.argmax(xcorr))] == 0


def test_zero_phase_rejects_short_signal():
    filt = design_butterworth_lowpass(7, 100.0, FS)
    with pytest.raises(ValueError, match="24"):
        apply_zero_phase(filt, np.zeros(24))


def test_centered_equals_delay_compensated_causal_pass():
    # a symmetric kernel run once, centered, is the causal run shifted back
    filt = design_savitzky_golay(11, 2)
    x = np.random.default_rng(3).standard_normal(400)
    centered = apply_centered(filt, x)
    causal = apply_forward(filt, x)
    assert np.max(np.abs(centered[5:-10] - causal[10:-5])) < 1e-9


def test_zero_phase_doubles_attenuation_in_db():
    freqs = np.linspace(0.0, 500.0, 2001)
    for single, double in [
            (design_butterworth_lowpass(7, 100.0, FS, zero_phase=False),
             design_butterworth_lowpass(7, 100.0, FS, zero_phase=True)),
            (design_fir_lowpass(80, 100.0, FS, zero_phase=False),
             design_fir_lowpass(80, 100.0, FS, zero_phase=True))]:
        one = analytic_frequency_response(single, freqs, FS).magnitude_db
        two = analytic_frequency_response(double, freqs, FS).magnitude_db
        assert np.max(np.abs(two - 2.0 * one)) < 1e-6


@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_application_is_linear(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(300)
    y = rng.standard_normal(300)
    for filt in (design_butterworth_lowpass(7, 100.0, FS),
                 design_savitzky_golay(11, 2)):
        for apply in (apply_forward, apply_zero_phase):
            mixed = apply(filt, alpha * x + beta * y)
            parts = alpha * apply(filt, x) + beta * apply(filt, y)
            scale = max(1.0, np.max(np.abs(parts)))
            assert np.max(np.abs(mixed - parts)) / scale < 1e-9


@given(st.integers(1, 40), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_forward_pass_is_time_invariant(shift, seed):
    filt = design_butterworth_lowpass(7, 100.0, FS)
    x = np.random.default_rng(seed).standard_normal(200)
    shifted = np.concatenate([np.zeros(shift), x])
    y = apply_forward(filt, x)
    y_shifted = apply_forward(filt, shifted)
    assert np.max(np.abs(y_shifted[shift:] - y)) < 1e-9
