"""FFT, averaged amplitude spectra of fixation blocks, and filter responses.

The block pipeline mirrors how quiet fixation stretches are analyzed:
detrend each block with a quadratic, taper with a periodic Hann window,
transform, and average single-sided magnitudes across blocks. Filter
frequency responses come either from the coefficients (analytic) or from
the ratio of filtered to unfiltered block spectra (empirical).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .filters import DigitalFilter

DB_FLOOR = 1e-300        # magnitude floor so dB values stay finite floats
RATIO_FLOOR = 1e-12      # denominator floor for the ratio method


class ResponseSource(Enum):
    ANALYTIC = "analytic"
    RATIO_METHOD = "ratio_method"


@dataclass
class AmplitudeSpectrum:
    freqs_hz: np.ndarray      # bin centers, 0 to fs/2 exclusive
    amplitude_deg: np.ndarray
    n_blocks_averaged: int


@dataclass
class FrequencyResponse:
    freqs_hz: np.ndarray
    magnitude_db: np.ndarray  # NaN where the estimate is undefined
    source: ResponseSource


def _bit_reverse_indices(n: int) -> np.ndarray:
    idx = np.zeros(1, dtype=np.intp)
    while len(idx) < n:
        idx = np.concatenate([2 * idx, 2 * idx + 1])
    return idx


def fft(samples) -> np.ndarray:
    """Radix-2 decimation-in-time FFT (unnormalized forward DFT).

    Accepts arrays of any leading shape; the transform runs along the last
    axis, whose length must be a power of two >= 2.
    """
    x = np.asarray(samples, dtype=complex)
    n = x.shape[-1]
    if n < 2 or n & (n - 1):
        raise ValueError(f"length must be a power of two >= 2, got {n}")
    y = x[..., _bit_reverse_indices(n)]
    m = 2
    while m <= n:
        twiddle = np.exp(-2j * math.pi * np.arange(m // 2) / m)
        y = y.reshape(y.shape[:-1] + (n // m, m))
        upper = y[..., m // 2:] * twiddle
        lower = y[..., :m // 2].copy()
        y[..., :m // 2] = lower + upper
        y[..., m // 2:] = lower - upper
        y = y.reshape(y.shape[:-2] + (n,))
        m *= 2
    return y


def ifft(spectrum) -> np.ndarray:
    x = np.asarray(spectrum, dtype=complex)
    return np.conj(fft(np.conj(x))) / x.shape[-1]


def detrend_poly2(signal) -> np.ndarray:
    """Subtract the least-squares quadratic over sample index."""
    x = np.asarray(signal, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 samples to fit a quadratic")
    t = np.arange(x.size, dtype=float)
    basis = np.vander(t, 3, increasing=True)
    coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
    return x - basis @ coef


def hanning_window(n: int) -> np.ndarray:
    """Periodic Hann, w[k] = 0.5*(1 - cos(2*pi*k/n)), k = 0..n-1."""
    if n < 2:
        raise ValueError("window length must be >= 2")
    return 0.5 * (1.0 - np.cos(2.0 * math.pi * np.arange(n) / n))


def _block_magnitudes(blocks) -> np.ndarray:
    """Single-sided magnitudes of detrended, Hann-tapered blocks (unscaled)."""
    arr = np.asarray(blocks, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError("blocks must be a list of equal-length 1-D signals")
    n = arr.shape[1]
    window = hanning_window(n)
    tapered = np.stack([detrend_poly2(row) for row in arr]) * window
    return np.abs(fft(tapered)[:, :n // 2])


def amplitude_spectrum(blocks, fs_hz: float) -> AmplitudeSpectrum:
    """Mean single-sided magnitude spectrum across equal-length blocks.

    Scaling is 2/sum(window): a full-scale in-bin sinusoid of amplitude A
    reads A in the output. Magnitudes are averaged, not complex spectra.
    """
    arr = np.asarray(blocks, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValueError("need at least one block; all blocks equal length")
    n = arr.shape[1]
    mags = _block_magnitudes(arr)
    scale = 2.0 / np.sum(hanning_window(n))
    freqs = np.arange(n // 2) * fs_hz / n
    return AmplitudeSpectrum(freqs_hz=freqs,
                             amplitude_deg=scale * mags.mean(axis=0),
                             n_blocks_averaged=arr.shape[0])


def to_db(magnitude) -> np.ndarray:
    """20*log10 magnitude re 1, floored so the result is a finite float."""
    return 20.0 * np.log10(np.maximum(np.asarray(magnitude, dtype=float), DB_FLOOR))


def analytic_frequency_response(filt: DigitalFilter, freqs_hz,
                                fs_hz: float) -> FrequencyResponse:
    """Evaluate |b(e^jw)/a(e^jw)| on a frequency grid, in dB.

    Zero-phase filters report the squared magnitude (both passes). Bins where
    the denominator polynomial vanishes numerically come back NaN.
    """
    freqs = np.asarray(freqs_hz, dtype=float)
    if np.any(freqs < 0.0) or np.any(freqs > fs_hz / 2.0):
        raise ValueError("frequencies must lie in [0, fs_hz/2]")
    z = np.exp(-2j * math.pi * np.outer(freqs, np.arange(max(len(filt.b), len(filt.a)))) / fs_hz)
    num = z[:, :len(filt.b)] @ filt.b
    den = z[:, :len(filt.a)] @ filt.a
    bad = np.abs(den) < 1e-300
    mag = np.abs(num) / np.where(bad, 1.0, np.abs(den))
    if filt.zero_phase:
        mag = mag * mag
    db = to_db(mag)
    db[bad] = np.nan
    return FrequencyResponse(freqs_hz=freqs, magnitude_db=db,
                             source=ResponseSource.ANALYTIC)


def empirical_frequency_response(unfiltered_blocks, filtered_blocks,
                                 fs_hz: float) -> FrequencyResponse:
    """Ratio method: mean filtered magnitude over mean unfiltered magnitude.

    Averaging happens before the division so that near-empty bins do not blow
    up the estimate; bins whose unfiltered magnitude still sits below the
    division floor are reported NaN.
    """
    a = np.asarray(unfiltered_blocks, dtype=float)
    b = np.asarray(filtered_blocks, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if b.ndim == 1:
        b = b[None, :]
    if a.shape != b.shape:
        raise ValueError(
            f"paired block sets must match in count and length, got {a.shape} vs {b.shape}")
    mean_unfiltered = _block_magnitudes(a).mean(axis=0)
    mean_filtered = _block_magnitudes(b).mean(axis=0)
    n = a.shape[1]
    freqs = np.arange(n // 2) * fs_hz / n
    defined = mean_unfiltered >= RATIO_FLOOR
    ratio = np.where(defined, mean_filtered / np.where(defined, mean_unfiltered, 1.0), np.nan)
    db = np.where(defined, to_db(np.where(defined, ratio, 1.0)), np.nan)
    return FrequencyResponse(freqs_hz=freqs, magnitude_db=db,
                             source=ResponseSource.RATIO_METHOD)


def find_db_crossing(response: FrequencyResponse, level_db: float) -> float | None:
    """Lowest frequency where the response first reaches ``level_db`` or below.

    Linearly interpolates between the bracketing bins; returns None when the
    level is never reached. NaN bins are skipped.
    """
    if level_db >= 0.0:
        raise ValueError("level_db must be negative")
    freqs = np.asarray(response.freqs_hz, dtype=float)
    db = np.asarray(response.magnitude_db, dtype=float)
    if freqs.size == 0:
        raise ValueError("response is empty")
    prev_f = prev_db = None
    for f, m in zip(freqs, db):
        if math.isnan(m):
            continue
        if m <= level_db:
            if prev_f is None:
                return float(f)
            frac = (level_db - prev_db) / (m - prev_db)
            return float(prev_f + frac * (f - prev_f))
        prev_f, prev_db = f, m
    return None
