"""Design and application of the three low-pass filters used for gaze data.

The three designs: a Savitzky-Golay smoother (symmetric FIR, applied as a
single centered pass), a Butterworth low-pass (IIR, applied forward-backward
for zero phase), and a Hamming-windowed-sinc FIR whose nominal cutoff is
tuned so the single-pass -3 dB point lands on the requested frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import lfilter

SQRT_HALF = 1.0 / math.sqrt(2.0)


class FilterKind(Enum):
    SAVITZKY_GOLAY = "savitzky_golay"
    BUTTERWORTH_LOWPASS = "butterworth_lowpass"
    WINDOWED_SINC_FIR = "windowed_sinc_fir"


class DesignError(RuntimeError):
    """A designed filter came out unusable (unstable or untunable)."""


@dataclass
class FilterSpec:
    """Parameters that fully determine one of the three designs.

    Only the fields relevant to ``kind`` are set; the rest stay None.
    """

    kind: FilterKind
    fs_hz: float | None = None
    cutoff_hz: float | None = None
    window_length: int | None = None  # SG, odd
    poly_order: int | None = None     # SG
    order: int | None = None          # Butterworth
    n_taps: int | None = None         # FIR

    def __post_init__(self):
        if self.window_length is not None:
            if self.window_length % 2 == 0:
                raise ValueError("window_length must be odd")
            if self.poly_order is None or self.window_length <= self.poly_order:
                raise ValueError("window_length must exceed poly_order")
        if self.cutoff_hz is not None:
            if self.fs_hz is None or not 0.0 < self.cutoff_hz < self.fs_hz / 2.0:
                raise ValueError("cutoff_hz must lie in (0, fs_hz/2)")
        if self.order is not None and self.order < 1:
            raise ValueError("order must be >= 1")
        if self.n_taps is not None and self.n_taps < 2:
            raise ValueError("n_taps must be >= 2")


@dataclass(eq=False)
class DigitalFilter:
    """Rational transfer function b(z)/a(z); a == [1] for FIR kernels.

    ``zero_phase`` marks filters meant to run forward-backward; the analytic
    response of such a filter is the squared single-pass magnitude.
    """

    b: np.ndarray
    a: np.ndarray = field(default_factory=lambda: np.ones(1))
    spec: FilterSpec | None = None
    zero_phase: bool = False

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        self.a = np.asarray(self.a, dtype=float)
        if self.a[0] != 1.0:
            self.b = self.b / self.a[0]
            self.a = self.a / self.a[0]

    @property
    def is_fir(self) -> bool:
        return len(self.a) == 1


@dataclass
class FirTapParams:
    """Inputs to the rule-of-thumb tap-count estimate for a windowed FIR."""

    delta1: float  # passband ripple
    delta2: float  # stopband suppression
    fs_hz: float
    transition_width_hz: float

    def __post_init__(self):
        for name in ("delta1", "delta2", "fs_hz", "transition_width_hz"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.transition_width_hz >= self.fs_hz / 2.0:
            raise ValueError("transition_width_hz must be below fs_hz/2")


def estimate_fir_taps(params: FirTapParams) -> int:
    """Rule-of-thumb tap count (2/3)*log10(1/(10*d1*d2))*fs/df, floor 2."""
    n = (2.0 / 3.0) * math.log10(1.0 / (10.0 * params.delta1 * params.delta2))
    n *= params.fs_hz / params.transition_width_hz
    return max(2, int(math.floor(n + 0.5)))


def design_savitzky_golay(window_length: int, poly_order: int) -> DigitalFilter:
    """Least-squares smoothing kernel: center row of the polynomial projection.

    Fitting a degree-``poly_order`` polynomial over a symmetric window and
    reading back its center value is a linear operation, so it reduces to a
    fixed convolution kernel. The kernel is symmetric and sums to one.
    """
    if window_length % 2 == 0:
        raise ValueError("window_length must be odd")
    if window_length <= poly_order:
        raise ValueError("window_length must exceed poly_order")
    half = window_length // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    design = np.vander(offsets, poly_order + 1, increasing=True)
    gram = design.T @ design
    # kernel_j = e_center . design (design^T design)^-1 design^T
    kernel = design[half] @ np.linalg.solve(gram, design.T)
    kernel = 0.5 * (kernel + kernel[::-1])  # enforce exact symmetry
    spec = FilterSpec(kind=FilterKind.SAVITZKY_GOLAY,
                      window_length=window_length, poly_order=poly_order)
    return DigitalFilter(b=kernel, a=np.ones(1), spec=spec, zero_phase=False)


def _butterworth_digital_poles(order: int, cutoff_hz: float, fs_hz: float) -> np.ndarray:
    # Analog prototype poles on the unit circle, scaled by the prewarped
    # cutoff tan(pi*fc/fs), then mapped through the bilinear transform.
    wc = math.tan(math.pi * cutoff_hz / fs_hz)
    k = np.arange(1, order + 1)
    analog = wc * np.exp(1j * math.pi * (2 * k + order - 1) / (2 * order))
    return (1.0 + analog) / (1.0 - analog)


def design_butterworth_lowpass(order: int, cutoff_hz: float, fs_hz: float,
                               zero_phase: bool = True) -> DigitalFilter:
    """Butterworth low-pass via bilinear transform with frequency prewarping.

    Prewarping places the single-pass half-power point exactly at
    ``cutoff_hz``. The design is carried in pole-zero form and expanded to
    polynomial coefficients only at the end.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 < cutoff_hz < fs_hz / 2.0:
        raise ValueError("cutoff_hz must lie in (0, fs_hz/2)")
    poles = _butterworth_digital_poles(order, cutoff_hz, fs_hz)
    a = np.real(np.poly(poles))
    b = np.real(np.poly(-np.ones(order)))  # order zeros at z = -1
    b *= np.sum(a) / np.sum(b)             # unit DC gain
    spec = FilterSpec(kind=FilterKind.BUTTERWORTH_LOWPASS, fs_hz=fs_hz,
                      cutoff_hz=cutoff_hz, order=order)
    filt = DigitalFilter(b=b, a=a, spec=spec, zero_phase=zero_phase)
    if not is_stable(filt):
        raise DesignError(
            f"Butterworth(order={order}, fc={cutoff_hz}, fs={fs_hz}) "
            "produced poles on or outside the unit circle")
    return filt


def _windowed_sinc(n_taps: int, nominal_hz: float, fs_hz: float) -> np.ndarray:
    m = np.arange(n_taps) - (n_taps - 1) / 2.0
    h = (2.0 * nominal_hz / fs_hz) * np.sinc(2.0 * nominal_hz / fs_hz * m)
    h *= 0.54 - 0.46 * np.cos(2.0 * math.pi * np.arange(n_taps) / (n_taps - 1))
    return h / np.sum(h)


def _magnitude_at(b: np.ndarray, freq_hz: float, fs_hz: float) -> float:
    z = np.exp(-2j * math.pi * freq_hz / fs_hz * np.arange(len(b)))
    return abs(np.dot(b, z))


def design_fir_lowpass(n_taps: int, cutoff_hz: float, fs_hz: float,
                       zero_phase: bool = True) -> DigitalFilter:
    """Hamming-windowed sinc kernel with the -3 dB point placed by bisection.

    The nominal (ideal-lowpass) cutoff that parameterizes the sinc is not
    where the windowed kernel ends up half-power, so it is adjusted until the
    single-pass magnitude at ``cutoff_hz`` equals 1/sqrt(2).
    """
    if n_taps < 2:
        raise ValueError("n_taps must be >= 2")
    if not 0.0 < cutoff_hz < fs_hz / 2.0:
        raise ValueError("cutoff_hz must lie in (0, fs_hz/2)")
    nyquist = fs_hz / 2.0

    def gain(nominal):
        return _magnitude_at(_windowed_sinc(n_taps, nominal, fs_hz), cutoff_hz, fs_hz)

    # gain at cutoff grows with the nominal cutoff; bracket 1/sqrt(2)
    lo = hi = cutoff_hz
    while gain(lo) > SQRT_HALF and lo > 1e-6 * fs_hz:
        lo *= 0.5
    while gain(hi) < SQRT_HALF and hi < nyquist * (1.0 - 1e-9):
        hi = min(hi * 1.25, nyquist * (1.0 - 1e-9))
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if gain(mid) < SQRT_HALF:
            lo = mid
        else:
            hi = mid
    nominal = 0.5 * (lo + hi)
    b = _windowed_sinc(n_taps, nominal, fs_hz)
    if abs(_magnitude_at(b, cutoff_hz, fs_hz) - SQRT_HALF) > 1e-3:
        raise DesignError(
            f"cannot place the -3 dB point at {cutoff_hz} Hz with "
            f"{n_taps} taps at fs={fs_hz} Hz")
    spec = FilterSpec(kind=FilterKind.WINDOWED_SINC_FIR, fs_hz=fs_hz,
                      cutoff_hz=cutoff_hz, n_taps=n_taps)
    return DigitalFilter(b=b, a=np.ones(1), spec=spec, zero_phase=zero_phase)


def is_stable(filt: DigitalFilter) -> bool:
    """Unit-circle test: all denominator roots strictly inside |z| < 1."""
    if filt.is_fir:
        return True
    return bool(np.all(np.abs(np.roots(filt.a)) < 1.0 - 1e-10))


def apply_forward(filt: DigitalFilter, signal) -> np.ndarray:
    """Single causal pass of the difference equation, zero initial state."""
    x = np.asarray(signal, dtype=float)
    if x.size == 0:
        raise ValueError("signal must contain at least one sample")
    return lfilter(filt.b, filt.a, x)


def apply_zero_phase(filt: DigitalFilter, signal) -> np.ndarray:
    """Forward-backward application: filter, reverse, filter, reverse.

    The squared magnitude response and cancelled phase come from running the
    same filter in both time directions. Startup transients are pushed into
    odd-reflection padding of length 3*(max(len(a), len(b)) - 1), capped at
    one less than the signal length.
    """
    x = np.asarray(signal, dtype=float)
    n = x.size
    ncoef = max(len(filt.a), len(filt.b))
    if n <= 3 * ncoef:
        raise ValueError(
            f"zero-phase filtering needs more than {3 * ncoef} samples, got {n}")
    pad = min(3 * (ncoef - 1), n - 1)
    if pad > 0:
        head = 2.0 * x[0] - x[pad:0:-1]
        tail = 2.0 * x[-1] - x[-2:-pad - 2:-1]
        x = np.concatenate([head, x, tail])
    y = apply_forward(filt, x)[::-1]
    y = apply_forward(filt, y)[::-1]
    return y[pad:pad + n] if pad > 0 else y


def apply_centered(filt: DigitalFilter, signal) -> np.ndarray:
    """Single delay-free pass of a symmetric odd-length FIR kernel.

    This is how the Savitzky-Golay smoother runs: its kernel is already
    zero-phase on interior samples, so one centered pass suffices. Edges are
    handled by mirror padding of half a window.
    """
    if not filt.is_fir or len(filt.b) % 2 == 0:
        raise ValueError("centered application needs an odd-length FIR kernel")
    if not np.allclose(filt.b, filt.b[::-1], rtol=0.0, atol=1e-12):
        raise ValueError("centered application needs a symmetric kernel")
    x = np.asarray(signal, dtype=float)
    half = len(filt.b) // 2
    if x.size <= half:
        raise ValueError(f"signal must be longer than {half} samples")
    if half == 0:
        return filt.b[0] * x
    padded = np.pad(x, half, mode="reflect")
    return np.convolve(padded, filt.b, mode="valid")


def apply_filter(filt: DigitalFilter, signal) -> np.ndarray:
    """Run a filter the way it was designed to be run.

    Zero-phase designs go forward-backward; symmetric odd-length FIR kernels
    (Savitzky-Golay) get one centered pass; anything else a causal pass.
    """
    if filt.zero_phase:
        return apply_zero_phase(filt, signal)
    if filt.is_fir and len(filt.b) % 2 == 1 and np.allclose(
            filt.b, filt.b[::-1], rtol=0.0, atol=1e-12):
        return apply_centered(filt, signal)
    return apply_forward(filt, signal)
