"""Recording CSV ingestion, plot-ready CSV/JSON emission, synthetic signals.

Recordings travel as ``t_ms,x_deg,y_deg`` CSV. All numeric output is written
with shortest round-trip float repr so re-loading an emitted file reproduces
the values bit-exactly. File writes go through a temp file plus rename.
"""

from __future__ import annotations

import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kinematics import Recording


class DataError(Exception):
    """A file or stream failed to parse or violated recording invariants."""


class SyntheticKind(Enum):
    WHITE_NOISE_FIXATION = "white_noise_fixation"
    SACCADE_WITH_NOISE = "saccade_with_noise"
    SINUSOID = "sinusoid"


@dataclass
class SyntheticSpec:
    """Seed-deterministic test-signal recipe."""

    kind: SyntheticKind
    duration_s: float = 30.0
    fs_hz: float = 1000.0
    noise_sigma_deg: float = 0.01
    saccade_amplitude_deg: float = 1.25
    freq_hz: float = 62.5          # sinusoid only
    amplitude_deg: float = 1.0     # sinusoid only
    seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0.0:
            raise ValueError("duration_s must be positive")
        if self.fs_hz <= 0.0:
            raise ValueError("fs_hz must be positive")


def generate_synthetic(spec: SyntheticSpec) -> Recording:
    """Deterministic synthetic recording for a given spec and seed."""
    n = int(round(spec.duration_s * spec.fs_hz))
    if n < 1:
        raise ValueError("duration too short for one sample")
    t_ms = np.arange(n) * (1000.0 / spec.fs_hz)
    rng = np.random.default_rng(spec.seed)
    if spec.kind is SyntheticKind.SINUSOID:
        x = spec.amplitude_deg * np.sin(2.0 * math.pi * spec.freq_hz * t_ms / 1000.0)
        y = np.zeros(n)
    elif spec.kind is SyntheticKind.WHITE_NOISE_FIXATION:
        x = spec.noise_sigma_deg * rng.standard_normal(n)
        y = spec.noise_sigma_deg * rng.standard_normal(n)
    elif spec.kind is SyntheticKind.SACCADE_WITH_NOISE:
        # smoothstep profile: monotone, exactly saccade_amplitude_deg of travel
        rise_len = max(2, int(round(0.030 * spec.fs_hz)))
        start = (n - rise_len) // 2
        u = np.clip((np.arange(n) - start) / rise_len, 0.0, 1.0)
        x = spec.saccade_amplitude_deg * u * u * (3.0 - 2.0 * u)
        y = np.zeros(n)
        if spec.noise_sigma_deg > 0.0:
            x = x + spec.noise_sigma_deg * rng.standard_normal(n)
            y = y + spec.noise_sigma_deg * rng.standard_normal(n)
    else:
        raise ValueError(f"unknown synthetic kind {spec.kind!r}")
    return Recording(fs_hz=spec.fs_hz, t_ms=t_ms, x_deg=x, y_deg=y)


def _open_in(path):
    if path in (None, "-"):
        return sys.stdin, False
    try:
        return open(path, "r", newline=""), True
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc


def load_recording(path, fs_hz: float | None = None) -> Recording:
    """Parse a ``t_ms,x_deg,y_deg`` CSV into a validated Recording.

    The sampling rate is inferred from the median timestamp step unless
    given. Any NaN, non-monotonic timestamp, or step deviating from the
    median by half a sample period or more is rejected with its line number.
    """
    stream, should_close = _open_in(path)
    name = path if path not in (None, "-") else "<stdin>"
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{name}: empty file")
        header = [h.strip() for h in header]
        required = ["t_ms", "x_deg", "y_deg"]
        if header[:3] != required:
            raise DataError(f"{name}: expected columns {required}, got {header}")
        t, x, y = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 3:
                raise DataError(f"{name}:{lineno}: expected 3 columns, got {len(row)}")
            try:
                vals = [float(v) for v in row[:3]]
            except ValueError as exc:
                raise DataError(f"{name}:{lineno}: non-numeric value ({exc})") from None
            if any(math.isnan(v) for v in vals):
                raise DataError(f"{name}:{lineno}: NaN sample (blink or dropout?)")
            t.append(vals[0])
            x.append(vals[1])
            y.append(vals[2])
    finally:
        if should_close:
            stream.close()
    if not t:
        raise DataError(f"{name}: no samples (header only)")
    t_arr = np.asarray(t)
    if len(t_arr) >= 2:
        dt = np.diff(t_arr)
        bad = np.where(dt <= 0.0)[0]
        if bad.size:
            raise DataError(f"{name}:{int(bad[0]) + 3}: non-monotonic timestamp")
        step = float(np.median(dt)) if fs_hz is None else 1000.0 / fs_hz
        jitter = np.abs(dt - step)
        bad = np.where(jitter >= 0.5 * step)[0]
        if bad.size:
            raise DataError(
                f"{name}:{int(bad[0]) + 3}: timestamp step {dt[bad[0]]:g} ms "
                f"deviates from the {step:g} ms sample period")
        rate = fs_hz if fs_hz is not None else 1000.0 / step
    else:
        rate = fs_hz if fs_hz is not None else 1000.0
    return Recording(fs_hz=rate, t_ms=t_arr, x_deg=np.asarray(x), y_deg=np.asarray(y))


def _atomic_write(path, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gazefilt-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list[str], columns: list[np.ndarray]):
    """Emit columns as CSV with round-trippable float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    ints = [np.issubdtype(np.asarray(c).dtype, np.integer) for c in columns]
    for row in zip(*columns):
        writer.writerow([str(int(v)) if as_int else repr(float(v))
                         for v, as_int in zip(row, ints)])
    if path in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        _atomic_write(path, buf.getvalue())


def write_recording(path, recording: Recording):
    write_csv(path, ["t_ms", "x_deg", "y_deg"],
              [recording.t_ms, recording.x_deg, recording.y_deg])


def load_xy_csv(path, expected_header: list[str] | None = None):
    """Read a two-column numeric CSV back into a pair of arrays."""
    stream, should_close = _open_in(path)
    name = path if path not in (None, "-") else "<stdin>"
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{name}: empty file")
        if expected_header is not None and [h.strip() for h in header] != expected_header:
            raise DataError(f"{name}: expected columns {expected_header}, got {header}")
        left, right = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                left.append(float(row[0]))
                right.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise DataError(f"{name}:{lineno}: bad row ({exc})") from None
    finally:
        if should_close:
            stream.close()
    return np.asarray(left), np.asarray(right)


def write_json(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        _atomic_write(path, text if text.endswith("\n") else text + "\n")
