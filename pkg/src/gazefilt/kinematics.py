"""Velocity estimates and selection of quiet (fixation-only) segments.

Quiet-segment screening walks a recording left to right and keeps
non-overlapping fixed-length windows whose six-point velocity never exceeds
the threshold on either gaze channel, so that saccades and other fast events
stay out of the spectral and autocorrelation analyses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Recording:
    """Uniformly sampled gaze positions, in degrees of visual angle."""

    fs_hz: float
    t_ms: np.ndarray
    x_deg: np.ndarray
    y_deg: np.ndarray

    def __post_init__(self):
        self.t_ms = np.asarray(self.t_ms, dtype=float)
        self.x_deg = np.asarray(self.x_deg, dtype=float)
        self.y_deg = np.asarray(self.y_deg, dtype=float)
        if not (len(self.t_ms) == len(self.x_deg) == len(self.y_deg)):
            raise ValueError("t_ms, x_deg, y_deg must have equal length")

    def __len__(self) -> int:
        return len(self.t_ms)


@dataclass
class Segment:
    start_index: int
    samples: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.samples)


def sixpoint_velocity(x, fs_hz: float) -> np.ndarray:
    """v[t] = (x[t+3] - x[t-3]) / (6/fs); defined for t in [3, N-4].

    The six-sample span makes this a noise-robust central difference; the
    three samples at each end have no estimate and are excluded.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 7:
        raise ValueError("need at least 7 samples for six-point velocity")
    return (x[6:] - x[:-6]) * (fs_hz / 6.0)


def instantaneous_velocity(x, fs_hz: float) -> np.ndarray:
    """Sample-to-sample difference velocity, defined from the second sample."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 samples")
    return np.diff(x) * fs_hz


def select_quiet_segments(recording: Recording, seg_len: int = 2048,
                          vmax_deg_s: float = 25.0,
                          radial: bool = False) -> list[Segment]:
    """Greedy left-to-right packing of velocity-clean windows.

    A sample is admissible when its six-point velocity stays within
    ``vmax_deg_s``; by default each channel is screened separately (a window
    is rejected if either channel exceeds the bound), with ``radial=True``
    screening the euclidean velocity magnitude instead. Samples whose
    velocity is undefined (first and last three) are inadmissible. Greedy
    packing is optimal for fixed-length non-overlapping windows.

    Segments carry the horizontal channel; may be empty.
    """
    n = len(recording)
    if seg_len > n:
        raise ValueError(f"seg_len {seg_len} exceeds recording length {n}")
    if seg_len < 1:
        raise ValueError("seg_len must be positive")
    vx = sixpoint_velocity(recording.x_deg, recording.fs_hz)
    vy = sixpoint_velocity(recording.y_deg, recording.fs_hz)
    ok = np.zeros(n, dtype=bool)
    if radial:
        ok[3:n - 3] = np.hypot(vx, vy) <= vmax_deg_s
    else:
        ok[3:n - 3] = (np.abs(vx) <= vmax_deg_s) & (np.abs(vy) <= vmax_deg_s)
    bad_before = np.concatenate([[0], np.cumsum(~ok)])
    segments = []
    start = 0
    while start + seg_len <= n:
        if bad_before[start + seg_len] == bad_before[start]:
            segments.append(Segment(start_index=start,
                                    samples=recording.x_deg[start:start + seg_len].copy()))
            start += seg_len
        else:
            start += 1
    return segments


def split_blocks(segment, block_len: int = 256) -> list[np.ndarray]:
    """Cut a segment into contiguous non-overlapping blocks, in order."""
    samples = np.asarray(getattr(segment, "samples", segment), dtype=float)
    if block_len < 1:
        raise ValueError("block_len must be positive")
    if samples.size % block_len != 0:
        raise ValueError(
            f"segment length {samples.size} is not divisible by block length {block_len}")
    return list(samples.reshape(-1, block_len))
