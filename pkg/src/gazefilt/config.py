"""Run configuration with defaults matching the 1000 Hz analysis pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class RunConfig:
    fs_hz: float = 1000.0
    cutoff_hz: float = 100.0
    seg_len: int = 2048
    block_len: int = 256
    vmax_deg_s: float = 25.0
    max_lag: int = 5
    alpha: float = 0.05
    filters: tuple[str, ...] = ("sg", "iir", "fir")
    sg_window: int = 11
    sg_polyorder: int = 2
    iir_order: int = 7
    fir_taps: int = 80

    def __post_init__(self):
        if self.block_len < 2 or self.block_len & (self.block_len - 1):
            raise ValueError("block_len must be a power of two >= 2")
        if self.seg_len % self.block_len != 0:
            raise ValueError("seg_len must be divisible by block_len")
        if not 0.0 < self.cutoff_hz < self.fs_hz / 2.0:
            raise ValueError("cutoff_hz must lie in (0, fs_hz/2)")
        unknown = set(self.filters) - {"sg", "iir", "fir"}
        if unknown:
            raise ValueError(f"unknown filters: {sorted(unknown)}")
