"""Command-line front end: one subcommand per analysis stage.

Exit codes: 0 on success, 1 on usage errors, 2 on data or design errors.
All emitters default to stdout so stages can be piped together.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import RunConfig
from .dataio import (DataError, SyntheticKind, SyntheticSpec,
                     generate_synthetic, load_recording, write_csv,
                     write_json, write_recording)
from .filters import (DesignError, apply_filter, design_butterworth_lowpass,
                      design_fir_lowpass, design_savitzky_golay, is_stable)
from .kinematics import (instantaneous_velocity, select_quiet_segments,
                         sixpoint_velocity)
from .spectral import (amplitude_spectrum, analytic_frequency_response,
                       empirical_frequency_response)
from .stats import run_acf_study

_DEFAULTS = RunConfig()


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; data problems exit 2 (handled in main)
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_io(p, needs_in=True):
    if needs_in:
        p.add_argument("--in", dest="infile", default="-", metavar="PATH",
                       help="input recording CSV (default: stdin)")
    p.add_argument("--out", default="-", metavar="PATH",
                   help="output path (default: stdout)")


def _add_design_flags(p):
    p.add_argument("--filter", choices=("sg", "iir", "fir"), default="fir")
    p.add_argument("--fs", type=float, default=_DEFAULTS.fs_hz)
    p.add_argument("--cutoff", type=float, default=_DEFAULTS.cutoff_hz)
    p.add_argument("--order", type=int, default=_DEFAULTS.iir_order,
                   help="Butterworth order")
    p.add_argument("--taps", type=int, default=_DEFAULTS.fir_taps,
                   help="FIR tap count")
    p.add_argument("--window", type=int, default=_DEFAULTS.sg_window,
                   help="Savitzky-Golay window length (odd)")
    p.add_argument("--polyorder", type=int, default=_DEFAULTS.sg_polyorder,
                   help="Savitzky-Golay polynomial order")
    p.add_argument("--zero-phase", dest="zero_phase",
                   action=argparse.BooleanOptionalAction, default=True,
                   help="forward-backward application for iir/fir")


def _build_filter(args, kind=None):
    kind = kind or args.filter
    if kind == "sg":
        return design_savitzky_golay(args.window, args.polyorder)
    if kind == "iir":
        return design_butterworth_lowpass(args.order, args.cutoff, args.fs,
                                          zero_phase=args.zero_phase)
    return design_fir_lowpass(args.taps, args.cutoff, args.fs,
                              zero_phase=args.zero_phase)


def _chop_blocks(x: np.ndarray, block_len: int) -> np.ndarray:
    n_blocks = len(x) // block_len
    if n_blocks < 1:
        raise DataError(f"recording shorter than one {block_len}-sample block")
    return x[:n_blocks * block_len].reshape(n_blocks, block_len)


def _cmd_synth(args):
    kinds = {"white": SyntheticKind.WHITE_NOISE_FIXATION,
             "saccade": SyntheticKind.SACCADE_WITH_NOISE,
             "sinusoid": SyntheticKind.SINUSOID}
    spec = SyntheticSpec(kind=kinds[args.kind], duration_s=args.duration,
                         fs_hz=args.fs, noise_sigma_deg=args.sigma,
                         saccade_amplitude_deg=args.saccade_amplitude,
                         freq_hz=args.freq, amplitude_deg=args.amplitude,
                         seed=args.seed)
    write_recording(args.out, generate_synthetic(spec))
    return 0


def _cmd_design(args):
    filt = _build_filter(args)
    payload = {
        "filter": args.filter,
        "b": [float(v) for v in filt.b],
        "a": [float(v) for v in filt.a],
        "zero_phase": filt.zero_phase,
        "stable": is_stable(filt),
        "fs_hz": args.fs,
    }
    write_json(args.out, json.dumps(payload, indent=2))
    return 0


def _cmd_filter(args):
    rec = load_recording(args.infile, fs_hz=args.fs if args.use_fs else None)
    filt = _build_filter(args)
    rec.x_deg = apply_filter(filt, rec.x_deg)
    rec.y_deg = apply_filter(filt, rec.y_deg)
    write_recording(args.out, rec)
    return 0


def _cmd_freqz(args):
    filt = _build_filter(args)
    freqs = np.linspace(0.0, args.fs / 2.0, args.points)
    resp = analytic_frequency_response(filt, freqs, args.fs)
    write_csv(args.out, ["freq_hz", "mag_db"], [resp.freqs_hz, resp.magnitude_db])
    return 0


def _cmd_measure_response(args):
    unfiltered = load_recording(args.infile)
    filtered = load_recording(args.filtered)
    if len(unfiltered) != len(filtered):
        raise DataError("unfiltered and filtered recordings differ in length")
    blocks_a = _chop_blocks(unfiltered.x_deg, args.block_len)
    blocks_b = _chop_blocks(filtered.x_deg, args.block_len)
    resp = empirical_frequency_response(blocks_a, blocks_b, unfiltered.fs_hz)
    write_csv(args.out, ["freq_hz", "mag_db"], [resp.freqs_hz, resp.magnitude_db])
    return 0


def _cmd_spectrum(args):
    rec = load_recording(args.infile)
    channel = rec.x_deg if args.channel == "x" else rec.y_deg
    spec = amplitude_spectrum(_chop_blocks(channel, args.block_len), rec.fs_hz)
    write_csv(args.out, ["freq_hz", "amplitude_deg"],
              [spec.freqs_hz, spec.amplitude_deg])
    return 0


def _cmd_segments(args):
    rec = load_recording(args.infile)
    segs = select_quiet_segments(rec, seg_len=args.seg_len,
                                 vmax_deg_s=args.vmax, radial=args.radial)
    if not segs:
        print("warning: no quiet segments found", file=sys.stderr)
    write_csv(args.out, ["start_index", "length"],
              [np.array([s.start_index for s in segs], dtype=int),
               np.array([s.length for s in segs], dtype=int)])
    return 0


def _cmd_velocity(args):
    rec = load_recording(args.infile)
    channel = rec.x_deg if args.channel == "x" else rec.y_deg
    if args.method == "sixpoint":
        v = sixpoint_velocity(channel, rec.fs_hz)
        t = rec.t_ms[3:len(rec) - 3]
    else:
        v = instantaneous_velocity(channel, rec.fs_hz)
        t = rec.t_ms[1:]
    write_csv(args.out, ["t_ms", "v_deg_s"], [t, v + args.offset])
    return 0


def _cmd_acf_stats(args):
    rec = load_recording(args.infile)
    segs = select_quiet_segments(rec, seg_len=args.seg_len,
                                 vmax_deg_s=args.vmax, radial=args.radial)
    if not segs:
        raise DataError("no quiet segments; cannot run the ACF study")
    starts = [s.start_index + off for s in segs
              for off in range(0, args.seg_len, args.block_len)]
    conditions = {"unfiltered": rec.x_deg}
    names = [f.strip() for f in args.filters.split(",") if f.strip()]
    for name in names:
        if name not in ("sg", "iir", "fir"):
            raise DataError(f"unknown filter {name!r}")
        conditions[name] = apply_filter(_build_filter(args, kind=name), rec.x_deg)
    blocks = {name: [x[s:s + args.block_len] for s in starts]
              for name, x in conditions.items()}
    study = run_acf_study(blocks, max_lag=args.max_lag, alpha=args.alpha)
    payload = {
        "n_blocks": study.n_blocks,
        "conditions": study.conditions,
        "max_lag": study.max_lag,
        "alpha": study.alpha,
        "median_acf": {c: [float(v) for v in study.median_acf[c]]
                       for c in study.conditions},
        "significant_counts": {c: [int(v) for v in study.significant_counts[c]]
                               for c in study.conditions},
        "lags": [{
            "lag": lt.lag,
            "friedman": {"chi2": lt.friedman.chi2, "df": lt.friedman.df,
                         "p": lt.friedman.p},
            "comparisons": [{"first": c.pair[0], "second": c.pair[1],
                             "difference": c.difference, "p": c.p}
                            for c in lt.tukey],
        } for lt in study.lag_tests],
    }
    write_json(args.out, json.dumps(payload, indent=2))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gazefilt",
                     description="Low-pass filtering and spectral/statistical "
                                 "analysis of eye-tracking recordings")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic recording")
    p.add_argument("--kind", choices=("white", "saccade", "sinusoid"),
                   default="white")
    p.add_argument("--duration", type=float, default=30.0, help="seconds")
    p.add_argument("--fs", type=float, default=_DEFAULTS.fs_hz)
    p.add_argument("--sigma", type=float, default=0.01,
                   help="noise std dev in degrees")
    p.add_argument("--freq", type=float, default=62.5, help="sinusoid Hz")
    p.add_argument("--amplitude", type=float, default=1.0,
                   help="sinusoid amplitude in degrees")
    p.add_argument("--saccade-amplitude", type=float, default=1.25)
    p.add_argument("--seed", type=int, default=0)
    _add_io(p, needs_in=False)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("design", help="emit filter coefficients as JSON")
    _add_design_flags(p)
    _add_io(p, needs_in=False)
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("filter", help="apply a designed filter to a recording")
    _add_design_flags(p)
    p.add_argument("--use-fs", action="store_true",
                   help="trust --fs instead of inferring from timestamps")
    _add_io(p)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("freqz", help="analytic frequency response as CSV")
    _add_design_flags(p)
    p.add_argument("--points", type=int, default=4001)
    _add_io(p, needs_in=False)
    p.set_defaults(func=_cmd_freqz)

    p = sub.add_parser("measure-response",
                       help="ratio-method response from paired recordings")
    p.add_argument("--filtered", required=True, metavar="PATH")
    p.add_argument("--block-len", type=int, default=_DEFAULTS.block_len)
    _add_io(p)
    p.set_defaults(func=_cmd_measure_response)

    p = sub.add_parser("spectrum", help="averaged amplitude spectrum as CSV")
    p.add_argument("--block-len", type=int, default=_DEFAULTS.block_len)
    p.add_argument("--channel", choices=("x", "y"), default="x")
    _add_io(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("segments", help="list velocity-quiet segments")
    p.add_argument("--seg-len", type=int, default=_DEFAULTS.seg_len)
    p.add_argument("--vmax", type=float, default=_DEFAULTS.vmax_deg_s)
    p.add_argument("--radial", action="store_true",
                   help="screen radial speed instead of per-channel")
    _add_io(p)
    p.set_defaults(func=_cmd_segments)

    p = sub.add_parser("velocity", help="velocity trace as CSV")
    p.add_argument("--method", choices=("sixpoint", "instant"),
                   default="sixpoint")
    p.add_argument("--channel", choices=("x", "y"), default="x")
    _add_io(p)
    p.set_defaults(func=_cmd_velocity)

    p = sub.add_parser("acf-stats",
                       help="autocorrelation study across filter conditions")
    _add_design_flags(p)
    p.add_argument("--filters", default="sg,iir,fir",
                   help="comma-separated subset of sg,iir,fir")
    p.add_argument("--seg-len", type=int, default=_DEFAULTS.seg_len)
    p.add_argument("--block-len", type=int, default=_DEFAULTS.block_len)
    p.add_argument("--vmax", type=float, default=_DEFAULTS.vmax_deg_s)
    p.add_argument("--radial", action="store_true")
    p.add_argument("--max-lag", type=int, default=_DEFAULTS.max_lag)
    p.add_argument("--alpha", type=float, default=_DEFAULTS.alpha)
    _add_io(p)
    p.set_defaults(func=_cmd_acf_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except (DataError, DesignError, ValueError, OSError) as exc:
        print(f"gazefilt {args.command}: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())
