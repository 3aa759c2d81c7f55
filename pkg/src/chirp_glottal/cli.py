"""Command-line interface: ``decompose``, ``sweep`` and ``synth``.

Exit codes: 0 when every frame succeeded, 2 when some frames failed,
3 on usage or input-format errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from .bench import STRATEGIES, SweepSettings, aggregate, run_sweep
from .decomp import DEFAULT_K, decompose
from .errors import ChirpGlottalError, FormatError, InvalidArgument
from .io import (
    AGGREGATE_COLUMNS,
    DECOMPOSE_COLUMNS,
    SWEEP_COLUMNS,
    format_report,
    read_gci_file,
    read_wav,
    write_gci_file,
    write_report,
    write_wav,
)
from .lf import DEFAULT_QA, LFParams
from .metrics import FG_CAP_HZ, glottal_formant_frequency
from .signal import (
    GCISource,
    GCITrack,
    SampleBuffer,
    difference_egg,
    extract_frame,
    gcis_from_diff_egg,
)
from .synth import DEFAULT_PERIODS, VOWELS, TestCondition, make_grid, parse_range, synthesize

EXIT_OK = 0
EXIT_FRAME_FAILURES = 2
EXIT_USAGE = 3

log = logging.getLogger("chirp_glottal")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; ours reserves 2 for frame failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- decompose -------------------------------------------------------------


def _load_track(args, buffer):
    if args.gci:
        return read_gci_file(args.gci, buffer.sample_rate)
    if args.egg_delay is None:
        raise UsageError("--egg requires --egg-delay (samples; there is no default)")
    egg = read_wav(args.egg)
    if args.sample_rate:
        egg = SampleBuffer(egg.samples, args.sample_rate)
    if egg.sample_rate != buffer.sample_rate:
        raise UsageError("speech and EGG sample rates differ")
    degg = difference_egg(egg, args.egg_delay)
    track = gcis_from_diff_egg(degg, args.egg_threshold)
    return GCITrack(track.instants, GCISource.EGG_DERIVED)


def _offsets(spec):
    if spec is None:
        return (0.0,)
    values = parse_range(spec)
    if any(abs(v) > 0.5 + 1e-12 for v in values):
        raise InvalidArgument("offsets are fractions of T0 and must lie in [-0.5, 0.5]")
    return values


def analyse_track(buffer, track, strategy="auto", offsets=(0.0,), K=DEFAULT_K, fg_cap=FG_CAP_HZ,
                  export_dir=None):
    """One record per (GCI, offset) in input order, and the number of failed frames."""
    fs = buffer.sample_rate
    records = []
    failures = 0
    for i, gci in enumerate(track.instants):
        for k, off in enumerate(offsets):
            rec = dict(gci_index=i, gci=gci, offset=off, strategy=strategy, warnings=(), error=None)
            try:
                T0 = track.local_period(i)
                instant = gci + int(round(off * T0))
                rec.update(analysis_instant=instant, T0=T0, L=2 * T0)
                frame = extract_frame(buffer, instant, T0)
                d = decompose(frame, strategy, t_star=gci - frame.anchor, K=K)
            except ChirpGlottalError as exc:
                failures += 1
                rec["error"] = f"{type(exc).__name__}: {exc}"
                log.warning("frame %d (offset %+.3g): %s", i, off, rec["error"])
                records.append(rec)
                continue
            rec.update(
                radius=d.radius,
                n_anticausal=d.n_anticausal,
                n_causal=d.n_causal,
                Fg_est=glottal_formant_frequency(d.anticausal_spectrum, fs, fs / T0, fg_cap),
                gap_width=d.gap_width,
                residual_max=d.residual_max,
                warnings=d.warnings,
            )
            records.append(rec)
            if export_dir is not None:
                stem = Path(export_dir) / f"frame{i:05d}_off{k:03d}"
                write_wav(f"{stem}_anticausal.wav", d.anticausal_wave, fs)
                write_wav(f"{stem}_causal.wav", d.causal_wave, fs)
    return records, failures


def cmd_decompose(args):
    buffer = read_wav(args.wav)
    if args.sample_rate:
        buffer = SampleBuffer(buffer.samples, args.sample_rate)
    track = _load_track(args, buffer)
    if len(track) < 2:
        raise UsageError("at least two GCIs are needed to estimate local periods")
    if args.export_dir:
        Path(args.export_dir).mkdir(parents=True, exist_ok=True)
    records, failures = analyse_track(
        buffer,
        track,
        strategy=args.strategy,
        offsets=_offsets(args.offset_sweep),
        K=args.K,
        fg_cap=args.fg_cap,
        export_dir=args.export_dir,
    )
    _emit(records, args.format, args.out, DECOMPOSE_COLUMNS)
    return EXIT_FRAME_FAILURES if failures else EXIT_OK


# --- sweep -----------------------------------------------------------------


def sweep_record(report):
    rec = dict(report.condition)
    rec.update(
        strategy=report.strategy,
        Fg_est=report.Fg_est,
        Fg_ref=report.Fg_ref,
        Fg_rel_error=report.Fg_rel_error,
        determined=report.determined,
        spectral_distortion=report.spectral_distortion,
        radius=report.radius,
        n_anticausal=report.n_anticausal,
        gap_width=report.gap_width,
        residual_max=report.residual_max,
        wave_correlation=report.wave_correlation,
        completeness_error=report.completeness_error,
        warnings=report.warnings,
        error=report.error,
    )
    return rec


def cmd_sweep(args):
    grid = make_grid(args.grid, args.oq, args.alpha_m, args.f0, args.vowels, args.errors)
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    bad = [s for s in strategies if s not in STRATEGIES]
    if bad or not strategies:
        raise UsageError(f"unknown strategies {bad}; choose from {', '.join(STRATEGIES)}")
    for v in grid.vowels:
        if v not in VOWELS:
            raise UsageError(f"unknown vowel {v!r}")
    settings = SweepSettings(
        sample_rate=args.sample_rate or SweepSettings.sample_rate,
        Qa=args.qa,
        K=args.K,
        normalize_sd=not args.no_sd_normalize,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("sweeping %d cells x %d strategies", len(grid), len(strategies))
    reports = list(run_sweep(grid, strategies, settings, args.jobs))
    write_report([sweep_record(r) for r in reports], args.format, out / f"cells.{args.format}",
                 SWEEP_COLUMNS)
    write_report(aggregate(reports), args.format, out / f"aggregate.{args.format}",
                 AGGREGATE_COLUMNS)
    failures = sum(r.error is not None for r in reports)
    if failures:
        log.warning("%d of %d cell analyses failed", failures, len(reports))
    return EXIT_FRAME_FAILURES if failures else EXIT_OK


# --- synth -----------------------------------------------------------------


def cmd_synth(args):
    lf = LFParams(args.oq, args.alpha_m, args.f0, args.qa)
    cond = TestCondition(lf, args.vowel, 0.0, args.sample_rate)
    utt = synthesize(cond, args.periods)
    x = utt.speech.samples
    # 0.5 peak before 16-bit export; amplitude does not affect the decomposition
    write_wav(args.out, 0.5 * x / np.max(np.abs(x)), cond.sample_rate, pcm16=True)
    gci_path = args.gci_out or str(Path(args.out).with_suffix(".gci"))
    write_gci_file(gci_path, utt.true_gcis)
    return EXIT_OK


# --- plumbing --------------------------------------------------------------


def _emit(records, fmt, path, columns):
    if path:
        write_report(records, fmt, path, columns)
    else:
        sys.stdout.write(format_report(records, fmt, columns))


def build_parser():
    p = _Parser(prog="chirp-glottal", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decompose", help="decompose every GCI-centred frame of a WAV file")
    d.add_argument("wav", help="speech WAV (16-bit PCM or 32-bit float)")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--gci", help="GCI marker file (samples, or seconds if decimal)")
    src.add_argument("--egg", help="EGG WAV; GCIs are taken from its first difference")
    d.add_argument("--egg-delay", type=int, help="EGG-to-microphone delay compensation in samples")
    d.add_argument("--egg-threshold", type=float, default=0.3,
                   help="peak threshold as a fraction of the largest dEGG extremum")
    d.add_argument("--strategy", choices=STRATEGIES, default="auto")
    d.add_argument("--offset-sweep", metavar="A:STEP:B",
                   help="analysis offsets around each GCI, in fractions of T0")
    d.add_argument("-K", type=int, default=DEFAULT_K, help="spectrum grid size")
    d.add_argument("--fg-cap", type=float, default=FG_CAP_HZ, help="upper limit of the Fg search (Hz)")
    d.add_argument("--sample-rate", type=int, help="override the WAV header sample rate")
    d.add_argument("--format", choices=("csv", "json"), default="csv")
    d.add_argument("--out", help="report path (default: stdout)")
    d.add_argument("--export-dir", help="write anticausal/causal waves of every frame here")
    d.set_defaults(func=cmd_decompose)

    s = sub.add_parser("sweep", help="GCI-error robustness benchmark on synthetic vowels")
    s.add_argument("--grid", choices=("desk", "full"), default="desk")
    s.add_argument("--oq", help="override the Oq axis (start:step:stop or a,b,c)")
    s.add_argument("--alpha-m", help="override the alpha_m axis")
    s.add_argument("--f0", help="override the F0 axis (Hz)")
    s.add_argument("--vowels", help="override the vowels, e.g. a,i")
    s.add_argument("--errors", help="override the GCI errors, in percent of T0")
    s.add_argument("--strategies", default=",".join(STRATEGIES))
    s.add_argument("--qa", type=float, default=DEFAULT_QA, help="return-phase quotient")
    s.add_argument("-K", type=int, default=DEFAULT_K)
    s.add_argument("--sample-rate", type=int)
    s.add_argument("--no-sd-normalize", action="store_true", help="keep the gain term in SD")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--jobs", type=int, help="worker processes (default: $CHIRP_GLOTTAL_THREADS or 1)")
    s.add_argument("--out", required=True, help="output directory for cells and aggregate files")
    s.set_defaults(func=cmd_sweep)

    y = sub.add_parser("synth", help="write a synthetic vowel WAV and its true GCI file")
    y.add_argument("out", help="output WAV path")
    y.add_argument("--gci-out", help="GCI file path (default: WAV path with .gci suffix)")
    y.add_argument("--oq", type=float, default=0.6)
    y.add_argument("--alpha-m", type=float, default=0.7)
    y.add_argument("--f0", type=float, default=100.0)
    y.add_argument("--qa", type=float, default=DEFAULT_QA)
    y.add_argument("--vowel", choices=VOWELS, default="a")
    y.add_argument("--periods", type=int, default=DEFAULT_PERIODS)
    y.add_argument("--sample-rate", type=int, default=16000)
    y.set_defaults(func=cmd_synth)
    return p


# options whose values may start with "-" (negative ranges such as -0.3:0.05:0.3)
_RANGE_OPTIONS = ("--offset-sweep", "--errors")


def _attach_range_values(argv):
    """Rewrite ``--opt -a:b:c`` as ``--opt=-a:b:c`` so argparse does not see an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _RANGE_OPTIONS:
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_range_values(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UsageError, FormatError, InvalidArgument, OSError) as exc:
        print(f"chirp-glottal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
