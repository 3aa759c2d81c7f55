"""WAV and GCI-marker ingestion, report serialisation."""

from __future__ import annotations

import csv
import io as _io
import json
import math
import struct
import warnings
from pathlib import Path

import numpy as np

from .errors import FormatError
from .signal import GCISource, GCITrack, SampleBuffer

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
SIG_DIGITS = 9

DECOMPOSE_COLUMNS = (
    "gci_index", "gci", "offset", "analysis_instant", "T0", "L", "strategy", "radius",
    "n_anticausal", "n_causal", "Fg_est", "gap_width", "residual_max", "warnings", "error",
)
SWEEP_COLUMNS = (
    "Oq", "alpha_m", "F0", "vowel", "gci_error", "strategy", "Fg_est", "Fg_ref", "Fg_rel_error",
    "determined", "spectral_distortion", "radius", "n_anticausal", "gap_width", "residual_max",
    "wave_correlation", "completeness_error", "warnings", "error",
)
AGGREGATE_COLUMNS = ("gci_error", "strategy", "determination_rate", "mean_sd", "n_frames", "n_failed")


class WavWarning(UserWarning):
    pass


# --- WAV -------------------------------------------------------------------


def _chunks(data):
    """Yield (chunk_id, payload_offset, size) for the chunks after the RIFF header."""
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        yield cid, pos + 8, size
        pos += 8 + size + (size & 1)
    if pos != len(data) and pos < len(data):
        raise FormatError(f"truncated chunk header at byte {pos}", pos)


def read_wav(path) -> SampleBuffer:
    """PCM 16-bit or IEEE float32 WAV as samples in [-1, 1].

    Multichannel files keep channel 0 and emit a WavWarning.
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise FormatError("file too short for a RIFF header", 0)
    riff, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if riff != b"RIFF":
        raise FormatError("missing RIFF signature", 0)
    if wave != b"WAVE":
        raise FormatError("missing WAVE form type", 8)
    fmt = None
    payload = None
    for cid, off, size in _chunks(data):
        if cid == b"fmt ":
            if size < 16 or off + 16 > len(data):
                raise FormatError("truncated 'fmt ' chunk", off)
            fmt = struct.unpack_from("<HHIIHH", data, off)
            if fmt[0] == WAVE_FORMAT_EXTENSIBLE:
                if size < 40 or off + 26 > len(data):
                    raise FormatError("truncated extensible 'fmt ' chunk", off)
                sub = struct.unpack_from("<H", data, off + 24)[0]
                fmt = (sub,) + fmt[1:]
        elif cid == b"data":
            if fmt is None:
                raise FormatError("'data' chunk precedes 'fmt ' chunk", off - 8)
            if off + size > len(data):
                raise FormatError(
                    f"truncated 'data' chunk: {size} bytes declared, {len(data) - off} present", off
                )
            payload = (off, size)
            break
    if fmt is None:
        raise FormatError("missing 'fmt ' chunk", len(data))
    if payload is None:
        raise FormatError("missing 'data' chunk", len(data))
    tag, channels, rate, _, block_align, bits = fmt
    if channels < 1 or rate < 1:
        raise FormatError("invalid channel count or sample rate in 'fmt ' chunk", 20)
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = "<i2", 1.0 / 32768.0
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = "<f4", 1.0
    else:
        raise FormatError(f"unsupported codec: format tag {tag}, {bits} bits per sample", 20)
    off, size = payload
    nframes = size // block_align
    raw = np.frombuffer(data, dtype=dtype, count=nframes * channels, offset=off)
    raw = raw.reshape(nframes, channels)
    if channels > 1:
        warnings.warn(f"{path}: {channels} channels, using channel 0", WavWarning, stacklevel=2)
    return SampleBuffer(raw[:, 0].astype(float) * scale, int(rate))


def write_wav(path, samples, sample_rate, pcm16=False):
    """Mono WAV: float32 by default, or 16-bit PCM (clipped to [-1, 1])."""
    x = np.asarray(samples, dtype=float)
    if pcm16:
        payload = np.round(np.clip(x, -1.0, 32767 / 32768) * 32768).astype("<i2").tobytes()
        tag, bits = WAVE_FORMAT_PCM, 16
    else:
        payload = x.astype("<f4").tobytes()
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
    block = bits // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, tag, 1, int(sample_rate), int(sample_rate) * block, block, bits,
        b"data", len(payload),
    )
    Path(path).write_bytes(header + payload)


# --- GCI marker files ------------------------------------------------------


def read_gci_file(path, sample_rate) -> GCITrack:
    """One instant per line: integer samples, or seconds if any line has a '.'."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    entries = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    seconds = any("." in text for _, text in entries)
    values = []
    for lineno, text in entries:
        try:
            v = float(text)
        except ValueError:
            raise FormatError(f"{path}: line {lineno}: not a number: {text!r}", lineno) from None
        v = v * sample_rate if seconds else v
        if values and v <= values[-1]:
            raise FormatError(f"{path}: line {lineno}: GCI instants must be strictly increasing", lineno)
        values.append(v)
    if seconds:
        values = [round(v, 6) for v in values]
    return GCITrack(np.array(values, dtype=float), GCISource.MARKER_FILE)


def write_gci_file(path, track: GCITrack):
    text = "".join(f"{int(round(v))}\n" for v in track.instants)
    Path(path).write_text(text, encoding="utf-8")


# --- reports ---------------------------------------------------------------


def _clean(value):
    """Normalise a value for serialisation: 9 significant digits, NaN as None."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return None
        return float(f"{float(value):.{SIG_DIGITS}g}")
    if isinstance(value, (list, tuple)):
        return "; ".join(str(v) for v in value)
    return value


def _csv_cell(value):
    value = _clean(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    return str(value)


def format_report(records, fmt="csv", columns=None) -> str:
    records = [dict(r) for r in records]
    if columns is None:
        columns = list(records[0]) if records else []
    columns = list(columns)
    if fmt == "json":
        rows = [{c: _clean(r.get(c)) for c in columns} for r in records]
        return json.dumps(rows, indent=1, allow_nan=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def write_report(records, fmt, path, columns=None):
    """Write records as CSV (header row first) or a JSON array of flat objects."""
    text = format_report(records, fmt, columns)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_report(path, fmt=None):
    """Inverse of write_report; CSV cells come back as strings."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    text = path.read_text(encoding="utf-8")
    if fmt == "json":
        return json.loads(text)
    return list(csv.DictReader(_io.StringIO(text)))
