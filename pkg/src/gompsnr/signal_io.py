"""Audio decoding, pair alignment, manifests and report serialization.

Only RIFF/WAVE is read. Integer PCM is mapped to [-1, 1) by dividing by
``2**(bits - 1)``; there is no dithering, no resampling and no loudness
processing anywhere in this module.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CorruptHeader,
    DuplicateId,
    EmptyAudio,
    EmptyManifest,
    EmptyReport,
    InvalidConfig,
    InvalidValue,
    IoFailure,
    LengthMismatch,
    MissingColumn,
    MultiChannel,
    NonFiniteAudio,
    SampleRateMismatch,
    TooShort,
    UnsupportedFormat,
)

__all__ = [
    "Waveform",
    "PairManifestEntry",
    "ScoreTable",
    "REPORT_COLUMNS",
    "load_waveform",
    "write_wav",
    "align_pair",
    "read_manifest",
    "write_report",
    "read_report_csv",
    "read_score_table",
    "score_table_from_records",
    "encode_value",
    "decode_value",
]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

REPORT_COLUMNS = ("id", "snr_time_db", "snr_tf_db", "ompsnr_db", "gompsnr_db", "settings")
_SCORE_COLUMNS = REPORT_COLUMNS[1:5]
_MANIFEST_COLUMNS = ("id", "ref_path", "est_path")


@dataclass(frozen=True)
class Waveform:
    """Mono waveform.

    Attributes:
        samples: 1-D float64 array, nominally in [-1, 1].
        sample_rate: sampling rate in Hz.
        source_path: optional label, usually the file the samples came from.
    """

    samples: np.ndarray
    sample_rate: int
    source_path: str | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise MultiChannel(f"expected mono samples, got shape {samples.shape}")
        if samples.size == 0:
            raise EmptyAudio("waveform has zero samples")
        if not np.all(np.isfinite(samples)):
            raise NonFiniteAudio("waveform contains NaN or Inf samples")
        if int(self.sample_rate) <= 0:
            raise InvalidConfig(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.shape[0]

    def replace_samples(self, samples: np.ndarray) -> "Waveform":
        return Waveform(samples, self.sample_rate, self.source_path)


@dataclass(frozen=True)
class PairManifestEntry:
    id: str
    ref_path: str
    est_path: str


@dataclass
class ScoreTable:
    """Wide table of per-utterance scores.

    ``values`` maps metric name to a float array with one entry per id;
    missing cells are NaN and the ``"inf"`` sentinel decodes to ``inf``.
    """

    ids: list[str]
    metric_names: list[str]
    values: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.ids)

    def column(self, name: str) -> np.ndarray:
        return self.values[name]


# -- WAV decoding -----------------------------------------------------------


def _parse_riff(data: bytes) -> tuple[dict, bytes]:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise CorruptHeader("not a RIFF/WAVE file")
    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body_start = pos + 8
        body_end = body_start + size
        if chunk_id == b"fmt ":
            if size < 16 or body_end > len(data):
                raise CorruptHeader("truncated fmt chunk")
            fmt = _parse_fmt(data[body_start:body_end])
        elif chunk_id == b"data":
            if body_end > len(data):
                raise CorruptHeader(
                    f"data chunk declares {size} bytes but only {len(data) - body_start} remain"
                )
            payload = data[body_start:body_end]
        # chunks are word aligned
        pos = body_end + (size & 1)
    if fmt is None:
        raise CorruptHeader("missing fmt chunk")
    if payload is None:
        raise CorruptHeader("missing data chunk")
    return fmt, payload


def _parse_fmt(body: bytes) -> dict:
    tag, channels, rate, _byte_rate, block_align, bits = struct.unpack("<HHIIHH", body[:16])
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(body) < 40:
            raise CorruptHeader("truncated WAVE_FORMAT_EXTENSIBLE header")
        # first two bytes of the sub-format GUID hold the real format tag
        (tag,) = struct.unpack("<H", body[24:26])
    if channels < 1 or rate < 1 or block_align < 1:
        raise CorruptHeader("fmt chunk has zero channels, rate or block size")
    if block_align != channels * (bits // 8):
        raise CorruptHeader(f"block align {block_align} inconsistent with {channels}x{bits} bits")
    return {"tag": tag, "channels": channels, "rate": rate, "bits": bits, "block_align": block_align}


def _decode_samples(payload: bytes, fmt: dict, normalize: bool) -> np.ndarray:
    tag, bits, channels = fmt["tag"], fmt["bits"], fmt["channels"]
    n_frames = len(payload) // fmt["block_align"]
    payload = payload[: n_frames * fmt["block_align"]]
    if tag == WAVE_FORMAT_PCM:
        if bits == 16:
            raw = np.frombuffer(payload, dtype="<i2").astype(np.float64)
        elif bits == 32:
            raw = np.frombuffer(payload, dtype="<i4").astype(np.float64)
        elif bits == 24:
            b = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
            ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
            ints = np.where(ints >= 1 << 23, ints - (1 << 24), ints)
            raw = ints.astype(np.float64)
        else:
            raise UnsupportedFormat(f"unsupported PCM bit depth {bits}")
        if normalize:
            raw = raw / float(2 ** (bits - 1))
    elif tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedFormat(f"unsupported float bit depth {bits}")
        raw = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise UnsupportedFormat(f"unsupported WAVE format tag 0x{tag:04x}")
    return raw.reshape(-1, channels)


def load_waveform(path: str | os.PathLike, channel_policy: str = "error", normalize: bool = True) -> Waveform:
    """Decode a RIFF/WAVE file into a mono ``Waveform``.

    Supports PCM-16, PCM-24, PCM-32 and IEEE float-32, including the
    WAVE_FORMAT_EXTENSIBLE wrapper. With ``channel_policy="downmix"``
    multi-channel audio is averaged across channels; ``"error"`` rejects it.
    ``normalize=False`` keeps integer PCM at its raw integer scale.
    """
    if channel_policy not in ("error", "downmix"):
        raise InvalidConfig(f"unknown channel policy {channel_policy!r}")
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    fmt, payload = _parse_riff(data)
    frames = _decode_samples(payload, fmt, normalize)
    if frames.shape[0] == 0:
        raise EmptyAudio(f"{path} contains zero samples")
    if frames.shape[1] > 1:
        if channel_policy == "error":
            raise MultiChannel(f"{path} has {frames.shape[1]} channels")
        samples = frames.mean(axis=1)
    else:
        samples = frames[:, 0]
    return Waveform(samples, fmt["rate"], str(path))


def write_wav(path: str | os.PathLike, samples, sample_rate: int, subtype: str = "float32") -> None:
    """Write mono or (n, channels) samples as WAV.

    ``subtype`` is one of ``"pcm16"``, ``"pcm24"``, ``"pcm32"``, ``"float32"``.
    Integer subtypes scale by ``2**(bits-1)`` and clip, mirroring the reader.
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    channels = arr.shape[1]
    if subtype == "float32":
        tag, bits = WAVE_FORMAT_IEEE_FLOAT, 32
        payload = arr.astype("<f4").tobytes()
    elif subtype in ("pcm16", "pcm24", "pcm32"):
        tag, bits = WAVE_FORMAT_PCM, int(subtype[3:])
        scale = 2 ** (bits - 1)
        ints = np.clip(np.round(arr * scale), -scale, scale - 1).astype(np.int64)
        if bits == 16:
            payload = ints.astype("<i2").tobytes()
        elif bits == 32:
            payload = ints.astype("<i4").tobytes()
        else:
            u = (ints & 0xFFFFFF).astype("<u4").reshape(-1)
            payload = np.stack([u & 0xFF, (u >> 8) & 0xFF, (u >> 16) & 0xFF], axis=1).astype(np.uint8).tobytes()
    else:
        raise InvalidConfig(f"unknown WAV subtype {subtype!r}")
    block_align = channels * bits // 8
    fmt = struct.pack("<HHIIHH", tag, channels, sample_rate, sample_rate * block_align, block_align, bits)
    body = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    try:
        with open(path, "wb") as fh:
            fh.write(b"RIFF" + struct.pack("<I", len(body)) + body)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def align_pair(ref: Waveform, est: Waveform, policy: str = "strict", min_length: int = 1) -> tuple[Waveform, Waveform]:
    """Bring a reference/estimate pair to a common length.

    ``strict`` requires equal lengths; ``truncate`` cuts both to the shorter
    one. Either way the result must hold at least ``min_length`` samples
    (callers pass the STFT window size).
    """
    if ref.sample_rate != est.sample_rate:
        raise SampleRateMismatch(f"sample rates differ: {ref.sample_rate} vs {est.sample_rate}")
    if policy == "strict":
        if len(ref) != len(est):
            raise LengthMismatch(f"lengths differ: {len(ref)} vs {len(est)}")
        n = len(ref)
    elif policy == "truncate":
        n = min(len(ref), len(est))
    else:
        raise InvalidConfig(f"unknown align policy {policy!r}")
    if n < min_length:
        raise TooShort(f"aligned length {n} is shorter than {min_length} samples")
    if n < len(ref):
        ref = ref.replace_samples(ref.samples[:n])
    if n < len(est):
        est = est.replace_samples(est.samples[:n])
    return ref, est


# -- CSV / JSON plumbing ----------------------------------------------------


def read_manifest(path: str | os.PathLike) -> list[PairManifestEntry]:
    """Read an ``id,ref_path,est_path`` CSV.

    Relative paths are resolved against the manifest's own directory.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            fields = [f.strip() for f in (reader.fieldnames or [])]
            missing = [c for c in _MANIFEST_COLUMNS if c not in fields]
            if missing:
                raise MissingColumn(f"manifest is missing column(s): {', '.join(missing)}")
            rows = [{(k or "").strip(): (v or "").strip() for k, v in row.items()} for row in reader]
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    base = os.path.dirname(os.path.abspath(path))
    entries: list[PairManifestEntry] = []
    seen: set[str] = set()
    for row in rows:
        if not any(row.values()):
            continue
        pair_id = row["id"]
        if pair_id in seen:
            raise DuplicateId(f"duplicate id {pair_id!r} in manifest")
        if not row["ref_path"] or not row["est_path"]:
            raise MissingColumn(f"row {pair_id!r} has an empty path")
        seen.add(pair_id)
        entries.append(
            PairManifestEntry(
                pair_id,
                os.path.join(base, row["ref_path"]),
                os.path.join(base, row["est_path"]),
            )
        )
    if not entries:
        raise EmptyManifest(f"manifest {path} has no data rows")
    return entries


def encode_value(x):
    """JSON-safe score: finite floats pass through, +inf becomes ``"inf"``, NaN/None become ``None``."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return None
    return x


def decode_value(s) -> float:
    if s is None:
        return math.nan
    if isinstance(s, (int, float)):
        return float(s)
    s = s.strip()
    if not s:
        return math.nan
    return float(s)  # float() already accepts "inf" / "-inf"


def _report_record(report) -> dict:
    rec = report.to_record() if hasattr(report, "to_record") else dict(report)
    return {k: rec[k] for k in REPORT_COLUMNS}


def _dump_json(obj, fh) -> None:
    json.dump(obj, fh, indent=2, allow_nan=False)
    fh.write("\n")


def write_report(reports: Sequence, format: str = "json", path: str | os.PathLike | None = None, stream=None) -> str:
    """Serialize metric reports as JSON or CSV.

    Key/column order is fixed to ``REPORT_COLUMNS``. Infinite scores become
    the string ``"inf"``; in CSV the settings column holds compact JSON.
    Returns the serialized text; it is also written to ``path`` or ``stream``
    when given.
    """
    if not reports:
        raise EmptyReport("no reports to write")
    records = [_report_record(r) for r in reports]
    buf = io.StringIO()
    if format == "json":
        _dump_json([{k: encode_value(v) if k in _SCORE_COLUMNS else v for k, v in rec.items()} for rec in records], buf)
    elif format == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for rec in records:
            row = [rec["id"]]
            row += [_csv_number(rec[k]) for k in _SCORE_COLUMNS]
            row.append(json.dumps(rec["settings"], separators=(",", ":"), sort_keys=False))
            writer.writerow(row)
    else:
        raise InvalidConfig(f"unknown report format {format!r}")
    text = buf.getvalue()
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoFailure(f"cannot write report {path}: {exc.strerror or exc}") from exc
    if stream is not None:
        stream.write(text)
    return text


def _csv_number(x) -> str:
    v = encode_value(x)
    if v is None:
        return ""
    return v if isinstance(v, str) else repr(v)


def read_report_csv(path_or_text: str) -> list[dict]:
    """Parse CSV produced by ``write_report``; scores come back as floats."""
    if "\n" in path_or_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {"id": row["id"]}
        rec.update({k: decode_value(row[k]) for k in _SCORE_COLUMNS})
        rec["settings"] = json.loads(row["settings"])
        out.append(rec)
    return out


def read_score_table(path: str | os.PathLike, id_column: str = "id") -> ScoreTable:
    """Read a wide score CSV (header = metric names, one row per utterance).

    An ``id`` column is used for row labels when present, otherwise rows are
    numbered. Empty cells are treated as missing (NaN).
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = [r for r in reader if any(c.strip() for c in r)]
    except OSError as exc:
        raise IoFailure(f"cannot read score table {path}: {exc.strerror or exc}") from exc
    if not header:
        raise EmptyManifest(f"score table {path} is empty")
    header = [h.strip() for h in header]
    id_idx = header.index(id_column) if id_column in header else None
    names = [h for i, h in enumerate(header) if i != id_idx]
    ids = []
    cols: dict[str, list[float]] = {n: [] for n in names}
    for n_row, row in enumerate(rows):
        row = row + [""] * (len(header) - len(row))
        ids.append(row[id_idx].strip() if id_idx is not None else str(n_row))
        for i, h in enumerate(header):
            if i == id_idx:
                continue
            try:
                cols[h].append(decode_value(row[i]))
            except ValueError as exc:
                raise InvalidValue(f"non-numeric value {row[i]!r} in column {h!r}") from exc
    return ScoreTable(ids, names, {n: np.asarray(v, dtype=np.float64) for n, v in cols.items()})


def score_table_from_records(ids: Iterable[str], records: Iterable[dict]) -> ScoreTable:
    ids = list(ids)
    records = list(records)
    names = list(records[0].keys()) if records else []
    for rec in records:
        if list(rec.keys()) != names:
            raise MissingColumn("every row must carry the same metric names")
    values = {n: np.array([float(r[n]) for r in records], dtype=np.float64) for n in names}
    return ScoreTable(ids, names, values)
