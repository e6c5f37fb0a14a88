"""Command-line entry point: ``gompsnr {score,batch,loss,corr,selfcheck}``.

Exit codes: 0 success, 2 bad input, 3 computation failure, 4 I/O failure.
Expected failures print a JSON error object on stderr, never a traceback.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .errors import INPUT, GompsnrError, InvalidConfig, IoFailure, SelfCheckFailed
from .losses import DISTANCES, LOSS_KINDS, compute_loss
from .metrics import aggregate, score_pair
from .selfcheck import run_selfcheck
from .signal_io import align_pair, encode_value, load_waveform, read_manifest, read_score_table, write_report
from .stats import correlation_matrix
from .stft import StftConfig, stft, to_mag_phase

log = logging.getLogger("gompsnr")


def _stft_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("analysis")
    g.add_argument("--window-size", type=int, default=1024, help="STFT window in samples (default 1024)")
    g.add_argument("--hop-size", type=int, default=256, help="STFT hop in samples (default 256)")
    g.add_argument("--center", dest="center", action="store_true", default=True, help="reflect-pad by half a window (default)")
    g.add_argument("--no-center", dest="center", action="store_false", help="disable centering")
    g.add_argument("--eps", type=float, default=1e-12, help="relative denominator guard for +inf scores")
    g.add_argument("--align", choices=("strict", "truncate"), default="strict")
    g.add_argument("--channel-policy", choices=("error", "downmix"), default="error")


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default=None, help="write to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gompsnr", description="Phase-aware SNR metrics and omnidirectional phase losses.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one reference/estimate pair")
    p.add_argument("ref")
    p.add_argument("est")
    _stft_args(p)
    _output_args(p)

    p = sub.add_parser("batch", help="score every pair listed in an id,ref_path,est_path manifest")
    p.add_argument("manifest")
    _stft_args(p)
    _output_args(p)
    p.add_argument("--aggregate", choices=("mean-db", "pooled"), default="mean-db")
    p.add_argument("--jobs", "-j", type=int, default=1)

    p = sub.add_parser("loss", help="evaluate a loss between two files")
    p.add_argument("ref")
    p.add_argument("est")
    p.add_argument("--kind", choices=LOSS_KINDS, required=True)
    p.add_argument("--distance", choices=DISTANCES, default="l1")
    p.add_argument("--grad", action="store_true", help="also report gradient statistics")
    _stft_args(p)
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("corr", help="PCC/SRCC matrix between columns of a wide score CSV")
    p.add_argument("scores")
    p.add_argument("--metrics", default=None, help="comma-separated column names (default: all)")
    _output_args(p)

    p = sub.add_parser("selfcheck", help="run the embedded invariant suite")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _config(args) -> StftConfig:
    return StftConfig(window_size=args.window_size, hop_size=args.hop_size, center=args.center)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _score_one(job):
    pair_id, ref_path, est_path, cfg, eps, align, channel_policy = job
    try:
        ref = load_waveform(ref_path, channel_policy)
        est = load_waveform(est_path, channel_policy)
        return score_pair(ref, est, cfg, eps=eps, align=align, pair_id=pair_id)
    except GompsnrError as exc:
        exc.pair_id = pair_id
        return exc.to_dict()


def cmd_score(args) -> int:
    cfg = _config(args)
    ref = load_waveform(args.ref, args.channel_policy)
    est = load_waveform(args.est, args.channel_policy)
    report = score_pair(ref, est, cfg, eps=args.eps, align=args.align, pair_id=args.est)
    _emit(write_report([report], args.format), args.output)
    return 0


def _summary(reports, n_pairs, errors, mode, eps) -> dict:
    agg = aggregate(reports, mode, eps)
    return {
        "aggregation": mode,
        "n_pairs": n_pairs,
        "n_scored": len(reports),
        "n_failed": len(errors),
        "metrics": {k: {**v, "value": encode_value(v["value"])} for k, v in agg.items()},
    }


def cmd_batch(args) -> int:
    if args.jobs < 1:
        raise InvalidConfig("--jobs must be at least 1")
    cfg = _config(args)
    entries = read_manifest(args.manifest)
    jobs = [(e.id, e.ref_path, e.est_path, cfg, args.eps, args.align, args.channel_policy) for e in entries]
    if args.jobs == 1:
        results = [_score_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_score_one, jobs))
    reports = [r for r in results if not isinstance(r, dict)]
    errors = [r for r in results if isinstance(r, dict)]
    mode = args.aggregate.replace("-", "_")
    summary = _summary(reports, len(entries), errors, mode, args.eps)
    if args.format == "json":
        records = json.loads(write_report(reports, "json")) if reports else []
        _emit(_json({"reports": records, "errors": errors, "summary": summary}), args.output)
    else:
        table = write_report(reports, "csv") if reports else "id,snr_time_db,snr_tf_db,ompsnr_db,gompsnr_db,settings\n"
        _emit(table, args.output)
        side = _json({"errors": errors, "summary": summary})
        if args.output is None:
            sys.stderr.write(side)
        else:
            _emit(side, args.output + ".summary.json")
    return 0


def _grad_stats(g: np.ndarray) -> dict:
    return {"min": float(g.min()), "max": float(g.max()), "norm": float(np.linalg.norm(g))}


def cmd_loss(args) -> int:
    cfg = _config(args)
    ref = load_waveform(args.ref, args.channel_policy)
    est = load_waveform(args.est, args.channel_policy)
    ref, est = align_pair(ref, est, args.align, min_length=cfg.window_size)
    mp_ref = to_mag_phase(stft(ref, cfg))
    mp_est = to_mag_phase(stft(est, cfg))
    res = compute_loss(args.kind, mp_ref.mag, mp_ref.phase, mp_est.mag, mp_est.phase, args.distance, grad=args.grad)
    out = {"kind": args.kind, "distance": args.distance if args.kind in ("ori", "cori") else None, "value": res.value}
    if args.grad:
        out["grad"] = {"mag_est": _grad_stats(res.grad_mag_est), "phase_est": _grad_stats(res.grad_phase_est)}
    out["settings"] = cfg.to_dict()
    _emit(_json(out), args.output)
    return 0


def cmd_corr(args) -> int:
    table = read_score_table(args.scores)
    targets = [m.strip() for m in args.metrics.split(",") if m.strip()] if args.metrics else None
    cm = correlation_matrix(table, targets)
    if args.format == "json":
        _emit(_json(cm.to_dict()), args.output)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("metric_a", "metric_b", "pcc", "srcc"))
        for a, b, p, s in cm.long_rows():
            w.writerow((a, b, repr(p), repr(s)))
        _emit(buf.getvalue(), args.output)
    return 0


def cmd_selfcheck(args) -> int:
    ok, lines = run_selfcheck(args.seed)
    for line in lines:
        print(line)
    if not ok:
        raise SelfCheckFailed("one or more self-check groups failed")
    return 0


COMMANDS = {"score": cmd_score, "batch": cmd_batch, "loss": cmd_loss, "corr": cmd_corr, "selfcheck": cmd_selfcheck}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except GompsnrError as exc:
        sys.stderr.write(json.dumps({"error": exc.to_dict()}) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
