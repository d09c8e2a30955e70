"""Command-line entry point: directory scanning, fusion, report emission.

Scan usage keeps the four-positional contract::

    stegofuse <directory> [speed] [threshold] [csv file]

``speed`` is ``standard`` or ``fast`` (default standard); a missing,
non-numeric or out-of-range threshold (or the literal token ``default``)
falls back to 0.2 with a note on stderr; naming a csv file switches from
the console report to the full CSV report. Subcommands ``embed``, ``pool``
and ``bench`` expose the embedder and evaluation tooling.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence, TextIO

import numpy as np

from . import evaluation
from .detectors import REPORT_ORDER, DetectorId, run_all_detectors
from .embedder import Distribution, EmbedSpec, PoolManifest, generate_pool, lsb_embed
from .fusion import (
    DEFAULT_THRESHOLD,
    FusionConfig,
    FusionMode,
    FusionTrace,
    fast_fusion,
    quantify_payload,
    standard_fusion,
)
from .images import DecodeError, ImageFormat, decode_image, save_image, scan_directory

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_DIRECTORY = 2
EXIT_NO_IMAGES = 3
EXIT_WRITE_FAILURE = 4

FULL_REPORT_HEADER = (
    "file name",
    "classification",
    "quantitative steganalysis",
    "primary sets",
    "chi square",
    "sample pairs",
    "rs analysis",
    "fusion",
)


class MissingDirectory(Exception):
    """No directory argument was given."""


class ReportWriteError(Exception):
    """Writing the full report failed; the run must stop."""


@dataclass(frozen=True)
class CliArgs:
    directory: str
    mode: FusionMode = FusionMode.STANDARD
    threshold: float = DEFAULT_THRESHOLD
    csv_file: str | None = None


@dataclass(frozen=True)
class ReportRow:
    file_name: str
    classification: str  # "stego" | "clean" | "indeterminate"
    payload_estimate: int | None
    primary_sets: float | None
    chi_square: float | None
    sample_pairs: float | None
    rs_analysis: float | None
    fusion: float | None
    lossy_source: bool = False


@dataclass(frozen=True)
class PipelineResult:
    exit_code: int
    rows: tuple[ReportRow, ...]


def parse_args(argv: Sequence[str], stderr: TextIO | None = None) -> CliArgs:
    """Parse the positional scan arguments, forgiving by design.

    Bad values for the optional arguments fall back to defaults with a note
    on stderr; only a completely empty argv raises MissingDirectory.
    """
    err = stderr or sys.stderr
    if not argv:
        raise MissingDirectory("a directory to analyse is required")
    directory = argv[0]
    mode = FusionMode.STANDARD
    if len(argv) > 1:
        token = argv[1].strip().lower()
        if token == "fast":
            mode = FusionMode.FAST
        elif token != "standard":
            print(f"note: unrecognized speed mode {argv[1]!r}; using standard", file=err)
    threshold = DEFAULT_THRESHOLD
    if len(argv) > 2:
        token = argv[2].strip().lower()
        if token != "default":
            try:
                value = float(token)
            except ValueError:
                value = None
                print(
                    f"note: threshold {argv[2]!r} is not numeric; using {DEFAULT_THRESHOLD}",
                    file=err,
                )
            if value is not None:
                if 0.0 <= value <= 1.0:
                    threshold = value
                else:
                    print(
                        f"note: threshold {argv[2]!r} out of [0, 1]; using {DEFAULT_THRESHOLD}",
                        file=err,
                    )
    csv_file = argv[3] if len(argv) > 3 else None
    if len(argv) > 4:
        print(f"note: ignoring extra arguments {list(argv[4:])!r}", file=err)
    return CliArgs(directory=directory, mode=mode, threshold=threshold, csv_file=csv_file)


def _analyse_image(img, config: FusionConfig) -> FusionTrace:
    if config.mode is FusionMode.FAST:
        return fast_fusion(img, config.threshold)
    return standard_fusion(run_all_detectors(img), config.threshold)


def _row_from_trace(name: str, trace: FusionTrace, file_size: int, lossy: bool) -> ReportRow:
    scores = {detector_id: trace.score_of(detector_id) for detector_id in REPORT_ORDER}
    fusion_score = trace.fusion_score
    payload = None
    if fusion_score is not None:
        payload = quantify_payload(fusion_score, file_size)
    return ReportRow(
        file_name=name,
        classification=trace.verdict.value,
        payload_estimate=payload,
        primary_sets=scores[DetectorId.PRIMARY_SETS],
        chi_square=scores[DetectorId.CHI_SQUARE],
        sample_pairs=scores[DetectorId.SAMPLE_PAIRS],
        rs_analysis=scores[DetectorId.RS],
        fusion=fusion_score,
        lossy_source=lossy,
    )


def _fmt_score(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_full_report_header(sink: TextIO) -> None:
    try:
        csv.writer(sink, lineterminator="\n").writerow(FULL_REPORT_HEADER)
        sink.flush()
    except OSError as exc:
        raise ReportWriteError(str(exc)) from exc


def write_full_report_row(row: ReportRow, sink: TextIO) -> None:
    """Append one CSV record and flush, so a crash loses at most one file."""
    record = [
        row.file_name,
        row.classification,
        "" if row.payload_estimate is None else str(row.payload_estimate),
        _fmt_score(row.primary_sets),
        _fmt_score(row.chi_square),
        _fmt_score(row.sample_pairs),
        _fmt_score(row.rs_analysis),
        _fmt_score(row.fusion),
    ]
    try:
        csv.writer(sink, lineterminator="\n").writerow(record)
        sink.flush()
    except OSError as exc:
        raise ReportWriteError(str(exc)) from exc


def _print_standard_row(row: ReportRow, out: TextIO) -> None:
    marker = " [lossy source]" if row.lossy_source else ""
    if row.classification == "stego":
        print(f"{row.file_name}: stego, estimated payload {row.payload_estimate} bytes{marker}", file=out)
    elif row.classification == "indeterminate":
        print(f"{row.file_name}: warning, indeterminate (all detectors failed){marker}", file=out)


def _iter_rows(
    targets,
    config: FusionConfig,
    workers: int,
    err: TextIO,
) -> Iterator[ReportRow]:
    def analyse(target) -> tuple[ReportRow | None, str | None]:
        try:
            img = decode_image(target.path)
        except DecodeError as exc:
            return None, f"warning: skipping {target.path.name}: {exc}"
        warning = None
        if img.lossy_source:
            warning = (
                f"warning: {target.path.name} comes from a lossy format; "
                "the detectors are not designed for it"
            )
        trace = _analyse_image(img, config)
        return _row_from_trace(target.path.name, trace, img.file_size, img.lossy_source), warning

    if workers > 1:
        executor = ThreadPoolExecutor(max_workers=workers)
        results = executor.map(analyse, targets)
    else:
        executor = None
        results = map(analyse, targets)
    try:
        for row, warning in results:  # ordered like the scan, whatever the pool does
            if warning:
                print(warning, file=err)
            if row is not None:
                yield row
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)


def run_pipeline(
    args: CliArgs,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
    workers: int = 1,
) -> PipelineResult:
    """Scan, analyse and report one directory; returns exit code and rows."""
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: {args.directory} is not a directory", file=err)
        return PipelineResult(EXIT_NO_DIRECTORY, ())
    targets = [t for t in scan_directory(directory) if t.format is not ImageFormat.NON_IMAGE]
    config = FusionConfig(mode=args.mode, threshold=args.threshold)

    rows: list[ReportRow] = []
    sink = None
    try:
        if args.csv_file is not None:
            sink = open(args.csv_file, "w", encoding="utf-8", newline="")
            write_full_report_header(sink)
        for row in _iter_rows(targets, config, workers, err):
            rows.append(row)
            if sink is not None:
                write_full_report_row(row, sink)
            else:
                _print_standard_row(row, out)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=err)
        return PipelineResult(EXIT_WRITE_FAILURE, tuple(rows))
    except ReportWriteError as exc:
        print(f"error: cannot write report: {exc}", file=err)
        return PipelineResult(EXIT_WRITE_FAILURE, tuple(rows))
    finally:
        if sink is not None:
            sink.close()

    if not rows:
        print(f"no processable images in {args.directory}", file=err)
        return PipelineResult(EXIT_NO_IMAGES, ())
    stego = sum(1 for r in rows if r.classification == "stego")
    print(f"analysed {len(rows)} images, {stego} classified stego", file=err)
    return PipelineResult(EXIT_OK, tuple(rows))


# ---------------------------------------------------------------------------
# Subcommands: embed / pool / bench
# ---------------------------------------------------------------------------

SUBCOMMANDS = ("embed", "pool", "bench")


def _cmd_embed(argv: Sequence[str], err: TextIO) -> int:
    parser = argparse.ArgumentParser(prog="stegofuse embed", description="LSB-embed a payload into a cover image")
    parser.add_argument("cover", help="cover image (PNG or BMP)")
    parser.add_argument("output", help="output PNG path")
    parser.add_argument("--rate", type=float, default=0.5, help="fraction of LSB capacity to fill")
    parser.add_argument("--distribution", choices=[d.value for d in Distribution], default="pseudorandom")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--payload-file", help="payload bytes; defaults to seeded random bytes at the rate")
    ns = parser.parse_args(argv)

    img = decode_image(ns.cover)
    if ns.payload_file:
        payload = Path(ns.payload_file).read_bytes()
    else:
        payload = np.random.default_rng(ns.seed).bytes(int(ns.rate * img.capacity_bits) // 8)
    spec = EmbedSpec(
        distribution=Distribution(ns.distribution),
        payload=payload,
        target_rate=ns.rate,
        seed=ns.seed,
    )
    save_image(lsb_embed(img, spec), ns.output)
    print(f"embedded {len(payload)} bytes into {ns.output}", file=err)
    return EXIT_OK


def _cmd_pool(argv: Sequence[str], err: TextIO) -> int:
    parser = argparse.ArgumentParser(prog="stegofuse pool", description="Generate a labelled stego/clean test pool")
    parser.add_argument("covers", help="directory of lossless cover images")
    parser.add_argument("output", help="output pool directory")
    parser.add_argument("--stego-fraction", type=float, default=0.25)
    parser.add_argument("--rates", default="0.1,0.25,0.5,1.0", help="comma-separated embedding rates")
    parser.add_argument(
        "--distributions",
        default="sequential,pseudorandom,equidistributed",
        help="comma-separated distribution names",
    )
    parser.add_argument("--seed", type=int, default=0)
    ns = parser.parse_args(argv)

    rates = [float(token) for token in ns.rates.split(",") if token]
    dists = [Distribution(token.strip()) for token in ns.distributions.split(",") if token]
    manifest = generate_pool(ns.covers, ns.output, ns.stego_fraction, rates, dists, ns.seed)
    print(
        f"wrote {len(manifest.rows)} files ({len(manifest.stego_rows)} stego) to {ns.output}",
        file=err,
    )
    return EXIT_OK


def _cmd_bench(argv: Sequence[str], err: TextIO) -> int:
    parser = argparse.ArgumentParser(prog="stegofuse bench", description="Detector/fusion benchmark over a pool")
    parser.add_argument("pool", help="pool directory (manifest.csv enables accuracy tables)")
    parser.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    parser.add_argument("--trials", type=int, default=3)
    parser.add_argument("--out-dir", default=".", help="where the CSV tables go")
    ns = parser.parse_args(argv)

    pool_dir = Path(ns.pool)
    out_dir = Path(ns.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    report = evaluation.speed_benchmark(pool_dir, ns.threshold, ns.trials)
    evaluation.write_speed_csv(report, out_dir / "speed_table.csv")
    print(f"speed table -> {out_dir / 'speed_table.csv'}", file=err)

    manifest_path = pool_dir / "manifest.csv"
    if manifest_path.exists():
        manifest = PoolManifest.load(manifest_path)
        labelled = []
        fused = []
        for row in manifest.rows:
            img = decode_image(pool_dir / row.path)
            outcomes = run_all_detectors(img)
            labelled.append((row.label == "stego", outcomes))
            trace = standard_fusion(outcomes, ns.threshold)
            if trace.fusion_score is not None:
                fused.append((trace.fusion_score, row.label == "stego"))
        evaluation.write_auc_table_csv(
            evaluation.compare_fusion_rules(labelled), out_dir / "auc_table.csv"
        )
        curve = evaluation.roc_curve(fused)
        evaluation.write_roc_csv(curve, out_dir / "roc_points.csv")
        table = evaluation.threshold_table(fused, [i / 20 for i in range(21)])
        evaluation.write_threshold_table_csv(table, out_dir / "threshold_table.csv")
        print(
            f"standard-fusion AUC {curve.auc:.4f}; tables -> {out_dir}",
            file=err,
        )
    else:
        print("no manifest.csv: skipped accuracy tables", file=err)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out, err = sys.stdout, sys.stderr

    workers = 1
    remaining = []
    for token in argv:
        if token.startswith("--workers"):
            try:
                workers = int(token.split("=", 1)[1])
            except (IndexError, ValueError):
                print(f"note: expected --workers=N, got {token!r}; staying single-worker", file=err)
            continue
        remaining.append(token)
    argv = remaining

    if argv and argv[0] in SUBCOMMANDS:
        command = {"embed": _cmd_embed, "pool": _cmd_pool, "bench": _cmd_bench}[argv[0]]
        return command(argv[1:], err)

    try:
        args = parse_args(argv, stderr=err)
    except MissingDirectory:
        print("usage: stegofuse <directory> [speed] [threshold] [csv file]", file=err)
        print("       stegofuse {embed|pool|bench} --help", file=err)
        return EXIT_USAGE
    return run_pipeline(args, stdout=out, stderr=err, workers=max(1, workers)).exit_code


if __name__ == "__main__":
    raise SystemExit(main())
