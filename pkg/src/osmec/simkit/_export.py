from __future__ import annotations

import csv
from typing import TYPE_CHECKING, Any

from osmec.util import ExportFormat, IoError, pdebug

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from pathlib import Path

    from osmec.simkit._metrics import HistogramBin, MetricsReport

INSTANTIATION_COLUMNS = ("request_id", "instance_id", "template_id", "mode", "duration")
COMPUTE_COLUMNS = (
    "request_id",
    "instance_id",
    "service_name",
    "served_from",
    "size_mb",
    "cpu_work",
    "compute_time",
    "transmission_time",
)
VIDEO_COLUMNS = ("size_mb", "edge_tx", "cloud_tx", "edge_compute", "cloud_compute")
USAGE_COLUMNS = ("t", "node", "cpu", "memory")
HISTOGRAM_COLUMNS = ("group", "bin_lo", "bin_hi", "count")


def _cell(value: Any) -> str:
    # repr keeps floats round-trippable and identical across platforms
    return repr(value) if isinstance(value, float) else str(value)


def _write(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    try:
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows([_cell(v) for v in row] for row in rows)
    except OSError as ose:
        msg = f"could not write `{path}`: {ose.strerror or ose}"
        raise IoError(msg) from ose
    pdebug(f"export: wrote {path}")
    return path


def _bins(bins: Iterable[HistogramBin]) -> list[tuple[Any, ...]]:
    return [(b.group, b.lo, b.hi, b.count) for b in bins]


def export_report(report: MetricsReport, out_dir: Path, fmt: ExportFormat = ExportFormat.CSV) -> list[Path]:
    """Write the report's tables; tables without samples still get their header row.

    `csv` writes the per-sample tables with each histogram next to its samples; `histogram-csv` writes only
    the histograms.
    """

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as ose:
        msg = f"could not create `{out_dir}`: {ose.strerror or ose}"
        raise IoError(msg) from ose

    def instantiation_hist() -> Path:
        return _write(out_dir / "instantiation_hist.csv", HISTOGRAM_COLUMNS, _bins(report.instantiation_histogram()))

    def compute_hist() -> Path:
        return _write(out_dir / "compute_hist.csv", HISTOGRAM_COLUMNS, _bins(report.compute_histogram()))

    if fmt is ExportFormat.HISTOGRAM_CSV:
        return [instantiation_hist(), compute_hist()]

    return [
        _write(
            out_dir / "instantiation.csv",
            INSTANTIATION_COLUMNS,
            [(s.request_id, s.instance_id, s.template_id, s.mode, s.duration) for s in report.instantiation],
        ),
        instantiation_hist(),
        _write(
            out_dir / "compute.csv",
            COMPUTE_COLUMNS,
            [
                (
                    s.request_id,
                    s.instance_id,
                    s.service_name,
                    s.served_from,
                    s.size_mb,
                    s.cpu_work,
                    s.compute_time,
                    s.transmission_time,
                )
                for s in report.compute
            ],
        ),
        compute_hist(),
        _write(
            out_dir / "video.csv",
            VIDEO_COLUMNS,
            [(r.size_mb, r.edge_tx, r.cloud_tx, r.edge_compute, r.cloud_compute) for r in report.video],
        ),
        _write(out_dir / "usage.csv", USAGE_COLUMNS, [(p.t, p.node, p.cpu, p.memory) for p in report.usage]),
    ]
