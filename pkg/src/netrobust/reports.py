"""Per-instance error reports and the analyses built on top of them.

An error report is a CSV with one row per evaluated dataset entry, carrying
the entry's configuration plus the mean absolute error of its predicted
curve against the true curve. These rows are the raw data behind box plots,
threshold sweeps, and null-vs-confusion difference tables.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .attacks import read_curve_values
from .dataset import DatasetManifest
from .errors import ValidationError
from .stats import DiffTable, ThresholdReport, diff_table, mae, threshold_sweep

ERROR_REPORT_COLUMNS = (
    "entry_id",
    "topology",
    "k_avg",
    "instance_index",
    "attack_strategy",
    "attack_mode",
    "curve_kind",
    "role",
    "mask_kind",
    "mask_size",
    "mask_row",
    "mask_col",
    "mae",
)


@dataclass
class ErrorRow:
    """One evaluated entry; unmasked entries carry mask_kind='' and size 0."""

    entry_id: str
    topology: str
    k_avg: float
    instance_index: int
    attack_strategy: str
    attack_mode: str
    curve_kind: str
    role: str
    mask_kind: str
    mask_size: int
    mask_row: int
    mask_col: int
    mae: float

    @property
    def masked(self) -> bool:
        return self.mask_size > 0

    def config_key(self) -> tuple:
        return (self.topology, self.k_avg, self.attack_strategy, self.curve_kind)

    def cell_key(self) -> tuple:
        return (self.topology, self.k_avg, self.attack_strategy, self.curve_kind, self.mask_size)

    def instance_key(self) -> tuple:
        return (self.topology, self.k_avg, self.attack_strategy, self.curve_kind, self.role, self.instance_index)


def prediction_path(pred_dir, entry_id: str) -> Path:
    """Predictions live in one directory, one curve CSV per entry id."""
    return Path(pred_dir) / f"{entry_id}.csv"


def evaluate_predictions(
    manifest: DatasetManifest, pred_dir, role: str | None = "test"
) -> list[ErrorRow]:
    """Score predicted curves in ``pred_dir`` against the manifest's truths.

    Every manifest entry with the requested role must have a prediction
    file; raises otherwise. ``role=None`` evaluates all entries.
    """
    entries = [e for e in manifest.entries if role is None or e.role == role]
    if not entries:
        raise ValidationError(f"manifest has no entries with role {role!r}")
    missing = [e.entry_id for e in entries if not prediction_path(pred_dir, e.entry_id).exists()]
    if missing:
        shown = ", ".join(missing[:5])
        raise ValidationError(
            f"{len(missing)} prediction files missing under {pred_dir} (first: {shown})"
        )
    rows = []
    for e in entries:
        truth = read_curve_values(manifest.resolve(e.curve_path))
        pred = read_curve_values(prediction_path(pred_dir, e.entry_id))
        rows.append(
            ErrorRow(
                entry_id=e.entry_id,
                topology=e.topology,
                k_avg=e.k_avg,
                instance_index=e.instance_index,
                attack_strategy=e.attack.strategy,
                attack_mode=e.attack.mode,
                curve_kind=e.curve_kind,
                role=e.role,
                mask_kind=e.mask.kind if e.mask else "",
                mask_size=e.mask.size if e.mask else 0,
                mask_row=e.mask.row if e.mask else 0,
                mask_col=e.mask.col if e.mask else 0,
                mae=mae(pred, truth),
            )
        )
    return rows


def write_error_report(rows: list[ErrorRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ERROR_REPORT_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.entry_id,
                    r.topology,
                    f"{r.k_avg:g}",
                    r.instance_index,
                    r.attack_strategy,
                    r.attack_mode,
                    r.curve_kind,
                    r.role,
                    r.mask_kind,
                    r.mask_size,
                    r.mask_row,
                    r.mask_col,
                    f"{r.mae:.17g}",
                ]
            )


def read_error_report(path) -> list[ErrorRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ERROR_REPORT_COLUMNS:
            raise ValidationError(f"bad error-report header in {path}: {reader.fieldnames}")
        for rec in reader:
            rows.append(
                ErrorRow(
                    entry_id=rec["entry_id"],
                    topology=rec["topology"],
                    k_avg=float(rec["k_avg"]),
                    instance_index=int(rec["instance_index"]),
                    attack_strategy=rec["attack_strategy"],
                    attack_mode=rec["attack_mode"],
                    curve_kind=rec["curve_kind"],
                    role=rec["role"],
                    mask_kind=rec["mask_kind"],
                    mask_size=int(rec["mask_size"]),
                    mask_row=int(rec["mask_row"]),
                    mask_col=int(rec["mask_col"]),
                    mae=float(rec["mae"]),
                )
            )
    return rows


def config_label(key: tuple) -> str:
    topology, k_avg, strategy, kind = key
    return f"{topology},k{k_avg:g},{strategy},{kind}"


def cell_label(key: tuple) -> str:
    topology, k_avg, strategy, kind, size = key
    return f"{topology},k{k_avg:g},{strategy},{kind},s{size}"


def sweep_reports(rows: list[ErrorRow], alpha: float = 0.05) -> dict[tuple, ThresholdReport]:
    """Run one threshold sweep per configuration group.

    Within each (topology, k_avg, attack, curve kind) group, the unmasked
    rows form the baseline and every positive mask size forms one sample.
    """
    groups: dict[tuple, dict] = {}
    for r in rows:
        bucket = groups.setdefault(r.config_key(), {"baseline": [], "by_size": {}})
        if r.masked:
            bucket["by_size"].setdefault(r.mask_size, []).append(r.mae)
        else:
            bucket["baseline"].append(r.mae)
    if not groups:
        raise ValidationError("no rows to sweep")
    out: dict[tuple, ThresholdReport] = {}
    for key, bucket in sorted(groups.items()):
        if not bucket["baseline"]:
            raise ValidationError(f"group {config_label(key)} has no unmasked baseline rows")
        if not bucket["by_size"]:
            raise ValidationError(f"group {config_label(key)} has no masked rows")
        out[key] = threshold_sweep(bucket["by_size"], bucket["baseline"], alpha=alpha)
    return out


def paired_mae_increase(rows: list[ErrorRow]) -> dict[tuple, float]:
    """Mean per-instance error increase caused by masking, per config cell.

    Pairs each masked row with the unmasked row of the same instance and
    averages (masked MAE - unmasked MAE); this is the box-plot statistic.
    """
    base = {r.instance_key(): r.mae for r in rows if not r.masked}
    sums: dict[tuple, list[float]] = {}
    for r in rows:
        if not r.masked or r.instance_key() not in base:
            continue
        sums.setdefault(r.cell_key(), []).append(r.mae - base[r.instance_key()])
    return {cell: sum(v) / len(v) for cell, v in sorted(sums.items())}


def mean_mae_by_cell(rows: list[ErrorRow], masked_only: bool = True) -> dict[tuple, float]:
    """Average MAE per config cell (cell = config plus mask size)."""
    sums: dict[tuple, list[float]] = {}
    for r in rows:
        if masked_only and not r.masked:
            continue
        sums.setdefault(r.cell_key(), []).append(r.mae)
    return {cell: sum(v) / len(v) for cell, v in sorted(sums.items())}


def diff_report(null_rows: list[ErrorRow], confusion_rows: list[ErrorRow]) -> DiffTable:
    """Null-vs-confusion difference table from two error reports.

    Cells are averaged per configuration; positive entries mean the
    confusion-mask errors were lower.
    """
    null_means = mean_mae_by_cell(null_rows)
    confusion_means = mean_mae_by_cell(confusion_rows)
    return diff_table(null_means, confusion_means)
