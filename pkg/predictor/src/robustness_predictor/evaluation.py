"""Prediction evaluation: per-entry errors in the toolkit's report schema.

The error report CSV written here matches the evaluation toolkit's
expected input schema column for column, so its sweep and difference-table
commands can consume these files directly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import torch

from .formats import Manifest, ManifestEntry, read_curve_csv, read_rimg, write_curve_csv
from .model import PredictorModel, predict_batch

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


def _predictions(model: PredictorModel, manifest: Manifest, entries: list[ManifestEntry]):
    n = manifest.n
    images = np.empty((len(entries), 1, n, n), dtype=np.float32)
    for i, entry in enumerate(entries):
        images[i, 0] = read_rimg(manifest.resolve(entry.image_path))
    return predict_batch(model, torch.from_numpy(images)).numpy().astype(np.float64)


def predict_to_dir(model: PredictorModel, manifest: Manifest, pred_dir, role: str | None = None) -> int:
    """Write one predicted-curve CSV per entry; returns the entry count."""
    entries = manifest.with_role(role)
    pred_dir = Path(pred_dir)
    pred_dir.mkdir(parents=True, exist_ok=True)
    predictions = _predictions(model, manifest, entries)
    for entry, curve in zip(entries, predictions):
        write_curve_csv(curve, pred_dir / f"{entry.entry_id}.csv")
    return len(entries)


def error_rows(model: PredictorModel, manifest: Manifest, role: str | None = "test") -> list[dict]:
    """Per-entry MAE of the clamped prediction against the true curve.

    Predictions run on each entry's (possibly masked) image; the truth is
    always the stored curve of the intact network.
    """
    entries = manifest.with_role(role)
    if not entries:
        raise ValueError(f"manifest has no entries with role {role!r}")
    predictions = _predictions(model, manifest, entries)
    rows = []
    for entry, curve in zip(entries, predictions):
        truth = read_curve_csv(manifest.resolve(entry.curve_path))
        mask = entry.mask or {}
        rows.append(
            {
                "entry_id": entry.entry_id,
                "topology": entry.topology,
                "k_avg": entry.k_avg,
                "instance_index": entry.instance_index,
                "attack_strategy": entry.attack["strategy"],
                "attack_mode": entry.attack["mode"],
                "curve_kind": entry.curve_kind,
                "role": entry.role,
                "mask_kind": mask.get("kind", ""),
                "mask_size": int(mask.get("size", 0)),
                "mask_row": int(mask.get("row", 0)),
                "mask_col": int(mask.get("col", 0)),
                "mae": float(np.mean(np.abs(curve - truth))),
            }
        )
    return rows


def write_error_report(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ERROR_REPORT_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r["entry_id"],
                    r["topology"],
                    f"{r['k_avg']:g}",
                    r["instance_index"],
                    r["attack_strategy"],
                    r["attack_mode"],
                    r["curve_kind"],
                    r["role"],
                    r["mask_kind"],
                    r["mask_size"],
                    r["mask_row"],
                    r["mask_col"],
                    f"{r['mae']:.17g}",
                ]
            )


def mean_mae(rows: list[dict], **match) -> float:
    """Average MAE over the rows whose fields equal every ``match`` value."""
    selected = [r["mae"] for r in rows if all(r[k] == v for k, v in match.items())]
    if not selected:
        raise ValueError(f"no rows match {match}")
    return float(np.mean(selected))
