"""Readers and writers for the dataset toolkit's on-disk formats.

This package talks to the dataset builder purely through files, so the
formats are implemented here from their published definitions:

* RIMG1 images: magic ``RIMG``, version byte 0x01, height and width as
  little-endian u32, then height*width little-endian float32 pixels,
  row-major.
* Curve CSVs: header ``index,value``, one row per step, 17 significant
  digits.
* Dataset manifests: JSON with schema field ``"rnet-manifest": 1``.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

RIMG_MAGIC = b"RIMG"
RIMG_VERSION = 1
_HEADER_LEN = len(RIMG_MAGIC) + 1 + 8

MANIFEST_SCHEMA = 1


class FormatError(ValueError):
    """A file does not match its declared layout."""


def read_rimg(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER_LEN or data[:4] != RIMG_MAGIC or data[4] != RIMG_VERSION:
        raise FormatError(f"not an RIMG1 file: {path}")
    height, width = struct.unpack_from("<II", data, 5)
    if len(data) != _HEADER_LEN + 4 * height * width:
        raise FormatError(f"RIMG payload size mismatch: {path}")
    pixels = np.frombuffer(data, dtype="<f4", offset=_HEADER_LEN)
    return pixels.reshape(height, width).copy()


def write_rimg(pixels: np.ndarray, path) -> None:
    pixels = np.asarray(pixels, dtype=np.float32)
    if pixels.ndim != 2:
        raise FormatError(f"expected a 2-D array, got shape {pixels.shape}")
    header = RIMG_MAGIC + bytes([RIMG_VERSION]) + struct.pack("<II", *pixels.shape)
    Path(path).write_bytes(header + np.ascontiguousarray(pixels, dtype="<f4").tobytes())


def read_curve_csv(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        if fh.readline().strip() != "index,value":
            raise FormatError(f"bad curve CSV header: {path}")
        for line in fh:
            line = line.strip()
            if line:
                values.append(float(line.split(",")[1]))
    return np.asarray(values, dtype=np.float64)


def write_curve_csv(values, path) -> None:
    lines = ["index,value\n"]
    lines.extend(f"{i},{v:.17g}\n" for i, v in enumerate(np.asarray(values, dtype=np.float64)))
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


@dataclass(frozen=True)
class ManifestEntry:
    entry_id: str
    topology: str
    k_avg: float
    instance_index: int
    seed: int
    role: str
    attack: dict
    curve_kind: str
    mask: dict | None
    image_path: str
    curve_path: str

    @property
    def mask_kind(self) -> str:
        return self.mask["kind"] if self.mask else ""

    @property
    def mask_size(self) -> int:
        return int(self.mask["size"]) if self.mask else 0


@dataclass
class Manifest:
    experiment: str
    master_seed: int
    n: int
    entries: list[ManifestEntry]
    base_dir: Path

    def resolve(self, rel_path: str) -> Path:
        return self.base_dir / rel_path

    def with_role(self, role: str | None) -> list[ManifestEntry]:
        return [e for e in self.entries if role is None or e.role == role]


def load_manifest(path) -> Manifest:
    path = Path(path)
    obj = json.loads(path.read_text())
    if obj.get("rnet-manifest") != MANIFEST_SCHEMA:
        raise FormatError(f"unsupported manifest schema: {path}")
    entries = [
        ManifestEntry(
            entry_id=e["entry_id"],
            topology=e["topology"],
            k_avg=float(e["k_avg"]),
            instance_index=int(e["instance_index"]),
            seed=int(e["seed"]),
            role=e["role"],
            attack=e["attack"],
            curve_kind=e["curve_kind"],
            mask=e["mask"],
            image_path=e["image_path"],
            curve_path=e["curve_path"],
        )
        for e in obj["entries"]
    ]
    return Manifest(
        experiment=obj["experiment"],
        master_seed=int(obj["master_seed"]),
        n=int(obj["n"]),
        entries=entries,
        base_dir=path.parent,
    )


def manifest_digest(path) -> str:
    """Content hash of a manifest file, recorded in model metadata."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
