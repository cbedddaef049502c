"""Square information-loss masks over adjacency images.

Mask coordinates are 1-based (row, col) for the upper-left corner, and the
admissible corner range for an S-sized mask on an n-sized image is
[1, n-S] in each axis, so a mask never touches the last row or column.
The underlying pixel array stays 0-indexed; the row-1/col-1 conversion is
confined to :func:`apply_mask`.

A null mask overwrites the square with 0.0, making hidden edges look
absent; a confusion mask overwrites it with 0.5, marking the square as
unknown. One mask per image; masks never stack.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .graph import GrayImage
from .rng import Rng

MASK_KINDS = ("null", "confusion")

FILL_BY_KIND = {"null": 0.0, "confusion": 0.5}


@dataclass(frozen=True)
class MaskSpec:
    """One information-loss event: kind, side length, 1-based corner."""

    kind: str
    size: int
    row: int
    col: int

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.lower())
        if self.kind not in MASK_KINDS:
            raise ValidationError(f"unknown mask kind {self.kind!r}; expected one of {MASK_KINDS}")
        if self.size < 1:
            raise ValidationError(f"mask size must be >= 1, got {self.size}")
        if self.row < 1 or self.col < 1:
            raise ValidationError(f"mask position is 1-based; got ({self.row}, {self.col})")

    @property
    def fill(self) -> float:
        return FILL_BY_KIND[self.kind]

    def to_json(self) -> dict:
        return {"kind": self.kind, "size": self.size, "row": self.row, "col": self.col}

    @classmethod
    def from_json(cls, obj: dict) -> "MaskSpec":
        return cls(kind=obj["kind"], size=int(obj["size"]), row=int(obj["row"]), col=int(obj["col"]))


def sample_mask_position(n: int, s: int, rng: Rng) -> tuple[int, int]:
    """Uniform 1-based corner (row, col), each coordinate in [1, n-s]."""
    if s < 1:
        raise ValidationError(f"mask size must be >= 1, got {s}")
    if s >= n:
        raise ValidationError(f"mask size {s} does not fit in an image of side {n}")
    return rng.integer(1, n - s), rng.integer(1, n - s)


def apply_mask(img: GrayImage, m: MaskSpec) -> GrayImage:
    """Return a copy of ``img`` with the masked square set to ``m.fill``."""
    if img.height != img.width:
        raise ValidationError(f"mask requires a square image, got {img.height}x{img.width}")
    n = img.height
    if m.row > n - m.size or m.col > n - m.size:
        raise ValidationError(
            f"mask of size {m.size} at ({m.row}, {m.col}) exceeds the [1, {n - m.size}] corner range"
        )
    pixels = img.pixels.copy()
    r0, c0 = m.row - 1, m.col - 1
    pixels[r0 : r0 + m.size, c0 : c0 + m.size] = m.fill
    return GrayImage(pixels)


def pixel_loss_ratio(n: int, s: int) -> float:
    """Fraction of adjacency entries hidden by an s-sized mask: s**2 / n**2."""
    if not 0 <= s <= n:
        raise ValidationError(f"mask size {s} outside [0, {n}]")
    return (s * s) / (n * n)
