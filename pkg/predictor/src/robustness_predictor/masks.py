"""Square information-loss masks over image arrays.

Mirrors the dataset toolkit's published mask semantics so evaluation
pools can be masked without shelling out per image: the corner is 1-based
with admissible range [1, n-size] per axis, a null mask fills with 0.0,
a confusion mask with 0.5. The integration tests cross-check this against
the toolkit CLI's mask command byte for byte.
"""

from __future__ import annotations

import numpy as np

MASK_FILLS = {"null": 0.0, "confusion": 0.5}


def apply_square_mask(pixels: np.ndarray, kind: str, size: int, row: int, col: int) -> np.ndarray:
    """Copy of ``pixels`` with the masked square overwritten by the fill."""
    if kind not in MASK_FILLS:
        raise ValueError(f"unknown mask kind {kind!r}")
    n = pixels.shape[0]
    if pixels.shape != (n, n):
        raise ValueError(f"mask requires a square image, got {pixels.shape}")
    if not 1 <= size < n:
        raise ValueError(f"mask size {size} does not fit in an image of side {n}")
    if not (1 <= row <= n - size and 1 <= col <= n - size):
        raise ValueError(f"corner ({row}, {col}) outside the [1, {n - size}] range")
    out = np.array(pixels, dtype=np.float32, copy=True)
    out[row - 1 : row - 1 + size, col - 1 : col - 1 + size] = MASK_FILLS[kind]
    return out


def sample_corner(n: int, size: int, rng: np.random.Generator) -> tuple[int, int]:
    """Uniform 1-based corner over the admissible [1, n-size] range."""
    if not 1 <= size < n:
        raise ValueError(f"mask size {size} does not fit in an image of side {n}")
    return int(rng.integers(1, n - size + 1)), int(rng.integers(1, n - size + 1))
