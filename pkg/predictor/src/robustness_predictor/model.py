"""Convolutional curve regressor and its on-disk artifact format.

The network maps an n-by-n single-channel adjacency image to a length-n
curve: 3x3 convolution groups with feature widths doubling from 8, each
followed by 2x2 downsampling, repeated until the spatial side is at most
8, then two fully connected stages. Raw outputs are unbounded; inference
clamps them to [0, 1].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

BASE_WIDTH = 8
MAX_SPATIAL_SIDE = 8
HIDDEN_UNITS = 256


def conv_widths(input_side: int) -> list[int]:
    """Feature widths of the convolution groups for a given image side."""
    widths = []
    side = input_side
    width = BASE_WIDTH
    while side > MAX_SPATIAL_SIDE:
        widths.append(width)
        width *= 2
        side //= 2
    return widths


class CurveRegressor(nn.Module):
    def __init__(self, input_side: int):
        super().__init__()
        if input_side < 2:
            raise ValueError(f"input side must be >= 2, got {input_side}")
        layers: list[nn.Module] = []
        channels = 1
        side = input_side
        for width in conv_widths(input_side):
            layers += [nn.Conv2d(channels, width, kernel_size=3, padding=1), nn.ReLU()]
            layers.append(nn.MaxPool2d(2))
            channels = width
            side //= 2
        self.features = nn.Sequential(*layers)
        self.head = nn.Sequential(
            nn.Flatten(),
            nn.Linear(channels * side * side, HIDDEN_UNITS),
            nn.ReLU(),
            nn.Linear(HIDDEN_UNITS, input_side),
        )
        self.input_side = input_side

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.features(x))


@dataclass
class PredictorModel:
    """Trained regressor plus the metadata that pins its provenance."""

    network: CurveRegressor
    n: int
    metadata: dict = field(default_factory=dict)

    def architecture(self) -> dict:
        return {
            "kind": "conv-stack-regressor",
            "input_side": self.n,
            "conv_widths": conv_widths(self.n),
            "hidden_units": HIDDEN_UNITS,
            "output_length": self.n,
        }


def predict(model: PredictorModel, image: np.ndarray) -> np.ndarray:
    """Length-n curve for one n-by-n image, clamped to [0, 1]."""
    image = np.asarray(image, dtype=np.float32)
    if image.shape != (model.n, model.n):
        raise ValueError(f"expected a {model.n}x{model.n} image, got {image.shape}")
    model.network.eval()
    with torch.no_grad():
        batch = torch.from_numpy(image).reshape(1, 1, model.n, model.n)
        out = model.network(batch).clamp(0.0, 1.0)
    return out.numpy().astype(np.float64).reshape(-1)


def predict_batch(model: PredictorModel, images: torch.Tensor) -> torch.Tensor:
    model.network.eval()
    with torch.no_grad():
        return model.network(images).clamp(0.0, 1.0)


def save_model(model: PredictorModel, path) -> None:
    """Write the weights plus a JSON sidecar describing the artifact."""
    path = Path(path)
    torch.save(model.network.state_dict(), path)
    sidecar = {"architecture": model.architecture(), "metadata": model.metadata}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )


def load_model(path) -> PredictorModel:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    n = int(sidecar["architecture"]["input_side"])
    network = CurveRegressor(n)
    network.load_state_dict(torch.load(path, weights_only=True))
    network.eval()
    return PredictorModel(network=network, n=n, metadata=sidecar["metadata"])
