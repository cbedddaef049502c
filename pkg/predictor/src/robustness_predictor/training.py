"""Training loop: deterministic, manifest-driven, curve-loss objective."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch

from .formats import Manifest, manifest_digest, read_curve_csv, read_rimg
from .model import CurveRegressor, PredictorModel

logger = logging.getLogger(__name__)

LOSS_MODES = ("verbatim", "squared")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 40
    batch_size: int = 32
    learning_rate: float = 1e-3
    lr_decay_every: int = 0  # epochs between decays; 0 disables the schedule
    lr_decay: float = 0.5
    seed: int = 0
    loss_mode: str = "verbatim"
    deterministic: bool = True

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("epochs, batch size, and learning rate must be positive")
        if self.loss_mode not in LOSS_MODES:
            raise ValueError(f"unknown loss mode {self.loss_mode!r}; expected one of {LOSS_MODES}")


def curve_batch_loss(pred: torch.Tensor, truth: torch.Tensor, mode: str = "verbatim") -> torch.Tensor:
    """Per-step residual norms averaged over the curve, then over the batch.

    For scalar curve entries the norm is the absolute value, so the
    default form is the mean absolute error; ``squared`` averages squared
    residuals instead.
    """
    if mode == "verbatim":
        return (pred - truth).abs().mean()
    if mode == "squared":
        return ((pred - truth) ** 2).mean()
    raise ValueError(f"unknown loss mode {mode!r}")


def load_tensors(manifest: Manifest, role: str | None = "train"):
    """Images and truth curves for the manifest entries with ``role``."""
    entries = manifest.with_role(role)
    if not entries:
        raise ValueError(f"manifest has no entries with role {role!r}")
    n = manifest.n
    images = np.empty((len(entries), 1, n, n), dtype=np.float32)
    targets = np.empty((len(entries), n), dtype=np.float32)
    for i, entry in enumerate(entries):
        image = read_rimg(manifest.resolve(entry.image_path))
        if image.shape != (n, n):
            raise ValueError(f"entry {entry.entry_id}: image shape {image.shape} != ({n}, {n})")
        curve = read_curve_csv(manifest.resolve(entry.curve_path))
        if len(curve) != n:
            raise ValueError(f"entry {entry.entry_id}: curve length {len(curve)} != {n}")
        images[i, 0] = image
        targets[i] = curve
    return torch.from_numpy(images), torch.from_numpy(targets), entries


def train(manifest: Manifest, cfg: TrainConfig, manifest_path=None) -> PredictorModel:
    """Fit a regressor on the manifest's training entries.

    Batch composition is driven by a generator seeded from ``cfg.seed``,
    so identical (manifest, config, seed) triples give identical models in
    deterministic mode. Per-epoch training loss is logged; the final
    train-set loss and mean absolute error land in the model metadata.
    """
    if cfg.deterministic:
        torch.use_deterministic_algorithms(True)
    torch.manual_seed(cfg.seed)
    images, targets, _ = load_tensors(manifest, "train")
    network = CurveRegressor(manifest.n)
    optimizer = torch.optim.Adam(network.parameters(), lr=cfg.learning_rate)
    scheduler = None
    if cfg.lr_decay_every:
        scheduler = torch.optim.lr_scheduler.StepLR(
            optimizer, step_size=cfg.lr_decay_every, gamma=cfg.lr_decay
        )
    shuffler = torch.Generator().manual_seed(cfg.seed)
    count = len(images)
    final_epoch_loss = float("nan")
    for epoch in range(cfg.epochs):
        network.train()
        order = torch.randperm(count, generator=shuffler)
        total = 0.0
        for start in range(0, count, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            optimizer.zero_grad()
            loss = curve_batch_loss(network(images[batch]), targets[batch], cfg.loss_mode)
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(batch)
        if scheduler is not None:
            scheduler.step()
        final_epoch_loss = total / count
        logger.info("epoch %d/%d: train loss %.5f", epoch + 1, cfg.epochs, final_epoch_loss)
    network.eval()
    with torch.no_grad():
        clamped = network(images).clamp(0.0, 1.0)
        train_mae = float((clamped - targets).abs().mean())
        final_loss = float(curve_batch_loss(network(images), targets, cfg.loss_mode))
    metadata = {
        "train_entries": count,
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "learning_rate": cfg.learning_rate,
        "seed": cfg.seed,
        "loss_mode": cfg.loss_mode,
        "final_train_loss": final_loss,
        "final_epoch_loss": final_epoch_loss,
        "train_mae": train_mae,
        "dataset_digest": manifest_digest(manifest_path) if manifest_path else None,
    }
    logger.info("training done: train MAE %.5f", train_mae)
    return PredictorModel(network=network, n=manifest.n, metadata=metadata)
