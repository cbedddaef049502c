import json
import subprocess
import sys

import numpy as np
import pytest

from robustness_predictor import write_curve_csv, write_rimg

TOOLKIT_CLI = [sys.executable, "-m", "netrobust.cli"]


def run_toolkit(*args, check=True):
    """Invoke the dataset toolkit's CLI in a subprocess."""
    result = subprocess.run(
        [*TOOLKIT_CLI, *map(str, args)], capture_output=True, text=True
    )
    if check and result.returncode != 0:
        raise AssertionError(
            f"toolkit command {args} failed ({result.returncode}): {result.stderr}"
        )
    return result


def make_synthetic_dataset(root, n=16, count=12, seed=0, constant_curve=None, role="train"):
    """Write a minimal dataset (images, curves, manifest) in the toolkit's formats."""
    rng = np.random.default_rng(seed)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "curves").mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(count):
        image = (rng.random((n, n)) < 0.15).astype(np.float32)
        np.fill_diagonal(image, 0.0)
        if constant_curve is not None:
            curve = np.asarray(constant_curve, dtype=np.float64)
        else:
            curve = np.sort(rng.uniform(0.05, 1.0, n))
            curve[-1] = 1.0
        entry_id = f"syn_{role}{i:04d}"
        write_rimg(image, root / "images" / f"{entry_id}.rimg")
        write_curve_csv(curve, root / "curves" / f"{entry_id}.csv")
        entries.append(
            {
                "entry_id": entry_id,
                "topology": "er",
                "k_avg": 4.0,
                "instance_index": i,
                "seed": seed * 100_000 + i,
                "role": role,
                "attack": {"strategy": "ra", "mode": "adaptive", "seed": i},
                "curve_kind": "connectivity",
                "mask": None,
                "image_path": f"images/{entry_id}.rimg",
                "curve_path": f"curves/{entry_id}.csv",
            }
        )
    manifest = {
        "rnet-manifest": 1,
        "experiment": "I",
        "master_seed": seed,
        "n": n,
        "params": {},
        "entries": entries,
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


@pytest.fixture
def synthetic_manifest(tmp_path):
    return make_synthetic_dataset(tmp_path / "syn")
