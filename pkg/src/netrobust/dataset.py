"""Dataset assembly: seeded builds of images, curves, and a JSON manifest.

Every file a build produces is a pure function of the master seed and the
build parameters: graph seeds, attack seeds, and mask-position seeds are
derived from (master, index tuple), never from arrival order, so builds
are byte-identical no matter how many workers run.

Ground-truth curves are always computed on the intact generated network;
masks only ever touch the image handed to a predictor.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attacks import AttackSpec, simulate_attack_mean, write_curve_csv
from .errors import FormatError, ValidationError
from .generators import NetConfig, generate
from .graph import GrayImage, to_adjacency_image
from .masking import MaskSpec, apply_mask, sample_mask_position
from .rng import Rng, derive_seed

logger = logging.getLogger(__name__)

MANIFEST_SCHEMA = 1
MANIFEST_NAME = "manifest.json"

RIMG_MAGIC = b"RIMG"
RIMG_VERSION = 1
_RIMG_HEADER_LEN = len(RIMG_MAGIC) + 1 + 8

# Experiment tags fed into seed derivation.
_EXP1_TAG = 1
_EXP2_TAG = 2
_STREAM_GRAPH = 0
_STREAM_ATTACK = 1
_STREAM_MASK = 2

_ROLE_CODES = {"train": 0, "test": 1}


# -- RIMG1 binary image format ------------------------------------------------


def write_image(img: GrayImage, path) -> None:
    """Write the RIMG1 form: magic, version byte, u32 dims, f32 pixels (LE)."""
    header = RIMG_MAGIC + bytes([RIMG_VERSION]) + struct.pack("<II", img.height, img.width)
    payload = np.ascontiguousarray(img.pixels, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def read_image(path) -> GrayImage:
    """Read an RIMG1 file; round-trips with :func:`write_image` bit-exactly."""
    data = Path(path).read_bytes()
    if len(data) < _RIMG_HEADER_LEN:
        raise FormatError(f"image file too short ({len(data)} bytes): {path}")
    if data[: len(RIMG_MAGIC)] != RIMG_MAGIC:
        raise FormatError(f"bad image magic in {path}")
    if data[len(RIMG_MAGIC)] != RIMG_VERSION:
        raise FormatError(f"unsupported image version {data[len(RIMG_MAGIC)]} in {path}")
    height, width = struct.unpack_from("<II", data, len(RIMG_MAGIC) + 1)
    expected = _RIMG_HEADER_LEN + 4 * height * width
    if len(data) != expected:
        raise FormatError(
            f"image payload size mismatch in {path}: expected {expected} bytes, got {len(data)}"
        )
    pixels = np.frombuffer(data, dtype="<f4", offset=_RIMG_HEADER_LEN).reshape(height, width)
    return GrayImage(pixels.copy())


# -- manifest types -----------------------------------------------------------


@dataclass
class InstanceRecord:
    """One dataset entry: a (possibly masked) image plus its true curve."""

    entry_id: str
    topology: str
    k_avg: float
    instance_index: int
    seed: int
    role: str
    attack: AttackSpec
    curve_kind: str
    mask: MaskSpec | None
    image_path: str
    curve_path: str

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "topology": self.topology,
            "k_avg": self.k_avg,
            "instance_index": self.instance_index,
            "seed": self.seed,
            "role": self.role,
            "attack": {
                "strategy": self.attack.strategy,
                "mode": self.attack.mode,
                "seed": self.attack.seed,
            },
            "curve_kind": self.curve_kind,
            "mask": self.mask.to_json() if self.mask is not None else None,
            "image_path": self.image_path,
            "curve_path": self.curve_path,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InstanceRecord":
        return cls(
            entry_id=obj["entry_id"],
            topology=obj["topology"],
            k_avg=float(obj["k_avg"]),
            instance_index=int(obj["instance_index"]),
            seed=int(obj["seed"]),
            role=obj["role"],
            attack=AttackSpec(**obj["attack"]),
            curve_kind=obj["curve_kind"],
            mask=MaskSpec.from_json(obj["mask"]) if obj["mask"] is not None else None,
            image_path=obj["image_path"],
            curve_path=obj["curve_path"],
        )


@dataclass
class DatasetManifest:
    """Declarative record of every instance in one built dataset."""

    experiment: str
    master_seed: int
    n: int
    params: dict
    entries: list[InstanceRecord] = field(default_factory=list)
    base_dir: Path | None = None

    def to_json(self) -> dict:
        return {
            "rnet-manifest": MANIFEST_SCHEMA,
            "experiment": self.experiment,
            "master_seed": self.master_seed,
            "n": self.n,
            "params": self.params,
            "entries": [e.to_json() for e in self.entries],
        }

    def resolve(self, rel_path: str) -> Path:
        if self.base_dir is None:
            return Path(rel_path)
        return self.base_dir / rel_path

    def validate_seeds(self) -> None:
        """Distinct generated instances must carry pairwise-distinct seeds."""
        by_instance: dict[tuple, int] = {}
        for e in self.entries:
            key = (e.topology, e.k_avg, e.role, e.instance_index)
            if key in by_instance:
                if by_instance[key] != e.seed:
                    raise ValidationError(f"instance {key} has conflicting seeds")
            else:
                by_instance[key] = e.seed
        seeds = list(by_instance.values())
        if len(set(seeds)) != len(seeds):
            raise ValidationError("instance seeds are not pairwise distinct")


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"manifest is not valid JSON: {path}") from exc
    if obj.get("rnet-manifest") != MANIFEST_SCHEMA:
        raise FormatError(f"missing or unsupported manifest schema in {path}")
    return DatasetManifest(
        experiment=obj["experiment"],
        master_seed=int(obj["master_seed"]),
        n=int(obj["n"]),
        params=obj.get("params", {}),
        entries=[InstanceRecord.from_json(e) for e in obj["entries"]],
        base_dir=path.parent,
    )


# -- build parameters ----------------------------------------------------


@dataclass(frozen=True)
class Experiment1Params:
    """Masked-test-set experiment: clean training data, null-masked tests."""

    n: int
    k_avg_list: tuple[float, ...]
    topologies: tuple[str, ...]
    train_per_config: int
    test_per_config: int
    attack: AttackSpec
    curve_kind: str
    mask_sizes: tuple[int, ...]
    master_seed: int
    attack_repeats: int = 1

    def __post_init__(self):
        if self.train_per_config < 0 or self.test_per_config < 0:
            raise ValidationError("per-config instance counts must be nonnegative")
        if self.train_per_config + self.test_per_config == 0:
            raise ValidationError("nothing to build")
        if not self.topologies or not self.k_avg_list:
            raise ValidationError("need at least one topology and one average degree")
        if len(set(self.mask_sizes)) != len(self.mask_sizes):
            raise ValidationError("duplicate mask sizes")
        for s in self.mask_sizes:
            if not 1 <= s < self.n:
                raise ValidationError(f"mask size {s} does not fit in an image of side {self.n}")
        if self.attack_repeats < 1:
            raise ValidationError("attack_repeats must be >= 1")


@dataclass(frozen=True)
class Experiment2Params:
    """Mixed-training experiment: originals plus masked training variants."""

    n: int
    k_avg_list: tuple[float, ...]
    topologies: tuple[str, ...]
    originals_per_config: int
    masked_per_original: int
    mask_size: int
    attack: AttackSpec
    curve_kind: str
    master_seed: int
    mask_kinds: tuple[str, ...] = ("null", "confusion")
    attack_repeats: int = 1

    def __post_init__(self):
        if self.originals_per_config < 1:
            raise ValidationError("need at least one original per config")
        if self.masked_per_original < 0:
            raise ValidationError("masked_per_original must be nonnegative")
        if not self.topologies or not self.k_avg_list:
            raise ValidationError("need at least one topology and one average degree")
        if not 1 <= self.mask_size < self.n:
            raise ValidationError(f"mask size {self.mask_size} does not fit in an image of side {self.n}")
        if not self.mask_kinds:
            raise ValidationError("need at least one mask kind")
        if self.attack_repeats < 1:
            raise ValidationError("attack_repeats must be >= 1")


def _instance_id(topology: str, k_avg: float, role: str, index: int) -> str:
    return f"{topology}_k{k_avg:g}_{role}{index:04d}"


def _build_graph_and_truth(params, topology, k_avg, graph_seed, attack_seed):
    cfg = NetConfig(topology=topology, n=params.n, k_avg=k_avg, seed=graph_seed)
    g = generate(cfg)
    attack = AttackSpec(strategy=params.attack.strategy, mode=params.attack.mode, seed=attack_seed)
    curve = simulate_attack_mean(g, attack, params.curve_kind, repeats=params.attack_repeats)
    return g, attack, curve


def _exp1_job(args) -> list[dict]:
    params, out_dir, t_idx, k_idx, role, index = args
    out_dir = Path(out_dir)
    topology = params.topologies[t_idx]
    k_avg = params.k_avg_list[k_idx]
    role_code = _ROLE_CODES[role]
    base = [_EXP1_TAG, t_idx, k_idx, role_code, index]
    graph_seed = derive_seed(params.master_seed, base + [_STREAM_GRAPH])
    attack_seed = derive_seed(params.master_seed, base + [_STREAM_ATTACK])
    g, attack, curve = _build_graph_and_truth(params, topology, k_avg, graph_seed, attack_seed)

    instance = _instance_id(topology, k_avg, role, index)
    curve_rel = f"curves/{instance}.csv"
    write_curve_csv(curve, out_dir / curve_rel)
    image = to_adjacency_image(g)
    image_rel = f"images/{instance}.rimg"
    write_image(image, out_dir / image_rel)

    def record(entry_id, mask, image_path):
        return InstanceRecord(
            entry_id=entry_id,
            topology=topology,
            k_avg=k_avg,
            instance_index=index,
            seed=graph_seed,
            role=role,
            attack=attack,
            curve_kind=params.curve_kind,
            mask=mask,
            image_path=image_path,
            curve_path=curve_rel,
        ).to_json()

    entries = [record(instance, None, image_rel)]
    if role == "test":
        for s_idx, size in enumerate(params.mask_sizes):
            mask_seed = derive_seed(params.master_seed, base + [_STREAM_MASK, s_idx])
            row, col = sample_mask_position(params.n, size, Rng(mask_seed))
            mask = MaskSpec(kind="null", size=size, row=row, col=col)
            masked_rel = f"images/{instance}_s{size:03d}.rimg"
            write_image(apply_mask(image, mask), out_dir / masked_rel)
            entries.append(record(f"{instance}_s{size:03d}", mask, masked_rel))
    return entries


def _exp2_job(args) -> list[dict]:
    params, out_dir, t_idx, k_idx, index = args
    out_dir = Path(out_dir)
    topology = params.topologies[t_idx]
    k_avg = params.k_avg_list[k_idx]
    base = [_EXP2_TAG, t_idx, k_idx, index]
    graph_seed = derive_seed(params.master_seed, base + [_STREAM_GRAPH])
    attack_seed = derive_seed(params.master_seed, base + [_STREAM_ATTACK])
    g, attack, curve = _build_graph_and_truth(params, topology, k_avg, graph_seed, attack_seed)

    instance = _instance_id(topology, k_avg, "orig", index)
    curve_rel = f"curves/{instance}.csv"
    write_curve_csv(curve, out_dir / curve_rel)
    image = to_adjacency_image(g)
    image_rel = f"images/{instance}.rimg"
    write_image(image, out_dir / image_rel)

    def record(entry_id, mask, image_path):
        return InstanceRecord(
            entry_id=entry_id,
            topology=topology,
            k_avg=k_avg,
            instance_index=index,
            seed=graph_seed,
            role="train",
            attack=attack,
            curve_kind=params.curve_kind,
            mask=mask,
            image_path=image_path,
            curve_path=curve_rel,
        ).to_json()

    entries = [record(instance, None, image_rel)]
    for v in range(params.masked_per_original):
        # deterministic alternation: even variants take the first kind
        kind = params.mask_kinds[v % len(params.mask_kinds)]
        mask_seed = derive_seed(params.master_seed, base + [_STREAM_MASK, v])
        row, col = sample_mask_position(params.n, params.mask_size, Rng(mask_seed))
        mask = MaskSpec(kind=kind, size=params.mask_size, row=row, col=col)
        masked_rel = f"images/{instance}_v{v:03d}.rimg"
        write_image(apply_mask(image, mask), out_dir / masked_rel)
        entries.append(record(f"{instance}_v{v:03d}", mask, masked_rel))
    return entries


def _run_jobs(job_fn, jobs, workers: int) -> list[dict]:
    if workers <= 1:
        results = [job_fn(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job_fn, jobs))
    return [entry for batch in results for entry in batch]


def _prepare_out_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "curves").mkdir(parents=True, exist_ok=True)
    return out_dir


def _params_json(params) -> dict:
    obj = dataclasses.asdict(params)
    obj["attack"] = {
        "strategy": params.attack.strategy,
        "mode": params.attack.mode,
        "seed": params.attack.seed,
    }
    for key, value in obj.items():
        if isinstance(value, tuple):
            obj[key] = list(value)
    return obj


def build_experiment1(params: Experiment1Params, out_dir, workers: int = 1) -> DatasetManifest:
    """Build the masked-test-set dataset and write its manifest.

    Training entries are unmasked; every test instance yields one unmasked
    base entry plus one null-masked entry per requested mask size, each at
    a freshly sampled position.
    """
    out_dir = _prepare_out_dir(out_dir)
    logger.info("experiment-1 build: params=%s out_dir=%s workers=%d", params, out_dir, workers)
    jobs = []
    for t_idx in range(len(params.topologies)):
        for k_idx in range(len(params.k_avg_list)):
            for index in range(params.train_per_config):
                jobs.append((params, str(out_dir), t_idx, k_idx, "train", index))
            for index in range(params.test_per_config):
                jobs.append((params, str(out_dir), t_idx, k_idx, "test", index))
    entry_dicts = _run_jobs(_exp1_job, jobs, workers)
    manifest = DatasetManifest(
        experiment="I",
        master_seed=params.master_seed,
        n=params.n,
        params=_params_json(params),
        entries=[InstanceRecord.from_json(e) for e in entry_dicts],
        base_dir=out_dir,
    )
    manifest.validate_seeds()
    save_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest


def build_experiment2(params: Experiment2Params, out_dir, workers: int = 1) -> DatasetManifest:
    """Build the mixed-training dataset and write its manifest.

    The training set is every original (unmasked) plus ``masked_per_original``
    masked variants of each, with the mask kind alternating deterministically
    through ``mask_kinds`` and a fresh position per variant.
    """
    out_dir = _prepare_out_dir(out_dir)
    logger.info("experiment-2 build: params=%s out_dir=%s workers=%d", params, out_dir, workers)
    jobs = []
    for t_idx in range(len(params.topologies)):
        for k_idx in range(len(params.k_avg_list)):
            for index in range(params.originals_per_config):
                jobs.append((params, str(out_dir), t_idx, k_idx, index))
    entry_dicts = _run_jobs(_exp2_job, jobs, workers)
    manifest = DatasetManifest(
        experiment="II",
        master_seed=params.master_seed,
        n=params.n,
        params=_params_json(params),
        entries=[InstanceRecord.from_json(e) for e in entry_dicts],
        base_dir=out_dir,
    )
    manifest.validate_seeds()
    save_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest


def hash_tree(root) -> str:
    """SHA-256 over sorted (relative path, content) pairs under ``root``."""
    root = Path(root)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        digest.update(path.relative_to(root).as_posix().encode())
        digest.update(b"\0")
        digest.update(path.read_bytes())
    return digest.hexdigest()
