"""Directed-network robustness toolkit.

Generates seeded synthetic networks, simulates node-removal attacks to
produce connectivity and controllability robustness curves, converts
adjacency matrices to grayscale images, applies missing-edge masks, builds
reproducible datasets, and evaluates prediction errors with significance
sweeps.
"""

from .attacks import (
    AttackSpec,
    RemovalSequence,
    RobustnessCurve,
    betweenness,
    max_matching_size,
    min_driver_nodes,
    read_curve_values,
    replay_curve,
    simulate_attack,
    simulate_attack_mean,
    write_curve_csv,
    write_removal_csv,
)
from .dataset import (
    DatasetManifest,
    Experiment1Params,
    Experiment2Params,
    InstanceRecord,
    build_experiment1,
    build_experiment2,
    hash_tree,
    load_manifest,
    read_image,
    save_manifest,
    write_image,
)
from .errors import FormatError, GenerationError, NetrobustError, ValidationError
from .generators import (
    NetConfig,
    gen_er,
    gen_qsnapback,
    gen_scalefree,
    gen_smallworld,
    generate,
)
from .graph import (
    DegreeTable,
    DiGraph,
    GrayImage,
    degrees,
    from_edge_list,
    read_edge_list,
    to_adjacency_image,
    weak_lcc_size,
    weak_lcc_size_unionfind,
    write_edge_list,
)
from .masking import MaskSpec, apply_mask, pixel_loss_ratio, sample_mask_position
from .rng import Rng, derive_seed
from .stats import (
    DiffTable,
    ThresholdReport,
    UTestResult,
    curve_loss,
    diff_table,
    mae,
    mann_whitney,
    threshold_sweep,
)

__version__ = "0.1.0"
