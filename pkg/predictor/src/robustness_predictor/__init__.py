"""CNN-based robustness-curve prediction over adjacency-image datasets."""

from .evaluation import (
    ERROR_REPORT_COLUMNS,
    error_rows,
    mean_mae,
    predict_to_dir,
    write_error_report,
)
from .formats import (
    FormatError,
    Manifest,
    ManifestEntry,
    load_manifest,
    manifest_digest,
    read_curve_csv,
    read_rimg,
    write_curve_csv,
    write_rimg,
)
from .masks import apply_square_mask, sample_corner
from .model import (
    CurveRegressor,
    PredictorModel,
    conv_widths,
    load_model,
    predict,
    save_model,
)
from .training import TrainConfig, curve_batch_loss, load_tensors, train

__version__ = "0.1.0"
