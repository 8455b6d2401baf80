"""Boundary-focused volumetric segmentation toolkit.

Numerical machinery for a two-stage cavity/scar segmentation pipeline:
boundary-band extraction, exact anisotropic distance transforms, TopK/Dice
losses with analytic gradients, uncertainty-aware thresholding, and surface
metrics, around a file-based (.bvol) inference boundary.
"""

from .boundary import boundary_mask, maxpool2d_slice
from .distance import edt, signed_boundary_distance
from .losses import (
    LossValue,
    TopKConfig,
    combined_loss,
    cross_entropy,
    dice_loss,
    topk_focus_mask,
    topk_loss,
)
from .metrics import (
    CaseMetrics,
    EvalReport,
    aggregate,
    asd,
    dice_score,
    hausdorff,
    surface_voxels,
)
from .resample import ResamplePlan, resample_image, resample_label, resample_prob
from .synth import make_case, make_outlier_case
from .uam import (
    UamStats,
    apply_threshold,
    entropy_sum,
    fit_population,
    is_outlier,
    scar_threshold,
)
from .volume import (
    CaseRecord,
    DegenerateInputError,
    FormatError,
    Mask,
    Spacing,
    Volume,
    idx,
    read_volume,
    write_volume,
    zscore_normalize,
)

__version__ = "0.1.0"
