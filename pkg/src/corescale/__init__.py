"""corescale: resampling-method selection and SR dataset forging for paired micrographs."""

from .analysis import (
    PSNR_INF,
    BinaryImage,
    QualityMetrics,
    SsimParams,
    binarize,
    increase_ratio,
    mse,
    psnr,
    quality,
    ssim,
    zscore,
)
from .errors import CoreScaleError
from .harness import (
    DatasetManifest,
    PairedSample,
    QualityReport,
    ReportRow,
    build_manifest,
    coarsen_eval,
    export_report,
    full_alignment,
    load_corpus,
    prepare_samples,
    rank_methods,
    refine_eval,
)
from .image import GrayImage, Rect, crop, load_image, save_image
from .mechsim import MechReport, SceneSpec, infer_mechanism, simulate_capture, synth_groundtruth
from .registration import PairAlignment, ncc_map, pair_images
from .resample import (
    METHOD_NAMES,
    ResampleMethod,
    ResampleSpec,
    all_methods,
    coarsen,
    kernel_weight,
    method,
    refine,
    resize,
)

__version__ = "0.1.0"
