"""Bulk LSB steganalysis: four classical detectors behind two fusion modes."""

from .detectors import (
    CASCADE_ORDER,
    REPORT_ORDER,
    DetectorId,
    DetectorOutcome,
    FailureReason,
    chi_square_attack,
    primary_sets,
    rs_analysis,
    run_all_detectors,
    sample_pairs,
)
from .embedder import Distribution, EmbedSpec, PoolManifest, generate_pool, lsb_embed
from .fusion import (
    DEFAULT_THRESHOLD,
    FusionConfig,
    FusionMode,
    FusionTrace,
    Verdict,
    fast_fusion,
    quantify_payload,
    standard_fusion,
)
from .images import SampleImage, ScanTarget, decode_image, save_image, scan_directory

__version__ = "0.1.0"
