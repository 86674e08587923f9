"""Object-level evaluation of gland instance segmentations.

Detection F1 under the 50%-coverage rule, object-level Dice and Hausdorff
with area weights, adjusted Rand index, rank-sum leaderboards with
competition tie handling, a classical region-growing baseline segmenter, and
a synthetic ring-gland corpus generator for end-to-end verification.
"""

__version__ = "0.1.0"

from .grid import (  # noqa: E402
    LabelMap,
    ObjectRecord,
    boundary_pixels,
    connected_components,
    from_grid,
    relabel_sequential,
    split_components,
)
from .matching import (  # noqa: E402
    Correspondence,
    OverlapTable,
    hausdorff_fallback,
    maximal_overlap,
    overlap_table,
)
from .metrics import (  # noqa: E402
    DetectionCounts,
    EvalConfig,
    F1Score,
    ImageMetrics,
    MetricReport,
    adjusted_rand,
    detection_counts,
    dice,
    evaluate,
    f1,
    hausdorff,
    object_dice,
    object_hausdorff,
    pooled_object_dice,
    pooled_object_hausdorff,
)
from .ranking import Leaderboard, ScoreColumn, ScoreTable, rank_column, rank_sum  # noqa: E402
from .baseline import (  # noqa: E402
    SegmenterConfig,
    SynthSpec,
    perturb,
    postprocess,
    segment_region_growing,
    synth_glands,
)

__all__ = [
    "__version__",
    "LabelMap",
    "ObjectRecord",
    "boundary_pixels",
    "connected_components",
    "from_grid",
    "relabel_sequential",
    "split_components",
    "Correspondence",
    "OverlapTable",
    "hausdorff_fallback",
    "maximal_overlap",
    "overlap_table",
    "DetectionCounts",
    "EvalConfig",
    "F1Score",
    "ImageMetrics",
    "MetricReport",
    "adjusted_rand",
    "detection_counts",
    "dice",
    "evaluate",
    "f1",
    "hausdorff",
    "object_dice",
    "object_hausdorff",
    "pooled_object_dice",
    "pooled_object_hausdorff",
    "Leaderboard",
    "ScoreColumn",
    "ScoreTable",
    "rank_column",
    "rank_sum",
    "SegmenterConfig",
    "SynthSpec",
    "perturb",
    "postprocess",
    "segment_region_growing",
    "synth_glands",
]
