"""Grasp-type recognition by Bayesian late fusion of a per-image classifier
posterior with an object-name-keyed affordance prior."""

from .affordance import (
    AffordanceDb,
    AffordanceRecord,
    LookupResult,
    build,
    load,
    lookup,
    normalize_name,
    read_records_csv,
    save,
    write_records_csv,
)
from .evaluation import (
    EvalReport,
    Prediction,
    evaluate,
    grasp_prior,
    render_report,
    report_to_dict,
    run_pipeline,
)
from .scores import ScoreFile, ScoreRecord, from_logits, parse_scores, write_scores
from .simbench import (
    SampledDataset,
    World,
    fusion_identity_error,
    cue_posterior,
    exact_posterior,
    expected_accuracy,
    generate_world,
    sample_dataset,
)
from .taxonomy import (
    FOCUS_LABELS,
    GraspDistribution,
    GraspTaxonomy,
    argmax_grasp,
    fuse,
    normalize,
    restrict,
    uniform,
)

__all__ = [
    "AffordanceDb",
    "AffordanceRecord",
    "EvalReport",
    "FOCUS_LABELS",
    "GraspDistribution",
    "GraspTaxonomy",
    "LookupResult",
    "Prediction",
    "SampledDataset",
    "ScoreFile",
    "ScoreRecord",
    "World",
    "argmax_grasp",
    "build",
    "fusion_identity_error",
    "cue_posterior",
    "evaluate",
    "exact_posterior",
    "expected_accuracy",
    "from_logits",
    "fuse",
    "generate_world",
    "grasp_prior",
    "load",
    "lookup",
    "normalize",
    "normalize_name",
    "parse_scores",
    "read_records_csv",
    "render_report",
    "report_to_dict",
    "restrict",
    "run_pipeline",
    "sample_dataset",
    "save",
    "uniform",
    "write_records_csv",
    "write_scores",
]

__version__ = "0.1.0"
