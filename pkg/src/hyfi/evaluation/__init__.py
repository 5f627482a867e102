"""Linear evaluation, split management and the commonality analysis."""
from hyfi.evaluation.commonality import (
    CommonalityCurve,
    CommonalityPoint,
    commonality_curve,
    write_commonality_csv,
)
from hyfi.evaluation.embeddings import (
    Representation,
    node_embeddings,
    write_embeddings_csv,
)
from hyfi.evaluation.linear import EvalSettings, fit_classifier, linear_evaluate
from hyfi.evaluation.report import (
    EvalReport,
    EvalRun,
    EvalSummary,
    config_fingerprint,
    write_eval_report,
)
from hyfi.evaluation.splits import Split, SplitSpec, make_splits, split_sizes

__all__ = [
    "CommonalityCurve",
    "CommonalityPoint",
    "EvalReport",
    "EvalRun",
    "EvalSettings",
    "EvalSummary",
    "Representation",
    "Split",
    "SplitSpec",
    "commonality_curve",
    "config_fingerprint",
    "fit_classifier",
    "linear_evaluate",
    "make_splits",
    "node_embeddings",
    "split_sizes",
    "write_commonality_csv",
    "write_embeddings_csv",
    "write_eval_report",
]
