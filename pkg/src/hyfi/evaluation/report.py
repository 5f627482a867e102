import csv
import hashlib
from pathlib import Path
from typing import Any, List, Sequence, Union

import numpy as np
import ujson
from pydantic import Field

from hyfi.core.models import HyfiModel
from hyfi.logging.exceptions import SplitException

__all__ = [
    "EvalRun",
    "EvalReport",
    "EvalSummary",
    "config_fingerprint",
    "write_eval_report",
]

EVAL_CSV = "eval.csv"
EVAL_SUMMARY_JSON = "eval_summary.json"


def config_fingerprint(payload: Any) -> str:
    return hashlib.sha256(ujson.dumps(payload, sort_keys=True).encode()).hexdigest()[:32]


class EvalRun(HyfiModel):
    split: int
    init: int
    accuracy: float = Field(ge=0.0, le=1.0)


class EvalSummary(HyfiModel):
    mean: float
    std: float
    run_count: int
    skipped_splits: List[int] = Field(default_factory=list)
    config_fingerprint: str


class EvalReport(HyfiModel):
    """Per-run test accuracies and their aggregate.

    `std` is the population standard deviation of `runs`, so both aggregates
    can be recomputed from the stored runs.
    """

    runs: List[EvalRun]
    mean: float
    std: float
    config_fingerprint: str
    skipped_splits: List[int] = Field(default_factory=list)

    @classmethod
    def from_runs(
        cls, runs: Sequence[EvalRun], fingerprint: str, skipped: Sequence[int] = ()
    ) -> "EvalReport":
        if not runs:
            raise SplitException(
                "no evaluation run left: every split misses a class in training"
            )
        ordered = sorted(runs, key=lambda run: (run.split, run.init))
        accuracies = np.array([run.accuracy for run in ordered])
        return cls(
            runs=ordered,
            mean=float(accuracies.mean()),
            std=float(accuracies.std()),
            config_fingerprint=fingerprint,
            skipped_splits=sorted(skipped),
        )

    def summary(self) -> EvalSummary:
        return EvalSummary(
            mean=self.mean,
            std=self.std,
            run_count=len(self.runs),
            skipped_splits=self.skipped_splits,
            config_fingerprint=self.config_fingerprint,
        )


def write_eval_report(report: EvalReport, directory: Union[str, Path]) -> Path:
    """`eval.csv` (split,init,accuracy) plus `eval_summary.json` in `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / EVAL_CSV, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("split", "init", "accuracy"))
        for run in report.runs:
            writer.writerow((run.split, run.init, run.accuracy))
    with open(directory / EVAL_SUMMARY_JSON, "w", encoding="utf-8") as handle:
        handle.write(ujson.dumps(report.summary().model_dump(by_alias=True), indent=2))
    return directory
