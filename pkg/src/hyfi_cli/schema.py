"""Documents a run reads and writes."""
from enum import Enum
from typing import List, Optional

from pydantic import Field

from hyfi.core.models import HyfiModel
from hyfi.evaluation.embeddings import Representation
from hyfi.evaluation.linear import EvalSettings
from hyfi.evaluation.splits import SplitSpec
from hyfi.training.config import TrainConfig


class RunStatus(str, Enum):
    """Status of a command run."""

    INITIALIZING = "INITIALIZING"
    RUNNING = "RUNNING"
    FAILED = "FAILED"
    SUCCEEDED = "SUCCEEDED"


class RunConfig(HyfiModel):
    """Everything a command reads besides its input paths.

    Loaded from `--config` (snake_case or camelCase keys), then overridden by
    command-line flags; the resolved instance is what the manifest stores.
    """

    train: TrainConfig = Field(default_factory=TrainConfig)
    splits: SplitSpec = Field(default_factory=SplitSpec)
    evaluation: EvalSettings = Field(default_factory=EvalSettings)
    representation: Representation = Representation.ENCODER
    max_c: Optional[int] = Field(default=None, ge=1)


class RunManifest(HyfiModel):
    """Self-description of a run directory, written before any work starts."""

    command: str
    config: RunConfig
    dataset_path: str
    dataset_fingerprint: str
    checkpoint_path: Optional[str] = None
    code_version: str
    master_seed: int
    started_at: str
    finished_at: Optional[str] = None
    elapsed: float = 0
    run_status: RunStatus = RunStatus.INITIALIZING
    status_message: Optional[str] = None
    outputs: List[str] = Field(default_factory=list)


class AblationRow(HyfiModel):
    rank: int
    cell: str
    mean: float
    std: float
    run_count: int
