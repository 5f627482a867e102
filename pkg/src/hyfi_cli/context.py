"""The run directory a command works in and the manifest describing it."""
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import ujson

from hyfi import __version__
from hyfi.datasets.loader import dataset_fingerprint
from hyfi_cli.schema import RunConfig, RunManifest, RunStatus

LOG = logging.getLogger(__name__)

MANIFEST_JSON = "manifest.json"
CONFIG_JSON = "config.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunContext:
    """A context helper class.

    Holds the output directory and the manifest of one command run. The
    manifest is written when the context is created and rewritten when the run
    is marked a success or a failure.
    """

    out_dir: Path
    manifest: RunManifest

    #: added for performance measuring
    _init_time: float = field(default_factory=time.perf_counter)

    @classmethod
    def initialize(
        cls,
        command: str,
        out_dir: Union[str, Path],
        config: RunConfig,
        data_dir: Union[str, Path],
        checkpoint_path: Optional[Union[str, Path]] = None,
    ) -> "RunContext":
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            command=command,
            config=config,
            dataset_path=str(Path(data_dir)),
            dataset_fingerprint=dataset_fingerprint(data_dir),
            checkpoint_path=str(checkpoint_path) if checkpoint_path else None,
            code_version=__version__,
            master_seed=config.train.master_seed,
            started_at=_now(),
            run_status=RunStatus.RUNNING,
        )
        context = cls(out_dir, manifest)
        with open(out_dir / CONFIG_JSON, "w", encoding="utf-8") as handle:
            document = config.model_dump(mode="json", by_alias=True)
            handle.write(ujson.dumps(document, indent=2))
        context.write_manifest()
        return context

    @property
    def config(self) -> RunConfig:
        return self.manifest.config

    @property
    def run_status(self) -> RunStatus:
        return self.manifest.run_status

    def elapsed(self) -> float:
        """Return the elapsed time in seconds since the initialization time."""
        return time.perf_counter() - self._init_time

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def store_output(self, path: Union[str, Path]) -> None:
        """Record a file this run produced, relative to the run directory."""
        path = Path(path)
        try:
            name = str(path.relative_to(self.out_dir))
        except ValueError:
            name = str(path)
        if name not in self.manifest.outputs:
            self.manifest.outputs.append(name)

    def write_manifest(self) -> Path:
        path = self.out_dir / MANIFEST_JSON
        with open(path, "w", encoding="utf-8") as handle:
            document = self.manifest.model_dump(mode="json", by_alias=True)
            handle.write(ujson.dumps(document, indent=2))
        return path

    def mark_run_failed(self, status_message: str) -> None:
        """Mark the current run a failure."""
        self._mark_run(RunStatus.FAILED, status_message)

    def mark_run_success(self, status_message: Optional[str] = None) -> None:
        """Mark the current run a success with an optional message."""
        self._mark_run(RunStatus.SUCCEEDED, status_message)

    def _mark_run(self, status: RunStatus, status_message: Optional[str]) -> None:
        duration = self.elapsed()
        self.manifest.status_message = status_message
        self.manifest.run_status = status
        self.manifest.elapsed = duration
        self.manifest.finished_at = _now()
        self.write_manifest()
        LOG.info(
            "%s run %s after %.2f seconds.", self.manifest.command, status.value, duration
        )
