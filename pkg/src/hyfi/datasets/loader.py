"""
Canonical dataset directories.

A dataset is a directory holding three newline-terminated text files with no
header rows:

- `hyperedges.txt`: one hyperedge per line, ascending space-separated 0-based
  node ids;
- `features.csv`: one node per line, comma-separated decimals;
- `labels.txt`: one integer class label per line.

The node count is the number of feature rows.
"""
import hashlib
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from hyfi.logging.exceptions import DatasetException, InvalidHypergraphException
from hyfi.objects.features import FeatureMatrix, LabelVector
from hyfi.objects.hypergraph import Hypergraph

LOG = logging.getLogger(__name__)

HYPEREDGES_FILE = "hyperedges.txt"
FEATURES_FILE = "features.csv"
LABELS_FILE = "labels.txt"
DATASET_FILES = (HYPEREDGES_FILE, FEATURES_FILE, LABELS_FILE)

PathLike = Union[str, Path]


def _require(directory: Path, file_name: str) -> Path:
    path = directory / file_name
    if not path.is_file():
        raise DatasetException(f"missing dataset file '{file_name}' in {directory}", path)
    return path


def _read_hyperedges(path: Path) -> List[Tuple[int, ...]]:
    hyperedges = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            tokens = line.split()
            if not tokens:
                raise DatasetException(
                    f"{path.name}: empty hyperedge line {line_number}", path
                )
            try:
                members = [int(token) for token in tokens]
            except ValueError as ex:
                raise DatasetException(
                    f"{path.name}: line {line_number} is not a list of node ids",
                    path,
                    ex,
                ) from ex
            if len(set(members)) != len(members):
                raise DatasetException(
                    f"{path.name}: line {line_number} repeats a node id", path
                )
            hyperedges.append(tuple(sorted(members)))
    return hyperedges


def _read_features(path: Path) -> np.ndarray:
    try:
        values = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as ex:
        raise DatasetException(f"{path.name}: unreadable feature rows ({ex})", path, ex) from ex
    if values.shape[0] == 0:
        raise DatasetException(f"{path.name}: no feature rows", path)
    if not np.all(np.isfinite(values)):
        row = int(np.argwhere(~np.isfinite(values))[0][0])
        raise DatasetException(f"{path.name}: non-finite value on line {row + 1}", path)
    return values


def _read_labels(path: Path) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=np.int64, ndmin=1)
    except ValueError as ex:
        raise DatasetException(f"{path.name}: unreadable labels ({ex})", path, ex) from ex


def load_hypergraph(directory: PathLike) -> Tuple[Hypergraph, FeatureMatrix, LabelVector]:
    """Read and cross-validate a canonical dataset directory."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetException(f"dataset directory {directory} does not exist", directory)
    paths = {name: _require(directory, name) for name in DATASET_FILES}

    hyperedges = _read_hyperedges(paths[HYPEREDGES_FILE])
    features = _read_features(paths[FEATURES_FILE])
    labels = _read_labels(paths[LABELS_FILE])

    num_nodes = features.shape[0]
    if labels.shape[0] != num_nodes:
        raise DatasetException(
            f"row-count mismatch: {FEATURES_FILE} has {num_nodes} rows but"
            f" {LABELS_FILE} has {labels.shape[0]}",
            directory,
        )
    for line_number, edge in enumerate(hyperedges, start=1):
        if edge[0] < 0 or edge[-1] >= num_nodes:
            bad = edge[0] if edge[0] < 0 else edge[-1]
            raise DatasetException(
                f"node id out of range: {HYPEREDGES_FILE} line {line_number} references"
                f" node {bad} but {FEATURES_FILE} has {num_nodes} rows",
                paths[HYPEREDGES_FILE],
            )
    try:
        h = Hypergraph(num_nodes, hyperedges)
        label_vector = LabelVector(labels)
    except InvalidHypergraphException as ex:
        raise DatasetException(str(ex.message), directory, ex) from ex
    except Exception as ex:
        raise DatasetException(f"invalid labels: {ex}", paths[LABELS_FILE], ex) from ex

    LOG.info(
        "loaded %s: %d nodes, %d hyperedges, %d features, %d classes",
        directory.name,
        h.num_nodes,
        h.num_hyperedges,
        features.shape[1],
        label_vector.num_classes,
    )
    return h, FeatureMatrix(features), label_vector


def save_hypergraph(
    directory: PathLike,
    h: Hypergraph,
    x: FeatureMatrix,
    labels: Optional[LabelVector] = None,
) -> Path:
    """Write `h`, `x` (and `labels`) in the canonical format.

    Hyperedges keep their order and list their nodes ascending; features are
    written with full float precision. Without labels every node gets class 0.
    """
    directory = Path(directory)
    x.check_rows(h.num_nodes)
    if any(not edge for edge in h.hyperedges):
        raise DatasetException(
            "the canonical format cannot hold an empty hyperedge", directory
        )
    directory.mkdir(parents=True, exist_ok=True)
    label_values = labels.labels if labels is not None else np.zeros(h.num_nodes, dtype=np.int64)
    if label_values.shape[0] != h.num_nodes:
        raise DatasetException(
            f"{label_values.shape[0]} labels for {h.num_nodes} nodes", directory
        )

    with open(directory / HYPEREDGES_FILE, "w", encoding="utf-8", newline="\n") as handle:
        for edge in h.hyperedges:
            handle.write(" ".join(str(v) for v in edge) + "\n")
    with open(directory / FEATURES_FILE, "w", encoding="utf-8", newline="\n") as handle:
        for row in x.values:
            handle.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(directory / LABELS_FILE, "w", encoding="utf-8", newline="\n") as handle:
        for label in label_values.tolist():
            handle.write(f"{label}\n")
    return directory


def dataset_fingerprint(directory: PathLike) -> str:
    """sha256 over the three canonical files, in fixed order."""
    directory = Path(directory)
    digest = hashlib.sha256()
    for name in DATASET_FILES:
        path = _require(directory, name)
        digest.update(name.encode("utf-8") + b"\0")
        digest.update(path.read_bytes())
        digest.update(b"\0")
    return digest.hexdigest()
