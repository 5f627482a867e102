"""
Linear evaluation of frozen embeddings.

For every (split, init) pair a softmax-regression classifier is fit on the
training rows with AdamW, the epoch with the best validation accuracy is kept
(earliest on ties), and only that classifier is scored on the test rows.
"""
import logging
import warnings
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import Field

from hyfi.core.helpers.random import stream
from hyfi.core.models import HyfiModel
from hyfi.evaluation.report import EvalReport, EvalRun, config_fingerprint
from hyfi.evaluation.splits import Split, SplitSpec, make_splits
from hyfi.logging.exceptions import DimensionMismatchException, HyfiWarning
from hyfi.nn.init import glorot_uniform
from hyfi.objects.features import LabelVector
from hyfi.training.optimizer import OptimizerState, adamw_update

LOG = logging.getLogger(__name__)

__all__ = ["EvalSettings", "fit_classifier", "linear_evaluate"]


class EvalSettings(HyfiModel):
    learning_rate: float = Field(default=1e-2, gt=0.0)
    weight_decay: float = Field(default=1e-4, ge=0.0)
    epochs: int = Field(default=500, ge=1)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _predict(params: Dict[str, np.ndarray], x: np.ndarray) -> np.ndarray:
    return np.argmax(x @ params["weight"] + params["bias"], axis=1)


def fit_classifier(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_valid: np.ndarray,
    y_valid: np.ndarray,
    num_classes: int,
    rng: np.random.Generator,
    settings: EvalSettings,
) -> Tuple[Dict[str, np.ndarray], int, float]:
    """Full-batch softmax regression; returns the validation-selected weights,
    the epoch they come from and their validation accuracy."""
    params = {
        "weight": glorot_uniform(rng, x_train.shape[1], num_classes),
        "bias": np.zeros(num_classes),
    }
    state = OptimizerState.for_tensors(params)
    targets = np.eye(num_classes)[y_train]
    count = x_train.shape[0]

    best = {name: t.copy() for name, t in params.items()}
    best_epoch = 0
    best_acc = float(np.mean(_predict(params, x_valid) == y_valid))
    for epoch in range(1, settings.epochs + 1):
        d_logits = (_softmax(x_train @ params["weight"] + params["bias"]) - targets) / count
        grads = {"weight": x_train.T @ d_logits, "bias": d_logits.sum(axis=0)}
        adamw_update(
            params,
            grads,
            state,
            learning_rate=settings.learning_rate,
            weight_decay=settings.weight_decay,
        )
        acc = float(np.mean(_predict(params, x_valid) == y_valid))
        if acc > best_acc:
            best = {name: t.copy() for name, t in params.items()}
            best_epoch, best_acc = epoch, acc
    return best, best_epoch, best_acc


def _covers_classes(split: Split, labels: np.ndarray, classes: np.ndarray) -> bool:
    return np.array_equal(np.unique(labels[split.train]), classes)


def linear_evaluate(
    embeddings: np.ndarray,
    labels: LabelVector,
    spec: SplitSpec,
    settings: Optional[EvalSettings] = None,
    fingerprint_payload: Optional[dict] = None,
) -> EvalReport:
    """Score frozen `embeddings` with num_splits x num_inits linear classifiers.

    Splits whose training part misses a class are skipped with a
    `HyfiWarning`. The embeddings are never modified.
    """
    settings = settings or EvalSettings()
    embeddings = np.array(embeddings, dtype=np.float64, copy=True)
    embeddings.setflags(write=False)
    if embeddings.ndim != 2 or embeddings.shape[0] != len(labels):
        raise DimensionMismatchException(
            f"embeddings have shape {embeddings.shape} but there are {len(labels)}"
            " labels"
        )
    y = labels.labels
    classes = np.unique(y)

    runs: List[EvalRun] = []
    skipped: List[int] = []
    for split in make_splits(len(labels), spec):
        if not _covers_classes(split, y, classes):
            missing = sorted(set(classes.tolist()) - set(y[split.train].tolist()))
            warnings.warn(
                f"split {split.index} skipped: class(es) {missing} absent from the"
                " training part",
                HyfiWarning,
            )
            skipped.append(split.index)
            continue
        x_train, y_train = embeddings[split.train], y[split.train]
        x_valid, y_valid = embeddings[split.valid], y[split.valid]
        for init in range(spec.num_inits):
            rng = stream(spec.seed, "eval-init", split.index, init)
            weights, epoch, valid_acc = fit_classifier(
                x_train, y_train, x_valid, y_valid, labels.num_classes, rng, settings
            )
            test_acc = float(np.mean(_predict(weights, embeddings[split.test]) == y[split.test]))
            LOG.debug(
                "split %d init %d: best epoch %d valid %.4f test %.4f",
                split.index,
                init,
                epoch,
                valid_acc,
                test_acc,
            )
            runs.append(EvalRun(split=split.index, init=init, accuracy=test_acc))

    payload = fingerprint_payload or {
        "splits": spec.model_dump(mode="json"),
        "settings": settings.model_dump(mode="json"),
    }
    report = EvalReport.from_runs(runs, config_fingerprint(payload), skipped)
    LOG.info(
        "linear evaluation: %.4f +/- %.4f over %d runs", report.mean, report.std, len(runs)
    )
    return report
