import csv
import logging
import time
from pathlib import Path
from typing import List, Optional, Union

from attrs import define, field

from hyfi.augmentation.views import generate_views
from hyfi.nn.init import init_parameters
from hyfi.objects.features import FeatureMatrix, LabelVector
from hyfi.objects.hypergraph import Hypergraph
from hyfi.objects.parameters import ModelParameters
from hyfi.serialization.tensor_serializer import save_checkpoint
from hyfi.training.config import TrainConfig
from hyfi.training.objective import LossRecord, ObjectiveContext, backward
from hyfi.training.optimizer import OptimizerState, adamw_step
from hyfi.transports.abstract_transport import AbstractTransport
from hyfi.transports.sqlite import SQLiteTransport

LOG = logging.getLogger(__name__)

LOSS_LOG_NAME = "loss.csv"
LOSS_LOG_HEADER = ("epoch", "loss_node", "loss_edge", "loss_total")


@define
class TrainResult:
    params: ModelParameters
    history: List[LossRecord] = field(factory=list)

    def losses(self) -> List[float]:
        return [record.total for record in self.history]


def initial_parameters(feature_dim: int, cfg: TrainConfig) -> ModelParameters:
    encoder, projection = init_parameters(
        cfg.encoder.dims(feature_dim),
        cfg.encoder.proj_dim,
        cfg.master_seed,
        cfg.encoder.activation,
    )
    return ModelParameters(encoder, projection)


def checkpoint_meta(cfg: TrainConfig, feature_dim: int, epoch: int) -> dict:
    return {
        "epoch": epoch,
        "encoder": cfg.encoder.model_dump(mode="json"),
        "feature_dim": feature_dim,
        "master_seed": cfg.master_seed,
    }


def train(
    h: Hypergraph,
    x: FeatureMatrix,
    labels: Optional[LabelVector],
    cfg: TrainConfig,
    run_dir: Optional[Union[str, Path]] = None,
    transport: Optional[AbstractTransport] = None,
) -> TrainResult:
    """Full-batch contrastive training.

    Each epoch draws `num_views` fresh noise views, evaluates the objective
    and its gradient, and takes one AdamW step. `labels` are accepted so
    callers can pass a whole dataset; they are never read.

    With `run_dir`, the per-epoch losses go to `loss.csv` there and the final
    parameters (plus every `checkpoint_every` epochs) to `checkpoint.db`,
    unless another `transport` is given.
    """
    del labels
    x.check_rows(h.num_nodes)
    run_path = Path(run_dir) if run_dir is not None else None
    if transport is None and run_path is not None:
        transport = SQLiteTransport(base_path=str(run_path), scope="checkpoint")

    params = initial_parameters(x.feature_dim, cfg)
    state = OptimizerState.zeros_like(params)
    ctx = ObjectiveContext.build(h, cfg.encoder.self_loops)
    view_spec = cfg.view_spec()
    result = TrainResult(params)

    LOG.info(
        "training on %r for %d epochs (%s views, M=%d)",
        h,
        cfg.epochs,
        view_spec.kind.value,
        view_spec.num_views,
    )
    started = time.perf_counter()
    loss_file = None
    writer = None
    if run_path is not None:
        run_path.mkdir(parents=True, exist_ok=True)
        loss_file = open(run_path / LOSS_LOG_NAME, "w", newline="", encoding="utf-8")
        writer = csv.writer(loss_file, lineterminator="\n")
        writer.writerow(LOSS_LOG_HEADER)

    try:
        for epoch in range(1, cfg.epochs + 1):
            views = generate_views(h, x, view_spec, epoch)
            record, grads = backward(h, x, views, params, cfg, ctx=ctx, epoch=epoch)
            adamw_step(params, grads, state, cfg)
            result.history.append(record)
            if writer is not None:
                writer.writerow((epoch, record.node, record.edge, record.total))

            LOG.debug(
                "epoch %d node=%.6f edge=%.6f total=%.6f",
                epoch,
                record.node,
                record.edge,
                record.total,
            )
            if epoch % cfg.log_every == 0 or epoch == cfg.epochs:
                LOG.info("epoch %d/%d loss %.6f", epoch, cfg.epochs, record.total)
            if (
                transport is not None
                and cfg.checkpoint_every
                and epoch % cfg.checkpoint_every == 0
                and epoch != cfg.epochs
            ):
                save_checkpoint(params, transport, checkpoint_meta(cfg, x.feature_dim, epoch))
    finally:
        if loss_file is not None:
            loss_file.close()

    if transport is not None:
        save_checkpoint(params, transport, checkpoint_meta(cfg, x.feature_dim, cfg.epochs))
    LOG.info(
        "training finished in %.2fs, final loss %.6f",
        time.perf_counter() - started,
        result.history[-1].total,
    )
    return result
