"""Command dispatch for the `hyfi` executable.

Every subcommand follows the same life cycle: resolve the configuration
(`--config` file, then flag overrides), load and validate the dataset, open a
run directory whose manifest is written before any work starts, run the
command, and mark the run a success or a failure. Failures end the process
with a category-stable exit status and a one-line diagnostic on stderr.
"""
import argparse
import logging
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import ujson
from pydantic import ValidationError

from hyfi.augmentation.spec import AugmentationKind
from hyfi.core.helpers.path_provider import new_run_path
from hyfi.datasets.loader import load_hypergraph
from hyfi.evaluation.commonality import (
    COMMONALITY_CSV,
    commonality_curve,
    write_commonality_csv,
)
from hyfi.evaluation.embeddings import (
    EMBEDDINGS_CSV,
    Representation,
    node_embeddings,
    write_embeddings_csv,
)
from hyfi.evaluation.linear import linear_evaluate
from hyfi.evaluation.report import (
    EVAL_CSV,
    EVAL_SUMMARY_JSON,
    EvalReport,
    write_eval_report,
)
from hyfi.logging.exceptions import (
    CheckpointException,
    DatasetException,
    DimensionMismatchException,
    HyfiException,
    LossConfigurationException,
    NonFiniteException,
    SplitException,
    ZeroNormEmbeddingException,
)
from hyfi.objects.features import FeatureMatrix, LabelVector
from hyfi.objects.hypergraph import Hypergraph
from hyfi.serialization.tensor_serializer import Checkpoint, load_checkpoint
from hyfi.training.trainer import LOSS_LOG_NAME, TrainResult, train
from hyfi.transports.sqlite import SQLiteTransport
from hyfi_cli.context import RunContext
from hyfi_cli.schema import AblationRow, RunConfig, RunStatus

LOG = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATASET = 3
EXIT_CONFIG = 4
EXIT_CHECKPOINT = 5
EXIT_NUMERIC = 6

CHECKPOINT_SCOPE = "checkpoint"
CHECKPOINT_FILE = f"{CHECKPOINT_SCOPE}.db"
ABLATION_CSV = "ablation.csv"

Dataset = Tuple[Hypergraph, FeatureMatrix, LabelVector]
Command = Callable[[RunContext, argparse.Namespace, Dataset], None]

# flag dest -> location in the RunConfig document
_OVERRIDES: Sequence[Tuple[str, Tuple[str, ...]]] = (
    ("seed", ("train", "master_seed")),
    ("seed", ("splits", "seed")),
    ("epochs", ("train", "epochs")),
    ("lr", ("train", "learning_rate")),
    ("weight_decay", ("train", "weight_decay")),
    ("checkpoint_every", ("train", "checkpoint_every")),
    ("hidden_dim", ("train", "encoder", "hidden_dim")),
    ("proj_dim", ("train", "encoder", "proj_dim")),
    ("layers", ("train", "encoder", "layers")),
    ("tau_node", ("train", "loss", "tau_node")),
    ("tau_edge", ("train", "loss", "tau_edge")),
    ("alpha", ("train", "loss", "alpha")),
    ("augmentation", ("train", "augmentation", "kind")),
    ("sigma", ("train", "augmentation", "sigma")),
    ("flip_prob", ("train", "augmentation", "flip_prob")),
    ("drop_rate", ("train", "augmentation", "drop_rate")),
    ("views", ("train", "augmentation", "num_views")),
    ("splits", ("splits", "num_splits")),
    ("inits", ("splits", "num_inits")),
    ("representation", ("representation",)),
    ("max_c", ("max_c",)),
)
_SWITCHES: Sequence[Tuple[str, Tuple[str, ...]]] = (
    ("no_weak_positive", ("train", "loss", "use_weak_positive")),
    ("no_positive", ("train", "loss", "use_positive")),
    ("no_weak_weight", ("train", "loss", "use_weak_weight")),
    ("no_edge_loss", ("train", "loss", "use_edge_loss")),
)

_LOSS_GRID: Sequence[Tuple[str, Optional[Tuple[str, ...]]]] = (
    ("full", None),
    ("no_weak_positive", ("train", "loss", "use_weak_positive")),
    ("no_positive", ("train", "loss", "use_positive")),
    ("no_weak_weight", ("train", "loss", "use_weak_weight")),
    ("no_edge_loss", ("train", "loss", "use_edge_loss")),
)
_VIEW_COUNTS = (1, 2, 4, 8)


def _set(document: Dict[str, Any], path: Tuple[str, ...], value: Any) -> None:
    for key in path[:-1]:
        document = document.setdefault(key, {})
    document[path[-1]] = value


def read_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = ujson.load(handle)
    except (OSError, ValueError) as ex:
        raise ValueError(f"cannot read config file {path}: {ex}") from ex
    if not isinstance(document, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return document


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """The `--config` file (or defaults) with every given flag applied on top."""
    config_path = getattr(args, "config", None)
    base = RunConfig.model_validate(read_config_file(config_path) if config_path else {})
    document = base.model_dump()
    for dest, path in _OVERRIDES:
        value = getattr(args, dest, None)
        if value is not None:
            _set(document, path, value)
    for dest, path in _SWITCHES:
        if getattr(args, dest, False):
            _set(document, path, False)
    return RunConfig.model_validate(document)


def _variant(config: RunConfig, path: Tuple[str, ...], value: Any) -> RunConfig:
    document = config.model_dump()
    _set(document, path, value)
    return RunConfig.model_validate(document)


def grid_cells(grid: str, config: RunConfig) -> List[Tuple[str, RunConfig]]:
    """The named configurations of an ablation grid; every cell shares the seed."""
    if grid == "loss":
        # each cell switches off one term of the full objective
        document = config.model_dump()
        for _, path in _SWITCHES:
            _set(document, path, True)
        full = RunConfig.model_validate(document)
        if full != config:
            LOG.warning("the loss grid ignores the loss switches of the base config")
        return [
            (name, full if path is None else _variant(full, path, False))
            for name, path in _LOSS_GRID
        ]
    if grid == "augmentation":
        return [
            (kind.value, _variant(config, ("train", "augmentation", "kind"), kind))
            for kind in AugmentationKind
        ]
    if grid == "views":
        return [
            (f"views_{m}", _variant(config, ("train", "augmentation", "num_views"), m))
            for m in _VIEW_COUNTS
        ]
    raise ValueError(f"unknown grid '{grid}'")


def open_checkpoint(location: str) -> Tuple[Checkpoint, Path]:
    """Load `checkpoint.db` from a run directory, or the given `.db` file."""
    path = Path(location)
    db = path / CHECKPOINT_FILE if path.is_dir() else path
    if not db.is_file():
        raise CheckpointException(f"no checkpoint file at {db}")
    transport = SQLiteTransport(base_path=str(db.parent), scope=db.stem)
    try:
        return load_checkpoint(transport), db
    finally:
        transport.close()


def _self_loops(checkpoint: Checkpoint) -> bool:
    return bool(checkpoint.meta.get("encoder", {}).get("self_loops", True))


def _evaluate_embeddings(
    ctx: RunContext, config: RunConfig, embeddings, labels: LabelVector, out_dir: Path
) -> EvalReport:
    payload = {
        "config": config.model_dump(mode="json"),
        "dataset": ctx.manifest.dataset_fingerprint,
    }
    report = linear_evaluate(
        embeddings, labels, config.splits, config.evaluation, fingerprint_payload=payload
    )
    write_eval_report(report, out_dir)
    ctx.store_output(out_dir / EVAL_CSV)
    ctx.store_output(out_dir / EVAL_SUMMARY_JSON)
    return report


def _train_into(
    out_dir: Path, config: RunConfig, data: Dataset
) -> Tuple[TrainResult, Path]:
    h, x, labels = data
    transport = SQLiteTransport(base_path=str(out_dir), scope=CHECKPOINT_SCOPE)
    try:
        result = train(h, x, labels, config.train, run_dir=out_dir, transport=transport)
    finally:
        transport.close()
    return result, Path(transport.path)


def cmd_train(ctx: RunContext, args: argparse.Namespace, data: Dataset) -> None:
    result, checkpoint = _train_into(ctx.out_dir, ctx.config, data)
    ctx.store_output(ctx.path(LOSS_LOG_NAME))
    ctx.store_output(checkpoint)
    print(f"final loss {result.history[-1].total:.6f} after {len(result.history)} epochs")


def cmd_evaluate(ctx: RunContext, args: argparse.Namespace, data: Dataset) -> None:
    h, x, labels = data
    checkpoint, _ = open_checkpoint(args.checkpoint)
    embeddings = node_embeddings(
        h, x, checkpoint.params, _self_loops(checkpoint), ctx.config.representation
    )
    report = _evaluate_embeddings(ctx, ctx.config, embeddings, labels, ctx.out_dir)
    print(f"accuracy {report.mean:.4f} +/- {report.std:.4f} over {len(report.runs)} runs")


def cmd_analyze(ctx: RunContext, args: argparse.Namespace, data: Dataset) -> None:
    h, x, _ = data
    curve = commonality_curve(h, x, ctx.config.max_c)
    path = write_commonality_csv(curve, ctx.path(COMMONALITY_CSV))
    ctx.store_output(path)
    print(f"{len(curve.points)} commonality levels over {curve.total_pairs} node pairs")


def cmd_embed(ctx: RunContext, args: argparse.Namespace, data: Dataset) -> None:
    h, x, _ = data
    checkpoint, _ = open_checkpoint(args.checkpoint)
    embeddings = node_embeddings(
        h, x, checkpoint.params, _self_loops(checkpoint), ctx.config.representation
    )
    path = write_embeddings_csv(embeddings, ctx.path(EMBEDDINGS_CSV))
    ctx.store_output(path)
    print(f"wrote {embeddings.shape[0]} x {embeddings.shape[1]} embeddings to {path}")


def cmd_ablate(ctx: RunContext, args: argparse.Namespace, data: Dataset) -> None:
    h, x, labels = data
    cells = grid_cells(args.grid, ctx.config)

    def run_cell(cell: Tuple[str, RunConfig]) -> Tuple[str, EvalReport]:
        name, config = cell
        cell_dir = ctx.path(name)
        cell_dir.mkdir(parents=True, exist_ok=True)
        LOG.info("ablation cell '%s'", name)
        result, _ = _train_into(cell_dir, config, data)
        embeddings = node_embeddings(
            h, x, result.params, config.train.encoder.self_loops, config.representation
        )
        return name, _evaluate_embeddings(ctx, config, embeddings, labels, cell_dir)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = sorted(pool.map(run_cell, cells), key=lambda item: item[0])

    ranked = sorted(results, key=lambda item: -item[1].mean)
    rows = [
        AblationRow(
            rank=rank,
            cell=name,
            mean=report.mean,
            std=report.std,
            run_count=len(report.runs),
        )
        for rank, (name, report) in enumerate(ranked, start=1)
    ]
    path = ctx.path(ABLATION_CSV)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("rank,cell,mean,std,run_count\n")
        for row in rows:
            handle.write(
                f"{row.rank},{row.cell},{row.mean!r},{row.std!r},{row.run_count}\n"
            )
    ctx.store_output(path)
    for row in rows:
        print(f"{row.rank}. {row.cell}: {row.mean:.4f} +/- {row.std:.4f}")


COMMANDS: Dict[str, Command] = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "ablate": cmd_ablate,
    "embed": cmd_embed,
}


def _augmentation_kind(value: str) -> str:
    return value.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, help="canonical dataset directory")
    common.add_argument(
        "--out", help="run directory (default: a fresh one under the user data dir)"
    )
    common.add_argument("--config", help="JSON configuration file; flags override it")
    common.add_argument("--seed", type=int, help="master seed for every random stream")
    common.add_argument("--verbose", action="store_true", help="log every epoch")

    training = argparse.ArgumentParser(add_help=False)
    group = training.add_argument_group("training")
    group.add_argument("--epochs", type=int)
    group.add_argument("--lr", type=float)
    group.add_argument("--weight-decay", type=float)
    group.add_argument("--checkpoint-every", type=int)
    group.add_argument("--hidden-dim", type=int)
    group.add_argument("--proj-dim", type=int)
    group.add_argument("--layers", type=int)
    group.add_argument("--tau-node", type=float)
    group.add_argument("--tau-edge", type=float)
    group.add_argument("--alpha", type=float)
    group.add_argument(
        "--augmentation",
        type=_augmentation_kind,
        choices=[kind.value for kind in AugmentationKind],
    )
    group.add_argument("--sigma", type=float)
    group.add_argument("--flip-prob", type=float)
    group.add_argument("--drop-rate", type=float)
    group.add_argument("--views", type=int)
    group.add_argument("--no-weak-positive", action="store_true")
    group.add_argument("--no-positive", action="store_true")
    group.add_argument("--no-weak-weight", action="store_true")
    group.add_argument("--no-edge-loss", action="store_true")

    evaluation = argparse.ArgumentParser(add_help=False)
    group = evaluation.add_argument_group("evaluation")
    group.add_argument("--splits", type=int)
    group.add_argument("--inits", type=int)
    group.add_argument(
        "--representation", choices=[r.value for r in Representation]
    )

    checkpoint = argparse.ArgumentParser(add_help=False)
    checkpoint.add_argument(
        "--checkpoint", required=True, help="run directory or checkpoint .db file"
    )

    parser = argparse.ArgumentParser(
        prog="hyfi", description="Hypergraph contrastive learning with weak positives."
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("train", parents=[common, training], help="train an encoder")
    commands.add_parser(
        "evaluate",
        parents=[common, checkpoint, evaluation],
        help="linear evaluation of a checkpoint",
    )
    analyze = commands.add_parser(
        "analyze", parents=[common], help="commonality / feature-similarity curve"
    )
    analyze.add_argument("--max-c", type=int)
    ablate = commands.add_parser(
        "ablate", parents=[common, training, evaluation], help="run an ablation grid"
    )
    ablate.add_argument("--grid", required=True, choices=["loss", "augmentation", "views"])
    ablate.add_argument("--workers", type=int, default=1)
    embed = commands.add_parser(
        "embed", parents=[common, checkpoint], help="export node embeddings"
    )
    embed.add_argument("--representation", choices=[r.value for r in Representation])
    return parser


def _one_line(text: str) -> str:
    return " ".join(str(text).split())


def diagnose(ex: BaseException) -> Tuple[int, str]:
    """Exit status and one-line message for a failed command."""
    if isinstance(ex, ValidationError):
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in ex.errors()
        )
        return EXIT_CONFIG, _one_line(f"ConfigurationError: {problems}")
    if isinstance(ex, DatasetException):
        return EXIT_DATASET, _one_line(str(ex))
    if isinstance(ex, (CheckpointException, DimensionMismatchException)):
        return EXIT_CHECKPOINT, _one_line(str(ex))
    if isinstance(ex, (NonFiniteException, ZeroNormEmbeddingException)):
        return EXIT_NUMERIC, _one_line(str(ex))
    if isinstance(ex, (LossConfigurationException, SplitException)):
        return EXIT_CONFIG, _one_line(str(ex))
    if isinstance(ex, ValueError):
        return EXIT_CONFIG, _one_line(f"ConfigurationError: {ex}")
    if isinstance(ex, HyfiException):
        return EXIT_FAILURE, _one_line(str(ex))
    return EXIT_FAILURE, _one_line(f"{type(ex).__name__}: {ex}")


def run_command(command: str, args: argparse.Namespace) -> int:
    """Run one subcommand end to end and return its exit status."""
    ctx: Optional[RunContext] = None
    try:
        config = resolve_config(args)
        data = load_hypergraph(args.data)
        out_dir = Path(args.out) if args.out else new_run_path(command)
        ctx = RunContext.initialize(
            command, out_dir, config, args.data, getattr(args, "checkpoint", None)
        )
        COMMANDS[command](ctx, args, data)
        ctx.mark_run_success()
        return EXIT_SUCCESS
    except Exception as ex:
        LOG.debug(traceback.format_exc())
        status, message = diagnose(ex)
        if ctx is not None and ctx.run_status is RunStatus.RUNNING:
            ctx.mark_run_failed(message)
        print(f"hyfi {command}: {message}", file=sys.stderr)
        return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.captureWarnings(True)
    return run_command(args.command, args)
