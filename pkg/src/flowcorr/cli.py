"""Command-line entry point."""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .models import BaseFlowModel, ChannelModel, Direction, PresetConfig, PresetKind, RunConfig, ScalingConfig, Split, SplitSpec
from .repositories import CheckpointRepository, ResultsRepository
from .services import BenchmarkService, EvaluationService, SimulationService, TrainingService, resolve_split
from .deepcorr import build_network
from .evaluation import BaselineCorrelator, NetworkCorrelator
from .statcorr import MetricKind
from .config import (
    BENCH_FILENAME,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BENCH_PAIRS,
    DEFAULT_BENCH_REPETITIONS,
    DEFAULT_BENCH_SCALE,
    DEFAULT_EPOCHS,
    DEFAULT_FLOW_LEN,
    DEFAULT_IPD_SCALE,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MEAN_IPD,
    DEFAULT_MI_BINS,
    DEFAULT_N_NEG,
    DEFAULT_PACKET_COUNT,
    DEFAULT_SIZE_SCALE,
    DEFAULT_SPLIT_FRACTION,
    EXIT_DATA,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    NOISY_DROP_RATE,
    NOISY_JITTER_STD,
    default_jobs,
)
from .exceptions import DataError, FlowCorrError, NumericError, ParameterError, ShapeError

__all__ = ["main", "dispatch", "flowcorr_cli"]

console = Console()

PathType = click.Path(path_type=Path)


def _setup_logging(verbose: bool, quiet: bool) -> None:
    root = logging.getLogger("flowcorr")
    root.handlers.clear()
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    root.setLevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)
    root.propagate = False


def _record_run(ctx: click.Context, out_dir: Path, inputs: Sequence[Optional[Path]] = ()) -> RunConfig:
    """Validate input paths, then write the effective configuration into `out_dir`."""
    run = RunConfig(subcommand=ctx.info_name, options=dict(ctx.params))
    run.validate_inputs(inputs)
    ResultsRepository().save_run_config(run, out_dir)
    return run


def _int_list(value: Optional[str], option: str) -> Tuple[int, ...]:
    if not value:
        return ()
    try:
        numbers = tuple(int(token) for token in value.split(",") if token.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'", param_hint=option) from None
    if any(n < 1 for n in numbers):
        raise click.BadParameter("values must be positive", param_hint=option)
    return numbers


def _jobs(jobs: Optional[int]) -> int:
    return jobs or default_jobs()


def _echo_summary(summary: dict) -> None:
    table = Table(title=f"{summary['correlator']} on {summary['connections']} connections")
    table.add_column("metric")
    table.add_column("value", justify="right")
    for key in ("auc", "raptor_accuracy", "tp_at_fp_1e-2", "tp_at_fp_1e-3", "tp_at_eta", "fp_at_eta"):
        if key in summary:
            table.add_row(key, f"{summary[key]:.6f}")
    table.add_row("negative_pairs", str(summary["negative_pairs"]))
    console.print(table)


jobs_option = click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker count (default: all cores).")
seed_option = click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Top-level random seed.")
split_fraction_option = click.option(
    "--split-fraction", type=float, default=DEFAULT_SPLIT_FRACTION, show_default=True,
    help="Fraction of associations used for training.",
)
eval_seed_option = click.option(
    "--seed", type=click.IntRange(min=0), default=None,
    help="Split seed (default: the checkpoint's training split, else 0).",
)
eval_split_fraction_option = click.option(
    "--split-fraction", type=float, default=None,
    help=f"Training fraction of the split (default: the checkpoint's, else {DEFAULT_SPLIT_FRACTION}).",
)


def eval_options(func):
    """Options shared by `eval` and `baseline`."""
    for decorator in reversed([
        click.option("--data", type=PathType, required=True, help="Corpus directory."),
        click.option("--roc", type=PathType, required=True, help="ROC CSV output path."),
        click.option("--out", type=PathType, default=None, help="Output directory (default: the ROC file's)."),
        click.option("--split", "split_name", type=click.Choice(["test", "train", "all"]), default="test", show_default=True),
        eval_split_fraction_option,
        click.option("--eta", type=click.FloatRange(0.0, 1.0), default=0.5, show_default=True, help="Decision threshold."),
        click.option("--prefixes", type=str, default=None, help="Packet counts for a prefix sweep, e.g. 100,200,300."),
        click.option("--subset-sizes", type=str, default=None, help="Test-set sizes for subset rates, e.g. 50,100."),
        eval_seed_option,
        jobs_option,
    ]):
        func = decorator(func)
    return func


@click.group()
@click.option("--config", "config_path", type=PathType, default=None, help="Reuse the options of a run_config.<command>.json.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.option("-q", "--quiet", is_flag=True, help="Warnings only.")
@click.version_option(__version__, prog_name="flowcorr")
@click.pass_context
def flowcorr_cli(ctx: click.Context, config_path: Optional[Path], verbose: bool, quiet: bool) -> None:  # noqa: D401
    """Flow correlation lab: simulate, train, evaluate, compare and benchmark."""
    _setup_logging(verbose, quiet)
    if config_path is not None:
        run = ResultsRepository().load_run_config(config_path)
        if ctx.invoked_subcommand not in (None, run.subcommand):
            raise click.UsageError(
                f"{config_path} records a '{run.subcommand}' run, not '{ctx.invoked_subcommand}'"
            )
        ctx.default_map = {run.subcommand: run.options}


# ===== simulate =====

@flowcorr_cli.command()
@click.option("--pairs", type=click.IntRange(min=1), default=1000, show_default=True, help="Number of connections.")
@click.option("--jitter-std", type=click.FloatRange(min=0.0), default=NOISY_JITTER_STD, show_default=True, help="Laplace jitter std (s).")
@click.option("--drop", type=click.FloatRange(0.0, 1.0), default=NOISY_DROP_RATE, show_default=True, help="Packet drop probability.")
@click.option("--packets", type=click.IntRange(min=1), default=DEFAULT_PACKET_COUNT, show_default=True, help="Packets per base flow.")
@click.option("--mean-ipd", type=click.FloatRange(min=0.0, min_open=True), default=DEFAULT_MEAN_IPD, show_default=True)
@click.option("--out", type=PathType, required=True, help="Output directory.")
@seed_option
@jobs_option
@click.pass_context
def simulate(ctx, pairs, jitter_std, drop, packets, mean_ipd, out, seed, jobs) -> None:
    """Generate a synthetic paired corpus."""
    _record_run(ctx, out)
    channel = ChannelModel(jitter_std=jitter_std, drop_rate=drop)
    base = BaseFlowModel(packet_count=packets, mean_ipd=mean_ipd)
    dataset = SimulationService().simulate_to(out, pairs, base, channel, seed, _jobs(jobs))
    click.echo(f"Wrote {len(dataset)} associations to {out}")


# ===== train =====

@flowcorr_cli.command()
@click.option("--preset", type=click.Choice([k.value for k in PresetKind]), default=PresetKind.TOR.value, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True, help="Multiplier on kernel counts and FC widths.")
@click.option("--flow-len", type=click.IntRange(min=1), default=DEFAULT_FLOW_LEN, show_default=True)
@click.option("--neg", type=click.IntRange(min=0), default=DEFAULT_N_NEG, show_default=True, help="Negatives per entry flow.")
@click.option("--lr", type=float, default=DEFAULT_LEARNING_RATE, show_default=True)
@click.option("--epochs", type=click.IntRange(min=0), default=DEFAULT_EPOCHS, show_default=True)
@click.option("--batch", type=click.IntRange(min=1), default=DEFAULT_BATCH_SIZE, show_default=True)
@click.option("--max-steps", type=click.IntRange(min=0), default=None, help="Stop after this many optimizer steps.")
@click.option("--conv2-height", type=click.Choice(["2", "4"]), default="4", show_default=True)
@click.option("--direction", type=click.Choice([d.value for d in Direction]), default="u", show_default=True, help="IPD direction for the stepping preset.")
@click.option("--ipd-scale", type=float, default=DEFAULT_IPD_SCALE, show_default=True)
@click.option("--size-scale", type=float, default=DEFAULT_SIZE_SCALE, show_default=True)
@click.option("--fixed-negatives", is_flag=True, help="Sample negatives once instead of every epoch.")
@click.option("--data", type=PathType, required=True, help="Corpus directory.")
@click.option("--checkpoint", type=PathType, required=True, help="Checkpoint output path.")
@split_fraction_option
@click.option(
    "--train-size", type=click.IntRange(min=1), default=None,
    help="Train on only this many associations; the test split stays the same.",
)
@seed_option
@click.pass_context
def train(
    ctx, preset, scale, flow_len, neg, lr, epochs, batch, max_steps, conv2_height, direction,
    ipd_scale, size_scale, fixed_negatives, data, checkpoint, split_fraction, train_size, seed,
) -> None:
    """Train a correlation network on the corpus's training split."""
    _record_run(ctx, checkpoint.parent, [data])
    config = PresetConfig.for_preset(
        PresetKind(preset),
        flow_len=flow_len,
        n_neg=neg,
        learning_rate=lr,
        epochs=epochs,
        batch_size=batch,
        max_steps=max_steps,
        conv2_height=int(conv2_height),
        stepping_direction=Direction(direction),
        scaling=ScalingConfig(ipd_scale=ipd_scale, size_scale=size_scale),
        resample_negatives=not fixed_negatives,
        seed=seed,
        scale=scale,
    )
    report = TrainingService().train(
        data, config, checkpoint, split_fraction, train_size=train_size, progress=sys.stderr.isatty(),
    )
    click.echo(f"Trained {report}")
    click.echo(f"Checkpoint written to {checkpoint}")


# ===== eval / baseline =====

def _run_evaluation(correlator, data, roc, out, split_name, spec, eta, prefixes, subset_sizes, jobs):
    out = out or roc.parent
    prefix_list = _int_list(prefixes, "--prefixes")
    size_list = _int_list(subset_sizes, "--subset-sizes")
    service = EvaluationService()
    split = Split.CORPUS if split_name == "all" else Split(split_name)
    dataset = service.load_split(data, split, spec)
    summary = service.evaluate(
        correlator, dataset, roc, out, eta=eta, jobs=_jobs(jobs),
        prefixes=prefix_list, subset_sizes=size_list, seed=spec.seed, progress=sys.stderr.isatty(),
    )
    _echo_summary(summary)


@flowcorr_cli.command("eval")
@click.option("--checkpoint", type=PathType, required=True, help="Trained checkpoint.")
@eval_options
@click.pass_context
def eval_(ctx, checkpoint, data, roc, out, split_name, split_fraction, eta, prefixes, subset_sizes, seed, jobs) -> None:
    """Score all test pairs with a checkpoint; write ROC, score matrix and summary.

    The split defaults to the one the checkpoint was trained on.
    """
    _record_run(ctx, out or roc.parent, [checkpoint, data])
    net = CheckpointRepository().load(checkpoint)
    spec = resolve_split(net.split, seed, split_fraction)
    _run_evaluation(NetworkCorrelator(net), data, roc, out, split_name, spec, eta, prefixes, subset_sizes, jobs)


@flowcorr_cli.command()
@click.option("--metric", type=click.Choice([m.value for m in MetricKind]), default="pearson", show_default=True)
@click.option("--flow-len", type=click.IntRange(min=1), default=DEFAULT_FLOW_LEN, show_default=True)
@click.option("--bins", type=click.IntRange(min=2), default=DEFAULT_MI_BINS, show_default=True, help="Histogram bins for mi.")
@eval_options
@click.pass_context
def baseline(ctx, metric, flow_len, bins, data, roc, out, split_name, split_fraction, eta, prefixes, subset_sizes, seed, jobs) -> None:
    """Same outputs as `eval`, scored with a statistical metric."""
    _record_run(ctx, out or roc.parent, [data])
    correlator = BaselineCorrelator(MetricKind.parse(metric), flow_len=flow_len, bins=bins)
    spec = resolve_split(None, seed, split_fraction)
    _run_evaluation(correlator, data, roc, out, split_name, spec, eta, prefixes, subset_sizes, jobs)


# ===== bench =====

@flowcorr_cli.command()
@click.option("--checkpoint", type=PathType, default=None, help="Checkpoint to time (default: an untrained preset).")
@click.option("--preset", type=click.Choice([k.value for k in PresetKind]), default=PresetKind.TOR.value, show_default=True)
@click.option("--scale", type=float, default=DEFAULT_BENCH_SCALE, show_default=True, help="Width multiplier; 1.0 is the full preset.")
@click.option("--flow-len", type=click.IntRange(min=1), default=DEFAULT_FLOW_LEN, show_default=True)
@click.option("--conv2-height", type=click.Choice(["2", "4"]), default="4", show_default=True)
@click.option("--data", type=PathType, default=None, help="Corpus directory (default: simulated pairs).")
@click.option("--pairs", type=click.IntRange(min=1), default=DEFAULT_BENCH_PAIRS, show_default=True)
@click.option("--repetitions", type=click.IntRange(min=1), default=DEFAULT_BENCH_REPETITIONS, show_default=True)
@click.option("--out", type=PathType, default=Path("."), show_default=True, help="Output directory.")
@seed_option
@jobs_option
@click.pass_context
def bench(ctx, checkpoint, preset, scale, flow_len, conv2_height, data, pairs, repetitions, out, seed, jobs) -> None:
    """Time one correlation for the network and each baseline."""
    _record_run(ctx, out, [checkpoint, data])
    service = BenchmarkService()
    if checkpoint is not None:
        net = CheckpointRepository().load(checkpoint)
    else:
        config = PresetConfig.for_preset(
            PresetKind(preset), flow_len=flow_len, conv2_height=int(conv2_height), scale=scale, seed=seed,
        )
        net = build_network(config)
    if data is not None:
        dataset = EvaluationService().load_split(data, Split.CORPUS, SplitSpec(seed=seed))
    else:
        dataset = service.bench_pairs(pairs, seed, _jobs(jobs))
    reports = service.run(service.correlators(net), dataset, repetitions, out / BENCH_FILENAME)

    table = Table(title=f"Per-correlation time over {len(dataset)} pairs")
    table.add_column("correlator")
    table.add_column("mean (ms)", justify="right")
    table.add_column("p95 (ms)", justify="right")
    table.add_column("evaluations", justify="right")
    for report in reports:
        table.add_row(report.name, f"{report.mean * 1e3:.3f}", f"{report.p95 * 1e3:.3f}", str(report.evaluations))
    console.print(table)


# ===== entry =====

def _fail(error: object) -> None:
    click.echo(f"Error: {error}", err=True)


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and map failures to exit codes: 1 usage, 2 data or memory, 3 numeric."""
    try:
        result = flowcorr_cli.main(args=argv, prog_name="flowcorr", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        _fail("aborted")
        return EXIT_USAGE
    except ParameterError as e:
        _fail(e)
        return EXIT_USAGE
    except (DataError, ShapeError) as e:
        _fail(e)
        return EXIT_DATA
    except NumericError as e:
        _fail(e)
        return EXIT_NUMERIC
    except MemoryError:
        _fail("out of memory; try a smaller --scale (or fewer --pairs)")
        return EXIT_DATA
    except FlowCorrError as e:
        _fail(e)
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(dispatch())
