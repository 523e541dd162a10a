"""Configuration constants and defaults for flowcorr."""
from __future__ import annotations

import os
from pathlib import Path

# Flow representation
DEFAULT_FLOW_LEN = 300
DEFAULT_IPD_SCALE = 1000.0  # seconds -> milliseconds
DEFAULT_SIZE_SCALE = 1e-3  # bytes -> kilobytes

# Loss / optimizer
LOSS_EPSILON = 1e-7
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# Training defaults
DEFAULT_LEARNING_RATE = 1e-4
DEFAULT_N_NEG = 199
DEFAULT_EPOCHS = 200
DEFAULT_BATCH_SIZE = 64
EARLY_STOP_PATIENCE = 10
EARLY_STOP_TOLERANCE = 1e-5

# Baselines
DEFAULT_MI_BINS = 8

# Dataset handling
DEFAULT_SPLIT_FRACTION = 0.5

# Synthetic base flows
DEFAULT_PACKET_COUNT = 300
DEFAULT_MEAN_IPD = 0.05
DEFAULT_SIZE_MU = 6.0
DEFAULT_SIZE_SIGMA = 0.6
MIN_PACKET_SIZE = 40
MAX_PACKET_SIZE = 1500

# Relay channel (the noisy stepping-stone setting)
NOISY_JITTER_STD = 0.005
NOISY_DROP_RATE = 0.01

# Checkpoints
CHECKPOINT_FORMAT_VERSION = 1

# File names
PACKETS_FILENAME = "packets.csv"
MANIFEST_FILENAME = "manifest.csv"
SIMULATION_FILENAME = "simulation.json"
RUN_CONFIG_TEMPLATE = "run_config.{subcommand}.json"
LOSS_HISTORY_FILENAME = "loss_history.csv"
SUMMARY_FILENAME = "summary.json"
SCORE_MATRIX_FILENAME = "score_matrix.csv"
PREFIX_SWEEP_FILENAME = "prefix_sweep.csv"
SUBSET_RATES_FILENAME = "subset_rates.csv"
BENCH_FILENAME = "bench.json"

# Benchmark
MIN_BENCH_EVALUATIONS = 100
DEFAULT_BENCH_PAIRS = 100
DEFAULT_BENCH_REPETITIONS = 3
DEFAULT_BENCH_SCALE = 0.01

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def default_jobs() -> int:
    """Worker count used when `--jobs` is not given."""
    return os.cpu_count() or 1


def ensure_dir(path: Path) -> Path:
    """Create `path` (and parents) if needed and return it."""
    path.mkdir(parents=True, exist_ok=True)
    return path
