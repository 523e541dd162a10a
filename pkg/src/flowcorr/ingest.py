"""Packet-record and manifest CSV formats, and train/test dataset assembly."""
from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .models import Dataset, Direction, Flow, PacketRecord, PairManifest, Split, SplitSpec
from .exceptions import ManifestError, PacketFormatError, ParameterError, StorageError

logger = logging.getLogger(__name__)

PACKET_HEADER = ["flow_id", "direction", "ts", "size"]
MANIFEST_HEADER = ["entry_flow_id", "exit_flow_id"]


def _open_rows(path: Path, header: List[str]):
    try:
        handle = Path(path).open("r", encoding="utf-8", newline="")
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e
    reader = csv.reader(handle)
    first = next(reader, None)
    if first is None or [cell.strip() for cell in first] != header:
        handle.close()
        raise PacketFormatError(f"expected header '{','.join(header)}'", line=1)
    return handle, reader


def _parse_timestamp(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise PacketFormatError(f"non-numeric timestamp '{token}'", line, "ts") from None
    if not math.isfinite(value) or value < 0:
        raise PacketFormatError(f"invalid timestamp '{token}'", line, "ts")
    return value


def _parse_size(token: str, line: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise PacketFormatError(f"non-numeric size '{token}'", line, "size") from None
    if value <= 0:
        raise PacketFormatError(f"size must be positive, got '{token}'", line, "size")
    return value


def parse_packet_file(path: Path) -> Dict[str, Flow]:
    """Parse a `flow_id,direction,ts,size` CSV into flows keyed by id.

    Flows keep their first-appearance order; packets are sorted by timestamp (stable).
    """
    records: Dict[str, List[PacketRecord]] = {}
    handle, reader = _open_rows(path, PACKET_HEADER)
    with handle:
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise PacketFormatError(f"expected 4 fields, got {len(row)}", line_no)
            flow_id, token, ts_token, size_token = (cell.strip() for cell in row)
            if not flow_id:
                raise PacketFormatError("empty flow id", line_no, "flow_id")
            try:
                direction = Direction.parse(token)
            except ValueError:
                raise PacketFormatError(f"unknown direction '{token}'", line_no, "direction") from None
            records.setdefault(flow_id, []).append(
                PacketRecord(
                    timestamp=_parse_timestamp(ts_token, line_no),
                    size=_parse_size(size_token, line_no),
                    direction=direction,
                )
            )

    flows = {flow_id: Flow.from_packets(flow_id, packets) for flow_id, packets in records.items()}
    logger.debug("parsed %d flows from %s", len(flows), path)
    return flows


def write_packet_file(flows: Mapping[str, Flow], path: Path) -> None:
    """Write flows in the packet-record format, full float precision."""
    try:
        with Path(path).open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(PACKET_HEADER)
            for flow_id, flow in flows.items():
                for packet in flow.packets:
                    writer.writerow([flow_id, packet.direction.value, repr(packet.timestamp), packet.size])
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e


def parse_manifest(path: Path) -> PairManifest:
    """Parse an `entry_flow_id,exit_flow_id` CSV."""
    pairs = []
    handle, reader = _open_rows(path, MANIFEST_HEADER)
    with handle:
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 or not all(cell.strip() for cell in row):
                raise PacketFormatError("expected two non-empty flow ids", line_no)
            pairs.append((row[0].strip(), row[1].strip()))
    return PairManifest.from_pairs(pairs)


def write_manifest(manifest: PairManifest, path: Path) -> None:
    try:
        with Path(path).open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(MANIFEST_HEADER)
            writer.writerows(manifest.entries)
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e


def split_sizes(n: int, split_fraction: float) -> Tuple[int, int]:
    """`(floor(n * fraction), remainder)`; a 1e-9 slack absorbs binary round-off."""
    n_train = int(math.floor(n * split_fraction + 1e-9))
    return n_train, n - n_train


def assemble_dataset(
    flows: Mapping[str, Flow],
    manifest: PairManifest,
    split_fraction: float,
    seed: int,
    train_size: Optional[int] = None,
) -> Tuple[Dataset, Dataset]:
    """Shuffle associations by `seed` and split them into train and test datasets.

    Whole associations move together, so no flow lands in both splits. `train_size`
    keeps a prefix of the shuffled training pool; the test split is the same for
    every `train_size`.
    """
    if not 0.0 < split_fraction < 1.0:
        raise ParameterError(f"split fraction must lie in (0, 1), got {split_fraction}")
    if len(manifest) == 0:
        raise ParameterError("manifest is empty")
    missing = tuple(fid for fid in manifest.flow_ids() if fid not in flows)
    if missing:
        raise ManifestError("manifest references missing flow ids", missing)

    order = np.random.default_rng(seed).permutation(len(manifest))
    n_train, _ = split_sizes(len(manifest), split_fraction)
    kept = n_train
    if train_size is not None:
        if not 1 <= train_size <= n_train:
            raise ParameterError(f"train size must lie in [1, {n_train}], got {train_size}")
        kept = train_size

    def build(indices, split: Split) -> Dataset:
        entries = tuple(manifest.entries[k] for k in indices)
        subset = {fid: flows[fid] for pair in entries for fid in pair}
        return Dataset(flows=subset, manifest=PairManifest(entries), split=split)

    train = build(order[:kept], Split.TRAIN)
    test = build(order[n_train:], Split.TEST)
    logger.info("split %d associations into %d train / %d test", len(manifest), len(train), len(test))
    return train, test


def assemble_split(flows: Mapping[str, Flow], manifest: PairManifest, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """`assemble_dataset` driven by a stored `SplitSpec`."""
    return assemble_dataset(flows, manifest, spec.fraction, spec.seed, spec.train_size)
