import pytest

from flowcorr.exceptions import DataError, ManifestError, PacketFormatError, ParameterError
from flowcorr.ingest import (
    assemble_dataset,
    assemble_split,
    parse_manifest,
    parse_packet_file,
    split_sizes,
    write_manifest,
    write_packet_file,
)
from flowcorr.models import Direction, Flow, PacketRecord, PairManifest, Split, SplitSpec


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_single_flow(tmp_path):
    path = write(tmp_path / "p.csv", "flow_id,direction,ts,size\nf1,u,0.0,100\nf1,d,0.5,200\nf1,u,0.25,50\n")
    flows = parse_packet_file(path)
    assert list(flows) == ["f1"]
    flow = flows["f1"]
    assert len(flow) == 3
    ts, sizes = flow.direction(Direction.UPSTREAM)
    assert ts.tolist() == [0.0, 0.25]
    assert sizes.tolist() == [100, 50]


def test_header_only_is_empty(tmp_path):
    assert parse_packet_file(write(tmp_path / "p.csv", "flow_id,direction,ts,size\n")) == {}


def test_unknown_direction_names_line(tmp_path):
    path = write(tmp_path / "p.csv", "flow_id,direction,ts,size\nf1,u,0.1,100\nf1,x,0.5,100\n")
    with pytest.raises(PacketFormatError, match=r"unknown direction 'x' at line 3"):
        parse_packet_file(path)


@pytest.mark.parametrize(
    "line, field",
    [
        ("f1,u,abc,100", "ts"),
        ("f1,u,0.5,big", "size"),
        ("f1,u,0.5,0", "size"),
        ("f1,u,-1,10", "ts"),
    ],
)
def test_bad_fields_name_the_field(tmp_path, line, field):
    path = write(tmp_path / "p.csv", f"flow_id,direction,ts,size\n{line}\n")
    with pytest.raises(PacketFormatError) as info:
        parse_packet_file(path)
    assert info.value.line == 2
    assert info.value.field == field


def test_wrong_field_count(tmp_path):
    path = write(tmp_path / "p.csv", "flow_id,direction,ts,size\nf1,u,0.5\n")
    with pytest.raises(PacketFormatError, match="line 2"):
        parse_packet_file(path)


def test_bad_header(tmp_path):
    with pytest.raises(PacketFormatError, match="line 1"):
        parse_packet_file(write(tmp_path / "p.csv", "id,dir,t,s\n"))


def test_round_trip_preserves_flows(tmp_path, small_dataset):
    path = tmp_path / "packets.csv"
    write_packet_file(small_dataset.flows, path)
    parsed = parse_packet_file(path)
    assert list(parsed) == list(small_dataset.flows)
    for flow_id, flow in small_dataset.flows.items():
        assert parsed[flow_id] == flow


def test_manifest_round_trip(tmp_path):
    manifest = PairManifest.from_pairs([("a", "b"), ("c", "d")])
    path = tmp_path / "manifest.csv"
    write_manifest(manifest, path)
    assert path.read_text(encoding="utf-8") == "entry_flow_id,exit_flow_id\na,b\nc,d\n"
    assert parse_manifest(path) == manifest


def test_manifest_rejects_reused_ids():
    with pytest.raises(ManifestError):
        PairManifest.from_pairs([("a", "b"), ("a", "c")])


@pytest.mark.parametrize("n, fraction, expected", [(100, 0.5, (50, 50)), (10, 0.8, (8, 2)), (2500, 0.8, (2000, 500))])
def test_split_sizes(n, fraction, expected):
    assert split_sizes(n, fraction) == expected


def test_assemble_dataset_partitions(small_dataset):
    train, test = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9)
    assert (len(train), len(test)) == (6, 6)
    assert train.split is Split.TRAIN and test.split is Split.TEST
    assert not set(train.flows) & set(test.flows)
    assert set(train.manifest.entries) | set(test.manifest.entries) == set(small_dataset.manifest.entries)


def test_assemble_dataset_is_deterministic(small_dataset):
    first = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9)
    second = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9)
    assert first[0].manifest == second[0].manifest
    assert first[1].manifest == second[1].manifest


@pytest.mark.parametrize("fraction", [0.0, 1.0, -0.5])
def test_assemble_dataset_rejects_bad_fraction(small_dataset, fraction):
    with pytest.raises(ParameterError):
        assemble_dataset(small_dataset.flows, small_dataset.manifest, fraction, seed=0)


def test_assemble_dataset_lists_missing_ids(small_dataset):
    manifest = PairManifest.from_pairs(list(small_dataset.manifest.entries) + [("ghost-in", "ghost-out")])
    with pytest.raises(ManifestError, match="ghost-in"):
        assemble_dataset(small_dataset.flows, manifest, 0.5, seed=0)


def test_assemble_dataset_rejects_empty_manifest(small_dataset):
    with pytest.raises(ParameterError):
        assemble_dataset(small_dataset.flows, PairManifest(), 0.5, seed=0)


def test_train_size_keeps_test_split_fixed(small_dataset):
    full_train, full_test = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9)
    for size in (1, 3, 6):
        train, test = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9, train_size=size)
        assert test.manifest == full_test.manifest
        assert len(train) == size
        assert train.manifest.entries == full_train.manifest.entries[:size]


@pytest.mark.parametrize("size", [0, 7])
def test_train_size_must_fit_training_pool(small_dataset, size):
    with pytest.raises(ParameterError):
        assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9, train_size=size)


def test_assemble_split_follows_spec(small_dataset):
    spec = SplitSpec(seed=9, fraction=0.5, train_size=4)
    train, test = assemble_split(small_dataset.flows, small_dataset.manifest, spec)
    expected = assemble_dataset(small_dataset.flows, small_dataset.manifest, 0.5, seed=9, train_size=4)
    assert (train.manifest, test.manifest) == (expected[0].manifest, expected[1].manifest)


def test_split_spec_round_trip_and_validation():
    spec = SplitSpec(seed=7, fraction=0.8, train_size=100)
    assert SplitSpec.from_dict(spec.to_dict()) == spec
    assert SplitSpec.from_dict({}) == SplitSpec()
    with pytest.raises(ParameterError):
        SplitSpec(fraction=1.0)
    with pytest.raises(ParameterError):
        SplitSpec(train_size=0)


def test_packet_records_build_sorted_flows():
    packets = [
        PacketRecord(timestamp=0.5, size=200, direction=Direction.DOWNSTREAM),
        PacketRecord(timestamp=0.0, size=100, direction=Direction.UPSTREAM),
        PacketRecord(timestamp=0.25, size=50, direction=Direction.UPSTREAM),
    ]
    flow = Flow.from_packets("f", packets)
    assert flow.timestamps.tolist() == [0.0, 0.25, 0.5]
    assert flow.packets == sorted(packets, key=lambda p: p.timestamp)


@pytest.mark.parametrize("timestamp, size", [(-0.1, 10), (0.0, 0)])
def test_packet_record_validation(timestamp, size):
    with pytest.raises(DataError):
        PacketRecord(timestamp=timestamp, size=size, direction=Direction.UPSTREAM)
