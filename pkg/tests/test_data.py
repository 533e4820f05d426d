import os

import pytest

from offtweet.data import (
    LabeledTweet,
    atomic_write,
    hierarchical_filter,
    read_tsv,
    task_targets,
    write_predictions,
)
from offtweet.errors import DataError

HEADER = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n"


def _write(tmp_path, body, header=HEADER):
    p = tmp_path / "data.tsv"
    p.write_text(header + body)
    return str(p)


def test_read_tsv_parses_labels_and_nulls(tmp_path):
    path = _write(
        tmp_path,
        "1\thello there\tNOT\tNULL\tNULL\n"
        "2\tbad words\tOFF\tTIN\tIND\n"
        "3\tmild words\tOFF\tUNT\tNULL\n",
    )
    rows = read_tsv(path)
    assert [t.id for t in rows] == ["1", "2", "3"]
    assert rows[0].label_a == "NOT" and rows[0].label_b is None
    assert rows[1].label_c == "IND"
    assert rows[2].label_b == "UNT" and rows[2].label_c is None


def test_read_tsv_errors_name_lines(tmp_path):
    path = _write(tmp_path, "1\tok\tNOT\tNULL\tNULL\n2\tonly-two-fields\n")
    with pytest.raises(DataError, match="line 3"):
        read_tsv(path)
    bad_header = _write(tmp_path, "", header="foo\tbar\n")
    with pytest.raises(DataError, match="line 1"):
        read_tsv(bad_header)
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    with pytest.raises(DataError, match="empty"):
        read_tsv(str(empty))


def test_read_tsv_rejects_bad_label_values(tmp_path):
    path = _write(tmp_path, "1\ttext\tMAYBE\tNULL\tNULL\n")
    with pytest.raises(DataError, match="line 2"):
        read_tsv(path)


def test_label_hierarchy_enforced():
    LabeledTweet("1", "x", "OFF", "TIN", "GRP")
    with pytest.raises(DataError):
        LabeledTweet("1", "x", "NOT", "TIN", None)  # B requires OFF
    with pytest.raises(DataError):
        LabeledTweet("1", "x", "OFF", "UNT", "IND")  # C requires TIN
    with pytest.raises(DataError):
        LabeledTweet("1", "x", None, "TIN", None)


def test_unlabeled_rows_allowed(tmp_path):
    path = _write(tmp_path, "9\tjust text\tNULL\tNULL\tNULL\n")
    rows = read_tsv(path)
    assert rows[0].label_a is None


def test_short_header_prefix_accepted(tmp_path):
    p = tmp_path / "two.tsv"
    p.write_text("id\ttweet\n7\tsome text\n")
    rows = read_tsv(str(p))
    assert rows[0].id == "7" and rows[0].label_a is None


def test_hierarchical_filter_and_targets():
    rows = [
        LabeledTweet("1", "a", "NOT"),
        LabeledTweet("2", "b", "OFF", "TIN", "IND"),
        LabeledTweet("3", "c", "OFF", "UNT"),
    ]
    assert len(hierarchical_filter(rows, "A")) == 3
    assert [t.id for t in hierarchical_filter(rows, "B")] == ["2", "3"]
    assert [t.id for t in hierarchical_filter(rows, "C")] == ["2"]
    assert task_targets(hierarchical_filter(rows, "A"), "A") == [0, 1, 1]
    # class 1 is the "positive" label for both binary tasks (OFF, TIN)
    assert task_targets(hierarchical_filter(rows, "B"), "B") == [1, 0]
    with pytest.raises(ValueError):
        hierarchical_filter(rows, "Z")
    with pytest.raises(DataError):
        task_targets(rows, "C")  # row 1/3 have no C label


def test_atomic_write_replaces_only_on_success(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old")
    with pytest.raises(RuntimeError):
        with atomic_write(str(target)) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert target.read_text() == "old"
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    with atomic_write(str(target)) as fh:
        fh.write("new")
    assert target.read_text() == "new"


def test_atomic_write_respects_umask(tmp_path):
    target = str(tmp_path / "mode.txt")
    old = os.umask(0o022)
    try:
        with atomic_write(target) as fh:
            fh.write("x")
    finally:
        os.umask(old)
    assert os.stat(target).st_mode & 0o777 == 0o644


def test_write_predictions_format(tmp_path):
    path = str(tmp_path / "preds.tsv")
    write_predictions(path, [("10", "OFF", 0.9123456789)], config_echo=["SEED = 1"])
    lines = open(path).read().splitlines()
    assert lines[0] == "# SEED = 1"
    assert lines[1] == "id\tlabel\tprobability"
    assert lines[2] == "10\tOFF\t0.912346"
