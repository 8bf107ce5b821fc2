import logging

import numpy as np
import pytest

from cascade_bandits.exceptions import DataError
from cascade_bandits.ingestion import (
    binarize,
    load_ratings,
    parse_ratings,
    read_matrix,
    select_top,
    select_top_indices,
    write_matrix,
)
from cascade_bandits.items import GREATER_THAN_THRESHOLD, PRESENCE, BinarizeRule, FeedbackMatrix, RatingTriple

MOVIELENS_BITS = [
    [1, 0, 1, 0, 0, 0],
    [1, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 0],
    [0, 1, 0, 1, 0, 0],
    [1, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 0, 1],
    [0, 0, 1, 0, 1, 0],
    [1, 0, 0, 0, 0, 1],
]


# ---------- parsing ----------
def test_parse_tab_lines_with_optional_timestamp():
    triples, rejects = parse_ratings(["1\t10\t5\n", "2\t11\t3\t881250949\n"], "tab")
    assert triples == [RatingTriple("1", "10", 5.0), RatingTriple("2", "11", 3.0)]
    assert rejects == []


def test_parse_reports_bad_lines_by_number():
    lines = ["u,i,4", "u,i", "u,i,x", "", "u,i,1,2,3", "u,,2"]
    triples, rejects = parse_ratings(lines, "comma")
    assert len(triples) == 1
    assert [r.line for r in rejects] == [2, 3, 5, 6]


def test_parse_rejects_non_finite_ratings():
    triples, rejects = parse_ratings(["a::b::nan", "a::b::inf::1"], "double-colon")
    assert triples == []
    assert len(rejects) == 2


def test_unknown_delimiter():
    with pytest.raises(DataError, match="unknown delimiter"):
        parse_ratings(["a|b|1"], "pipe")


def test_load_movielens_file(data_dir):
    triples = load_ratings(data_dir / "ratings.dat", "double-colon")
    assert len(triples) == 24
    assert triples[0] == RatingTriple("1", "10", 5.0)


def test_load_csv_skips_header_and_bad_rows(data_dir, caplog):
    with caplog.at_level(logging.WARNING):
        triples = load_ratings(data_dir / "ratings.csv", "comma")
    assert len(triples) == 6
    assert triples[-1] == RatingTriple("dave", "pizzeria", 2.0)
    assert "Rejected 2 malformed lines" in caplog.text
    assert "line 5" in caplog.text


def test_file_without_valid_ratings(tmp_path):
    path = tmp_path / "broken.tsv"
    path.write_text("a\tb\nc\td\n", encoding="utf-8")
    with pytest.raises(DataError, match="no valid ratings"):
        load_ratings(path, "tab")


def test_missing_file_raises_os_error(tmp_path):
    with pytest.raises(OSError):
        load_ratings(tmp_path / "missing.dat", "double-colon")


# ---------- binarization ----------
def test_threshold_binarization_of_movielens_sample(data_dir):
    triples = load_ratings(data_dir / "ratings.dat", "double-colon")
    binarized = binarize(triples, BinarizeRule(GREATER_THAN_THRESHOLD, 3.0))
    np.testing.assert_array_equal(binarized.matrix.bits, MOVIELENS_BITS)
    assert list(binarized.item_index) == ["10", "11", "12", "13", "14", "15"]
    assert binarized.user_index["8"] == 7


def test_threshold_is_strict():
    triples = [RatingTriple("u", "a", 3.0), RatingTriple("u", "b", 3.5)]
    bits = binarize(triples, BinarizeRule(GREATER_THAN_THRESHOLD, 3.0)).matrix.bits
    np.testing.assert_array_equal(bits, [[0, 1]])


def test_presence_rule(data_dir):
    triples = load_ratings(data_dir / "ratings.tsv", "tab")
    bits = binarize(triples, BinarizeRule(PRESENCE)).matrix.bits
    np.testing.assert_array_equal(bits, [
        [1, 1, 0, 0],
        [1, 0, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ])


def test_duplicate_pairs_are_or_combined():
    triples = [RatingTriple("u", "a", 5.0), RatingTriple("u", "a", 1.0), RatingTriple("v", "a", 1.0)]
    bits = binarize(triples, BinarizeRule(GREATER_THAN_THRESHOLD, 3.0)).matrix.bits
    np.testing.assert_array_equal(bits, [[1], [0]])


def test_unknown_rule_is_rejected():
    with pytest.raises(DataError):
        BinarizeRule("at_least", 3.0)


def test_empty_ratings_cannot_be_binarized():
    with pytest.raises(DataError):
        binarize([], BinarizeRule())


# ---------- reduction ----------
def test_select_top_keeps_zero_rows_last():
    kept = select_top(FeedbackMatrix(np.eye(3, dtype=np.uint8)), 2, 3)
    np.testing.assert_array_equal(kept.bits, [[1, 0], [0, 1], [0, 0]])


def test_select_top_prefers_popular_items_and_active_users():
    W = FeedbackMatrix(MOVIELENS_BITS)
    rows, cols = select_top_indices(W, 2, 3)
    np.testing.assert_array_equal(cols, [0, 2])
    np.testing.assert_array_equal(rows, [0, 1, 4])
    assert select_top(W, 2, 3).bits.shape == (3, 2)


def test_select_top_limits_larger_than_matrix():
    W = FeedbackMatrix(MOVIELENS_BITS)
    np.testing.assert_array_equal(select_top(W, 100, 100).bits, W.bits)


def test_select_top_rejects_zero_limits():
    with pytest.raises(DataError):
        select_top(FeedbackMatrix(MOVIELENS_BITS), 0, 3)


# ---------- matrix CSV ----------
def test_read_matrix_fixture(data_dir):
    W, item_ids = read_matrix(data_dir / "matrix.csv")
    assert item_ids == ["a", "b", "c", "d"]
    assert W.bits.shape == (5, 4)
    assert W.bits[:, 0].sum() == 3


def test_written_matrix_reads_back(tmp_path):
    W = FeedbackMatrix(MOVIELENS_BITS)
    path = write_matrix(W, [10, 11, 12, 13, 14, 15], tmp_path / "nested" / "W.csv")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "10,11,12,13,14,15"
    back, ids = read_matrix(path)
    np.testing.assert_array_equal(back.bits, W.bits)
    assert ids == ["10", "11", "12", "13", "14", "15"]


def test_matrix_with_bad_entries(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(DataError):
        read_matrix(path)


def test_write_matrix_checks_id_count(tmp_path):
    with pytest.raises(DataError):
        write_matrix(FeedbackMatrix([[1, 0]]), ["only"], tmp_path / "W.csv")


def test_empty_file(tmp_path):
    path = tmp_path / "empty.dat"
    path.write_text("", encoding="utf-8")
    with pytest.raises(DataError):
        load_ratings(path, "double-colon")


def test_select_top_hand_counted_columns():
    W = FeedbackMatrix([[1, 0, 1], [1, 1, 1], [1, 0, 0]])
    rows, cols = select_top_indices(W, 2, 3)
    np.testing.assert_array_equal(cols, [0, 2])
    assert select_top(W, 2, 3).bits.shape == (3, 2)


@pytest.mark.parametrize("rule", [BinarizeRule(GREATER_THAN_THRESHOLD, 3.0), BinarizeRule(PRESENCE)])
def test_binarized_file_matches_its_source_matrix(tmp_path, rule):
    rng = np.random.default_rng(8)
    ratings = rng.integers(1, 6, size=(6, 5))
    seen = rng.random((6, 5)) < 0.6
    seen[:, 0] = True
    seen[0, :] = True
    lines = [f"u{i}\ti{j}\t{ratings[i, j]}" for i in range(6) for j in range(5) if seen[i, j]]
    path = tmp_path / "ratings.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    binarized = binarize(load_ratings(path, "tab"), rule)
    expected = seen & (ratings > 3) if rule.kind == GREATER_THAN_THRESHOLD else seen
    assert binarized.user_index == {f"u{i}": i for i in range(6)}
    assert binarized.item_index == {f"i{j}": j for j in range(5)}
    np.testing.assert_array_equal(binarized.matrix.bits, expected.astype(np.uint8))
