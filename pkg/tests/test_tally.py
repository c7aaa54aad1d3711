from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from gtinfer.errors import ConfigurationError, ParseError, PreconditionError
from gtinfer.fixtures import TWONORM
from gtinfer.tally import (
    DecisionCounts,
    VoteMatrix,
    all_patterns,
    flip_pattern,
    marginalize_truth,
    parse_label_map,
    parse_votes,
    project_subset,
    tally_counts,
)

from strategies import vote_matrices


def test_parse_five_rows():
    text = "c1,c2,c3\n0,0,1\n1,1,1\n0,1,0\n0,0,0\n1,0,1\n"
    votes = parse_votes(text)
    assert len(votes) == 5
    assert votes.classifier_ids == ("c1", "c2", "c3")
    assert list(votes.rows) == ["aab", "bbb", "aba", "aaa", "bab"]
    assert votes.truth is None


def test_parse_truth_column():
    votes = parse_votes("c1,y,c2\n0,1,1\n1,0,1\n", truth_column="y")
    assert list(votes.truth) == ["b", "a"]
    assert list(votes.rows) == ["ab", "bb"]


def test_bad_cell_names_row_and_column():
    with pytest.raises(ParseError) as err:
        parse_votes("c1,c2\n0,1\n0,2\n")
    assert err.value.row == 3 and err.value.column == "c2"


@pytest.mark.parametrize("text", ["", "c1,c1\n0,0\n", "c1,c2\n0\n"])
def test_malformed_files(text):
    with pytest.raises(ParseError):
        parse_votes(text)


def test_unknown_truth_column():
    with pytest.raises(ConfigurationError):
        parse_votes("c1,c2\n0,1\n", truth_column="truth")


def test_custom_label_map():
    votes = parse_votes("x,y\nyes,no\n", label_map=parse_label_map("yes=a,no=b"))
    assert list(votes.rows) == ["ab"]


@pytest.mark.parametrize("spec", ["0=a", "0=c,1=b", "0a,1b"])
def test_bad_label_map(spec):
    with pytest.raises(ConfigurationError):
        parse_label_map(spec)


def test_tally_hand_example():
    counts = tally_counts(VoteMatrix(("c1", "c2", "c3"), ["aaa", "aaa", "aba"]))
    assert counts.counts == {"aaa": 2, "aba": 1}
    assert counts.total == 3
    assert counts.by_truth is None


def test_tally_empty():
    counts = tally_counts(VoteMatrix(("c1", "c2"), []))
    assert counts.total == 0
    assert counts.dense() == [0, 0, 0, 0]


def test_fixture_replay_matches_table():
    expected = TWONORM.counts()
    rows, truth = [], []
    for lab in "ab":
        for pattern, m in expected.by_truth[lab].items():
            rows += [pattern] * m
            truth += [lab] * m
    replay = tally_counts(VoteMatrix(TWONORM.classifiers, rows, truth))
    assert replay.by_truth == expected.by_truth


def test_marginalize_table_rows():
    # twonorm votes are complemented, so table row 0000 is pattern bbbb
    observed = marginalize_truth(TWONORM.counts())
    assert observed["bbbb"] == 4 + 1330
    assert observed["aaaa"] == 1172 + 1
    assert observed.by_truth is None


def test_marginalize_needs_truth():
    with pytest.raises(PreconditionError):
        marginalize_truth(DecisionCounts(2, {"ab": 1}))


def test_marginalize_all_zero():
    counts = DecisionCounts.from_by_truth(3, {"a": {}, "b": {}})
    assert marginalize_truth(counts).total == 0


def test_project_hand_example():
    assert project_subset(DecisionCounts(3, {"aab": 2, "abb": 3}), (0, 1)).counts == {"aa": 2, "ab": 3}


def test_project_preserves_mass():
    counts = TWONORM.counts()
    sub = project_subset(counts, (0, 1, 2))
    assert sub.n == 3 and len(sub.dense()) == 8
    assert sub.total == counts.total


@pytest.mark.parametrize("subset", [(1, 1, 2), (0, 4), ()])
def test_project_rejects_bad_subset(subset):
    with pytest.raises(PreconditionError):
        project_subset(TWONORM.counts(), subset)


@pytest.mark.parametrize("counts, by_truth", [
    ({"ab": -1}, None),
    ({"abc": 1}, None),
    ({"ab": 1.5}, None),
    ({"ab": 2}, {"a": {"ab": 1}, "b": {}}),
])
def test_counts_validation(counts, by_truth):
    with pytest.raises(PreconditionError):
        DecisionCounts(2, counts, by_truth)


def test_zeros_are_dropped():
    assert DecisionCounts(2, {"aa": 0, "bb": 3}).counts == {"bb": 3}


def test_all_patterns_order():
    assert all_patterns(2) == ["aa", "ab", "ba", "bb"]
    assert flip_pattern("aab") == "bba"


@given(vote_matrices())
def test_marginalize_equals_truthless_tally(votes):
    with_truth = tally_counts(votes)
    without = tally_counts(VoteMatrix(votes.classifier_ids, votes.rows))
    assert marginalize_truth(with_truth) == without
    assert with_truth.total == len(votes)


@given(vote_matrices(), st.data())
def test_projection_commutes_with_marginalization(votes, data):
    subset = data.draw(st.permutations(range(votes.n)).flatmap(
        lambda p: st.integers(1, len(p)).map(lambda k: tuple(p[:k]))))
    counts = tally_counts(votes)
    left = marginalize_truth(project_subset(counts, subset))
    right = project_subset(marginalize_truth(counts), subset)
    assert left == right
    assert left.total == counts.total


@given(vote_matrices(n=3), vote_matrices(n=3))
@settings(max_examples=50)
def test_sharded_tally_merges(a, b):
    merged = VoteMatrix(a.classifier_ids, list(a.rows) + list(b.rows), list(a.truth) + list(b.truth))
    assert tally_counts(a) + tally_counts(b) == tally_counts(merged)
    assert tally_counts(b) + tally_counts(a) == tally_counts(merged)


@given(vote_matrices())
def test_csv_round_trip(votes):
    back = parse_votes(votes.to_csv(), truth_column="truth")
    assert tally_counts(back) == tally_counts(votes)
    assert Counter(back.rows) == Counter(votes.rows)
