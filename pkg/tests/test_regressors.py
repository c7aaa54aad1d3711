import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gtinfer.errors import ConfigurationError, ParseError, PreconditionError
from gtinfer.regressors import (
    RegressorPanel,
    consistency_constraints,
    error_covariance_truth,
    mixed_moment_test,
    pairwise_matrix,
    pairwise_stat,
    parse_predictions,
    solve_trio_regressors,
)
from gtinfer.simulate import orthogonal_columns, sample_regressor_panel

def _panel(preds, truth=None):
    preds = np.asarray(preds, dtype=float)
    return RegressorPanel(tuple(f"r{i + 1}" for i in range(preds.shape[1])), preds, truth)


def _orthogonal_panel(variances, size=64, truth=None):
    noise = orthogonal_columns(size, len(variances)) * np.sqrt(variances)
    y = np.zeros(size) if truth is None else truth
    return _panel(y[:, None] - noise, y)


def test_identical_columns():
    col = np.linspace(-1, 3, 11)
    panel = _panel(np.column_stack([col, col, col]))
    assert pairwise_stat(panel, 0, 1) == 0
    assert solve_trio_regressors(panel, (0, 1, 2)).diag == (0.0, 0.0, 0.0)


def test_shifted_columns():
    col = np.linspace(-1, 3, 11)
    assert pairwise_stat(_panel(np.column_stack([col, col + 7.5])), 0, 1) == pytest.approx(0, abs=1e-14)


def test_orthogonal_pair():
    panel = _orthogonal_panel([1.0, 4.0], size=16, truth=np.arange(16.0))
    assert pairwise_stat(panel, 0, 1) == 5.0


def test_orthogonal_trio():
    panel = _orthogonal_panel([1.0, 4.0, 9.0], truth=np.arange(64.0) % 7)
    assert [pairwise_stat(panel, *p) for p in ((0, 1), (0, 2), (1, 2))] == [5.0, 10.0, 13.0]
    est = solve_trio_regressors(panel, (0, 1, 2))
    assert est.diag == (1.0, 4.0, 9.0) and est.feasible
    raw, centered = error_covariance_truth(panel)
    assert np.array_equal(raw, np.diag([1.0, 4.0, 9.0]))
    assert np.array_equal(centered, raw)


def test_shared_noise_is_flagged():
    rng = np.random.default_rng(3)
    size = 2000
    truth = rng.normal(size=size)
    shared = rng.normal(size=size)
    preds = np.column_stack([truth - shared, truth - shared + 0.1 * rng.normal(size=size),
                             truth - 0.5 * rng.normal(size=size)])
    panel = _panel(preds, truth)
    est = solve_trio_regressors(panel, (0, 1, 2))
    _, eps = error_covariance_truth(panel)
    # the shared noise hides in the cross term, so the first two variances collapse toward 0
    assert est.diag[0] < 0.05 and eps[0, 0] > 0.9
    assert abs(est.diag[2] - eps[2, 2]) > 0.9


def test_duplicated_regressor_breaks_constraints():
    rng = np.random.default_rng(4)
    truth = rng.normal(size=500)
    noise = rng.normal(size=(500, 3))
    preds = np.column_stack([truth - noise[:, 0], truth - noise[:, 1], truth - noise[:, 2], truth - noise[:, 1]])
    got = consistency_constraints(_panel(preds, truth), (0, 1, 2, 3))
    assert max(abs(v) for v in got.values()) > 0.5


def test_identical_quad():
    col = np.sin(np.arange(20.0))
    got = consistency_constraints(_panel(np.column_stack([col] * 4)), (0, 1, 2, 3))
    assert set(got.values()) == {0.0}


def test_orthogonal_quad_constraints_vanish():
    panel = _orthogonal_panel([1.0, 4.0, 9.0, 16.0], truth=np.arange(64.0))
    got = consistency_constraints(panel, (0, 1, 2, 3))
    assert set(got.values()) == {0.0}
    assert mixed_moment_test(panel).max_normalized == 0


def test_constraint_duplicate_index():
    with pytest.raises(PreconditionError):
        consistency_constraints(_orthogonal_panel([1.0, 2.0, 3.0, 5.0]), (0, 1, 1, 2))


def test_mixed_moment_statistical_scale():
    panel = sample_regressor_panel(np.diag([1.0, 2.0, 0.5, 3.0, 1.5]), 10000, seed=5)
    rep = mixed_moment_test(panel)
    assert rep.threshold == pytest.approx(5 / math.sqrt(10000))
    assert rep.consistency_possible
    assert len(rep.entries) == 5 * 3


def test_clone_raises_moments_for_its_subsets():
    rng = np.random.default_rng(6)
    truth = rng.normal(size=3000)
    noise = rng.normal(size=(3000, 4))
    preds = np.column_stack([truth[:, None] - noise, truth - noise[:, 0]])
    rep = mixed_moment_test(_panel(preds, truth))
    with_clone = [abs(e["normalized"]) for e in rep.entries if {0, 4} <= set(e["quad"])]
    without = [abs(e["normalized"]) for e in rep.entries if 4 not in e["quad"]]
    assert np.mean(with_clone) > 5 * np.mean(without)
    assert not rep.consistency_possible


def test_mixed_moment_needs_four():
    with pytest.raises(PreconditionError):
        mixed_moment_test(_orthogonal_panel([1.0, 2.0, 3.0]))


def test_zero_error_panel():
    truth = np.linspace(0, 1, 9)
    raw, centered = error_covariance_truth(_panel(np.column_stack([truth, truth]), truth))
    assert not raw.any() and not centered.any()


def test_constant_shift_changes_raw_only():
    panel = _orthogonal_panel([1.0, 4.0, 9.0], truth=np.arange(64.0))
    shifted = _panel(panel.predictions + np.array([0.0, 2.0, 0.0]), panel.truth)
    raw0, c0 = error_covariance_truth(panel)
    raw1, c1 = error_covariance_truth(shifted)
    assert raw1[1, 1] == raw0[1, 1] + 4.0
    assert np.array_equal(c0, c1)


def test_truth_required():
    with pytest.raises(PreconditionError):
        error_covariance_truth(RegressorPanel(("a", "b"), np.zeros((3, 2))))


@given(st.lists(st.floats(0, 100, allow_nan=False), min_size=3, max_size=3))
def test_trio_system_round_trip(diag):
    sigma = {(i, j): diag[i] + diag[j] for i, j in itertools.combinations(range(3), 2)}
    s12, s13, s23 = sigma[(0, 1)], sigma[(0, 2)], sigma[(1, 2)]
    # panel whose pairwise stats equal the prescribed sums
    panel = _orthogonal_panel(diag, size=64)
    assert list(pairwise_matrix(panel)[np.triu_indices(3, 1)]) == pytest.approx([s12, s13, s23], rel=1e-12, abs=1e-12)
    assert solve_trio_regressors(panel, (0, 1, 2)).diag == pytest.approx(tuple(diag), rel=1e-12, abs=1e-12)


@given(arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(2, 5)),
              elements=st.floats(-1e3, 1e3, allow_nan=False, width=64)))
@settings(max_examples=100)
def test_pairwise_matrix_matches_pairwise_stat(preds):
    panel = _panel(preds)
    mat = pairwise_matrix(panel)
    scale = max(1.0, float(np.abs(mat).max()))
    for i, j in itertools.combinations(range(panel.n), 2):
        assert abs(mat[i, j] - pairwise_stat(panel, i, j)) <= 1e-9 * scale
    assert np.allclose(mat, mat.T)


def test_parse_predictions():
    panel = parse_predictions("r1,r2,truth\n1.5,2,1\n0.5,-1,0\n", truth_column="truth")
    assert panel.regressor_ids == ("r1", "r2")
    assert panel.truth.tolist() == [1.0, 0.0]
    assert panel.predictions.tolist() == [[1.5, 2.0], [0.5, -1.0]]


@pytest.mark.parametrize("text", ["", "r1,r2\n", "r1,r2\n1,x\n", "r1,r2\n1\n", "r1,r2\n1,nan\n"])
def test_parse_predictions_errors(text):
    with pytest.raises(ParseError):
        parse_predictions(text)


def test_parse_predictions_unknown_truth():
    with pytest.raises(ConfigurationError):
        parse_predictions("r1,r2\n1,2\n", truth_column="y")


def test_csv_round_trip():
    panel = sample_regressor_panel(np.diag([1.0, 2.0]), 10, seed=1)
    back = parse_predictions(panel.to_csv(), truth_column="truth")
    assert np.array_equal(back.predictions, panel.predictions)
    assert np.array_equal(back.truth, panel.truth)


@pytest.mark.parametrize("idx", [(0, 0), (0, 5)])
def test_bad_indices(idx):
    with pytest.raises(PreconditionError):
        pairwise_stat(_orthogonal_panel([1.0, 4.0]), *idx)
