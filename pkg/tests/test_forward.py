from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gtinfer.errors import InfeasibleError, PreconditionError
from gtinfer.forward import (
    expected_counts,
    independent_frequencies,
    label_frequencies,
    mirror,
    naive_swap,
    pattern_frequency_given_label,
)
from gtinfer.tally import all_patterns
from gtinfer.truth_stats import EnsembleStats, subsets

from strategies import independent_params, unit_fractions

F = Fraction


def _stats(n, prevalence, alpha, beta, gammas=None):
    moments = {(lab, s): F(0) for lab in "ab" for s in subsets(n)}
    moments.update(gammas or {})
    return EnsembleStats(n, prevalence, alpha, beta, moments)


def _plain_product(prevalence, alpha, beta, pattern):
    fa, fb = prevalence, 1 - prevalence
    for v, a, b in zip(pattern, alpha, beta):
        fa *= a if v == "a" else 1 - a
        fb *= 1 - b if v == "a" else b
    return fa + fb


@given(unit_fractions(), unit_fractions(), st.fractions(-F(1, 20), F(1, 20)))
def test_two_classifier_expansion(p1, p2, g):
    s = _stats(2, F(1, 2), (p1, p2), (F(1, 2),) * 2, {("a", (0, 1)): g})
    assert pattern_frequency_given_label(s, "ab", "a") == p1 * (1 - p2) - g


@given(st.lists(unit_fractions(), min_size=3, max_size=3),
       st.lists(st.fractions(-F(1, 50), F(1, 50)), min_size=4, max_size=4))
def test_three_classifier_expansion(psi, g):
    p1, p2, p3 = psi
    g12, g13, g23, g123 = g
    gammas = {("a", (0, 1)): g12, ("a", (0, 2)): g13, ("a", (1, 2)): g23, ("a", (0, 1, 2)): g123}
    s = _stats(3, F(1, 2), psi, (F(1, 2),) * 3, gammas)
    expected = (1 - p1) * p2 * (1 - p3) - g12 * (1 - p3) + g13 * p2 - g23 * (1 - p1) + g123
    assert pattern_frequency_given_label(s, "bab", "a") == expected


def test_m54_instance():
    s = EnsembleStats.independent(F(1, 2), [F(2, 3)] * 3, [F(2, 3)] * 3)
    counts = expected_counts(s, 54).without_truth()
    assert counts.counts == {"aaa": 9, "aab": 6, "aba": 6, "baa": 6,
                             "abb": 6, "bab": 6, "bba": 6, "bbb": 9}
    assert counts.is_integral


@pytest.mark.parametrize("p", [F(0), F(1, 3), F(1)])
def test_perfect_classifiers(p):
    s = EnsembleStats.independent(p, [F(1)] * 3, [F(1)] * 3)
    counts = expected_counts(s, 30).without_truth()
    assert counts.counts == {k: v for k, v in {"aaa": p * 30, "bbb": (1 - p) * 30}.items() if v}


def test_correlated_pair_count():
    s = EnsembleStats(2, F(1), (F(4, 5), F(3, 5)), (F(1, 2), F(1, 2)), {("a", (0, 1)): F(1, 25),
                                                                     ("b", (0, 1)): F(0)})
    counts = expected_counts(s, 10)
    assert counts.by_truth["a"]["ab"] == F(14, 5)
    assert sum(counts.by_truth["a"].values()) == 10
    # joint correct count 13/25 * 10 is fractional, so no 10-item sample has these stats
    assert not counts.is_integral


def test_frequencies_without_total():
    s = EnsembleStats.independent(F(2, 5), [F(4, 5), F(7, 10), F(9, 10)], [F(9, 10), F(3, 5), F(4, 5)])
    freqs = expected_counts(s)
    assert freqs.total == 1
    assert dict(freqs.counts) == {p: v for p, v in independent_frequencies(
        F(2, 5), [F(4, 5), F(7, 10), F(9, 10)], [F(9, 10), F(3, 5), F(4, 5)]).items() if v}


def test_independent_frequencies_example():
    alpha, beta = [F(4, 5), F(7, 10), F(9, 10)], [F(9, 10), F(3, 5), F(4, 5)]
    freqs = independent_frequencies(F(2, 5), alpha, beta)
    assert sum(freqs.values()) == 1
    for p, f in freqs.items():
        assert f == _plain_product(F(2, 5), alpha, beta, p)
    assert freqs["aaa"] == F(2, 5) * F(4, 5) * F(7, 10) * F(9, 10) + F(3, 5) * F(1, 10) * F(2, 5) * F(1, 5)


def test_full_prevalence_ignores_beta():
    alpha = [F(3, 4), F(2, 3), F(1, 2)]
    one = independent_frequencies(F(1), alpha, [F(1, 5)] * 3)
    two = independent_frequencies(F(1), alpha, [F(4, 5), F(1, 3), F(1)])
    assert one == two


@given(independent_params(n=3))
@settings(max_examples=200)
def test_independent_matches_expansion(params):
    phi, alpha, beta = params
    freqs = independent_frequencies(phi, alpha, beta)
    joint = expected_counts(EnsembleStats.independent(phi, alpha, beta))
    assert all(joint[p] == freqs[p] for p in all_patterns(3))


@given(independent_params(n=4))
def test_mirror_preserves_frequencies(params):
    assert independent_frequencies(*params) == independent_frequencies(*mirror(*params))


def test_naive_swap_breaks_frequencies():
    params = (F(2, 5), [F(4, 5), F(7, 10), F(9, 10)], [F(9, 10), F(3, 5), F(4, 5)])
    assert independent_frequencies(*params) != independent_frequencies(*naive_swap(*params))
    assert independent_frequencies(*params) == independent_frequencies(*mirror(*params))


@given(independent_params(n=3), st.sampled_from(subsets(3)), st.sampled_from(all_patterns(3)),
       st.sampled_from("ab"), st.fractions(-F(1, 10), F(1, 10)))
def test_affine_in_each_moment(params, subset, pattern, label, delta):
    phi, alpha, beta = params
    base = _stats(3, phi, alpha, beta)
    bumped = _stats(3, phi, alpha, beta, {(label, subset): delta})
    acc = base.accuracy(label)
    coef = 1
    for i in range(3):
        if i in subset:
            coef *= 1 if pattern[i] == label else -1
        else:
            coef *= acc[i] if pattern[i] == label else 1 - acc[i]
    diff = pattern_frequency_given_label(bumped, pattern, label) - pattern_frequency_given_label(base, pattern, label)
    assert diff == coef * delta


@given(independent_params(n=3))
def test_label_frequencies_sum_to_one(params):
    s = EnsembleStats.independent(*params)
    for lab in "ab":
        assert sum(label_frequencies(s, lab).values()) == 1


def test_unrealizable_moments_rejected():
    s = _stats(2, F(1, 2), (F(9, 10), F(9, 10)), (F(1, 2),) * 2, {("a", (0, 1)): F(-1, 2)})
    with pytest.raises(InfeasibleError):
        expected_counts(s, 10)


def test_missing_moment():
    s = EnsembleStats(3, F(1, 2), (F(1, 2),) * 3, (F(1, 2),) * 3, {("a", (0, 1)): F(0)})
    with pytest.raises(PreconditionError):
        pattern_frequency_given_label(s, "aab", "a")


@pytest.mark.parametrize("pattern, label", [("aa", "a"), ("aaa", "c")])
def test_bad_pattern_or_label(pattern, label):
    s = EnsembleStats.independent(F(1, 2), [F(1, 2)] * 3, [F(1, 2)] * 3)
    with pytest.raises(PreconditionError):
        pattern_frequency_given_label(s, pattern, label)


def test_expansion_counts_every_subset():
    # a pattern frequency touches every subset moment of size >= 2 exactly once
    n = 4
    gammas = {("b", s): F(1, 1000 * (k + 2)) for k, s in enumerate(subsets(n))}
    s = _stats(n, F(1, 2), (F(1, 2),) * n, (F(1, 2),) * n, gammas)
    got = pattern_frequency_given_label(s, "bbbb", "b")
    oracle = F(1, 16) + sum(g * F(1, 2) ** (n - len(sub)) for (_, sub), g in gammas.items())
    assert got == oracle
