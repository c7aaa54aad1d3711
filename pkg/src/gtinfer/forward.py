"""Exact forward model: pattern frequencies from accuracies and error moments.

For one true label, write each classifier's factor as its marginal
(accuracy if it voted the true label, one minus accuracy otherwise) plus a
signed central deviation. Expanding the product gives a sum over classifier
subsets of the subset's error moment times the omitted marginals, with sign
``(-1)**(number of incorrect voters in the subset)``. Singletons vanish.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleError, PreconditionError
from .tally import ALPHA, LABELS, DecisionCounts, all_patterns
from .truth_stats import EnsembleStats


def pattern_frequency_given_label(stats: EnsembleStats, pattern: str, label: str):
    """Frequency of ``pattern`` among the items whose true label is ``label``."""
    if len(pattern) != stats.n:
        raise PreconditionError(f"pattern {pattern!r} has wrong length for n={stats.n}")
    if label not in LABELS:
        raise PreconditionError(f"label must be 'a' or 'b', got {label!r}")
    acc = stats.accuracy(label)
    marg = [acc[i] if pattern[i] == label else 1 - acc[i] for i in range(stats.n)]
    sign = [1 if pattern[i] == label else -1 for i in range(stats.n)]

    def descend(i: int, chosen: tuple, coef):
        # peel classifier i: either it contributes its marginal, or it joins the moment subset
        if i == stats.n:
            if len(chosen) == 1:
                return 0
            if not chosen:
                return coef
            return coef * stats.moment(label, chosen)
        total = descend(i + 1, chosen, coef * marg[i])
        total += descend(i + 1, chosen + (i,), coef * sign[i])
        return total

    return descend(0, (), 1)


def label_frequencies(stats: EnsembleStats, label: str) -> dict:
    return {p: pattern_frequency_given_label(stats, p, label) for p in all_patterns(stats.n)}


def expected_counts(stats: EnsembleStats, total=None) -> DecisionCounts:
    """Expected counts ``total * weight(label) * frequency``, split by truth.

    With ``total=None`` the result holds joint frequencies (total 1).
    Raises ``InfeasibleError`` when the moments are not realizable, i.e.
    some per-label frequency falls outside [0, 1].
    """
    scale = Fraction(1) if total is None else total
    by_truth = {}
    for lab in LABELS:
        freqs = label_frequencies(stats, lab)
        bad = {p: f for p, f in freqs.items() if not 0 <= f <= 1}
        if bad:
            p, f = next(iter(bad.items()))
            raise InfeasibleError(f"moments not realizable: frequency of {p!r} given {lab!r} is {f}")
        w = stats.weight(lab)
        by_truth[lab] = {p: _normalize(scale * w * f) for p, f in freqs.items()}
    return DecisionCounts.from_by_truth(stats.n, by_truth)


def _normalize(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def independent_frequencies(prevalence, acc_alpha: Sequence, acc_beta: Sequence) -> dict:
    """Joint pattern frequencies for conditionally independent classifiers."""
    if len(acc_alpha) != len(acc_beta):
        raise PreconditionError("accuracy vectors differ in length")
    out = {}
    for p in all_patterns(len(acc_alpha)):
        fa, fb = prevalence, 1 - prevalence
        for c, pa, pb in zip(p, acc_alpha, acc_beta):
            if c == ALPHA:
                fa, fb = fa * pa, fb * (1 - pb)
            else:
                fa, fb = fa * (1 - pa), fb * pb
        out[p] = fa + fb
    return out


def mirror(prevalence, acc_alpha: Sequence, acc_beta: Sequence):
    """Image of a solution under the ground-truth symmetry.

    ``prevalence -> 1 - prevalence``, ``acc_alpha_i -> 1 - acc_beta_i``,
    ``acc_beta_i -> 1 - acc_alpha_i``. Relabelling the truth this way leaves
    every independent pattern frequency unchanged.
    """
    return (1 - prevalence,
            tuple(1 - b for b in acc_beta),
            tuple(1 - a for a in acc_alpha))


def naive_swap(prevalence, acc_alpha: Sequence, acc_beta: Sequence):
    """The literal swap ``acc_alpha <-> acc_beta`` with ``prevalence -> 1 - prevalence``.

    Kept for comparison only; it does not preserve the frequencies in general.
    """
    return 1 - prevalence, tuple(acc_beta), tuple(acc_alpha)

