"""Ground-truth statistics from truth-split counts.

Error moments are central co-moments of per-item correctness indicators
over the items of one true label, normalized by that label's item count.
"""

from __future__ import annotations

import itertools
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DegenerateCountsError, PreconditionError
from .tally import ALPHA, BETA, LABELS, DecisionCounts, VoteMatrix

Subset = tuple[int, ...]


def subsets(n: int, min_order: int = 2, max_order: int | None = None) -> list[Subset]:
    max_order = n if max_order is None else max_order
    return [s for k in range(min_order, max_order + 1) for s in itertools.combinations(range(n), k)]


@dataclass(frozen=True)
class EnsembleStats:
    """Prevalence, per-label accuracies and error moments of an ensemble.

    ``moments`` maps ``(label, subset)`` to the error moment, with subsets as
    sorted tuples of distinct 0-based classifier indices of size >= 2.
    Singleton moments are zero by definition and never stored.
    """

    n: int
    prevalence: Fraction
    acc_alpha: tuple
    acc_beta: tuple
    moments: dict[tuple[str, Subset], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "acc_alpha", tuple(self.acc_alpha))
        object.__setattr__(self, "acc_beta", tuple(self.acc_beta))
        if len(self.acc_alpha) != self.n or len(self.acc_beta) != self.n:
            raise PreconditionError("accuracy vectors must have length n")
        for v in (self.prevalence, *self.acc_alpha, *self.acc_beta):
            if not 0 <= v <= 1:
                raise PreconditionError(f"prevalence/accuracy {v} outside [0, 1]")
        for (lab, s), g in self.moments.items():
            if lab not in LABELS:
                raise PreconditionError(f"moment label must be 'a' or 'b', got {lab!r}")
            if len(s) < 2 or len(set(s)) != len(s) or tuple(sorted(s)) != tuple(s):
                raise PreconditionError(f"moment subset must be sorted distinct indices of size >= 2: {s}")
            if not all(0 <= i < self.n for i in s):
                raise PreconditionError(f"moment subset {s} out of range")
            if abs(g) > 1:
                raise PreconditionError(f"|moment| > 1 for {lab}:{s}")

    @classmethod
    def independent(cls, prevalence, acc_alpha, acc_beta, max_order: int | None = None):
        """Stats with every error moment zero (up to ``max_order``)."""
        n = len(acc_alpha)
        zero = {(lab, s): Fraction(0) for lab in LABELS for s in subsets(n, 2, max_order)}
        return cls(n, prevalence, acc_alpha, acc_beta, zero)

    def accuracy(self, label: str) -> tuple:
        return self.acc_alpha if label == ALPHA else self.acc_beta

    def weight(self, label: str):
        return self.prevalence if label == ALPHA else 1 - self.prevalence

    def moment(self, label: str, subset) -> Fraction:
        s = tuple(sorted(subset))
        if len(s) < 2:
            return Fraction(0)
        try:
            return self.moments[(label, s)]
        except KeyError:
            raise PreconditionError(f"missing error moment {label}:{s}") from None

    def pairwise(self, label: str) -> list[Fraction]:
        return [self.moment(label, s) for s in itertools.combinations(range(self.n), 2)]


@dataclass(frozen=True)
class CorrelationSummary:
    """Mean and standard deviation of the 2-way error moments per label."""

    mean_alpha: Fraction
    std_alpha: float
    mean_beta: Fraction
    std_beta: float
    pairs: int
    ddof: int = 1

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (float(self.mean_alpha), self.std_alpha, float(self.mean_beta), self.std_beta)


def _correct(pattern: str, i: int, label: str) -> int:
    return 1 if pattern[i] == label else 0


def stats_from_truth_counts(counts: DecisionCounts, max_order: int | None = None) -> EnsembleStats:
    if counts.by_truth is None:
        raise PreconditionError("stats_from_truth_counts needs by-truth counts")
    n = counts.n
    max_order = n if max_order is None else max_order
    if not 2 <= max_order <= n and n >= 2:
        raise PreconditionError(f"max_order must lie in [2, {n}], got {max_order}")

    acc, moments = {}, {}
    for lab in LABELS:
        bucket = counts.by_truth[lab]
        m = sum(bucket.values(), 0)
        if m == 0:
            raise DegenerateCountsError(f"no items with true label {lab!r}")
        psi = [Fraction(sum(c for p, c in bucket.items() if p[i] == lab), 1) / m for i in range(n)]
        acc[lab] = tuple(psi)
        for s in subsets(n, 2, max_order):
            total = Fraction(0)
            for p, c in bucket.items():
                term = Fraction(c)
                for i in s:
                    term *= _correct(p, i, lab) - psi[i]
                total += term
            moments[(lab, s)] = total / m

    m_alpha = counts.label_total(ALPHA)
    return EnsembleStats(n, Fraction(m_alpha) / counts.total, acc[ALPHA], acc[BETA], moments)


def stats_from_votes(votes: VoteMatrix, max_order: int | None = None) -> EnsembleStats:
    """Per-item summation over a labeled vote matrix (no tallying)."""
    if votes.truth is None:
        raise PreconditionError("stats_from_votes needs a truth column")
    n = votes.n
    max_order = n if max_order is None else max_order
    acc, moments = {}, {}
    for lab in LABELS:
        items = [row for row, t in zip(votes.rows, votes.truth) if t == lab]
        if not items:
            raise DegenerateCountsError(f"no items with true label {lab!r}")
        x = [[_correct(row, i, lab) for i in range(n)] for row in items]
        psi = [Fraction(sum(col), len(items)) for col in zip(*x)]
        acc[lab] = tuple(psi)
        for s in subsets(n, 2, max_order):
            moments[(lab, s)] = sum(
                (math.prod(xd[i] - psi[i] for i in s) for xd in x), Fraction(0)
            ) / len(items)
    prevalence = Fraction(sum(t == ALPHA for t in votes.truth), len(votes.truth))
    return EnsembleStats(n, prevalence, acc[ALPHA], acc[BETA], moments)


def summarize_pairwise(stats: EnsembleStats, ddof: int = 1) -> CorrelationSummary:
    """Per-label mean and standard deviation of the n(n-1)/2 pairwise moments.

    ``ddof=1`` (sample deviation) reproduces the embedded fixtures'
    reference summaries; ``ddof=0`` gives the population deviation.
    """
    if stats.n < 2:
        raise PreconditionError("need at least two classifiers")
    out = {}
    for lab in LABELS:
        vals = stats.pairwise(lab)
        mean = sum(vals, Fraction(0)) / len(vals)
        if len(vals) - ddof <= 0:
            std = 0.0
        elif ddof == 1:
            std = math.sqrt(statistics.variance(vals))
        else:
            std = math.sqrt(statistics.pvariance(vals))
        out[lab] = (mean, std)
    return CorrelationSummary(out[ALPHA][0], out[ALPHA][1], out[BETA][0], out[BETA][1],
                              len(stats.pairwise(ALPHA)), ddof)


def ensemble_accuracy_table(stats: EnsembleStats) -> list[tuple]:
    """Rows of ``(acc_alpha_i, acc_beta_i)``, one per classifier."""
    return list(zip(stats.acc_alpha, stats.acc_beta))


def moments_by_label(stats: EnsembleStats) -> Mapping[str, dict[Subset, Fraction]]:
    return {lab: {s: g for (l, s), g in stats.moments.items() if l == lab} for lab in LABELS}
