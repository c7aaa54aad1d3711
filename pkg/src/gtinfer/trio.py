"""Closed-form solution of the independent three-classifier system.

Let ``v_i`` indicate that classifier ``i`` voted alpha. If the classifiers
are conditionally independent given the true label, the observed central
moments factor through ``q = prevalence * (1 - prevalence)`` and
``a_i = acc_alpha_i + acc_beta_i - 1``::

    cov(v_i, v_j)      = q * a_i * a_j
    E[prod (v_i - p_i)] = q * (1 - 2 * prevalence) * a_1 * a_2 * a_3

so ``T**2 / (c12 c13 c23) = (1 - 2 prevalence)**2 / q`` and the prevalence
solves a quadratic whose discriminant is ``T**2 / (4 c12 c13 c23 + T**2)``.
The accuracies then follow linearly from ``p_i`` and ``a_i``. The two roots
are mirror images of each other under the ground-truth symmetry.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ComplexSolutionError, DegenerateCountsError, InfeasibleError, PreconditionError
from .exact import as_fraction, sqrt_rational
from .forward import independent_frequencies, mirror
from .tally import ALPHA, DecisionCounts, all_patterns

FEASIBILITY_TOL = 1e-9
RESIDUAL_TOL = 1e-9


class DegeneracyWarning(UserWarning):
    """Some decision-event counters are zero."""


@dataclass(frozen=True)
class TrioMoments:
    """Observable moments of a trio's vote indicators (exact rationals)."""

    total: Fraction
    p: tuple[Fraction, Fraction, Fraction]
    c12: Fraction
    c13: Fraction
    c23: Fraction
    triple: Fraction

    @property
    def product(self) -> Fraction:
        return self.c12 * self.c13 * self.c23

    @property
    def discriminant_denominator(self) -> Fraction:
        return 4 * self.product + self.triple ** 2

    @property
    def discriminant(self) -> Fraction:
        """``T**2 / (4 c12 c13 c23 + T**2)``; the prevalence is ``(1 +- sqrt(.))/2``."""
        return self.triple ** 2 / self.discriminant_denominator

    def cov(self, i: int, j: int) -> Fraction:
        i, j = sorted((i, j))
        return {(0, 1): self.c12, (0, 2): self.c13, (1, 2): self.c23}[(i, j)]


@dataclass(frozen=True)
class TrioEstimate:
    prevalence: object
    acc_alpha: tuple
    acc_beta: tuple
    residual: object
    feasible: bool
    exact: bool

    @property
    def mean_accuracy(self):
        vals = (*self.acc_alpha, *self.acc_beta)
        return sum(vals) / len(vals)

    def values(self) -> tuple:
        return (self.prevalence, *self.acc_alpha, *self.acc_beta)

    def mirrored(self) -> "TrioEstimate":
        phi, aa, ab = mirror(self.prevalence, self.acc_alpha, self.acc_beta)
        return replace(self, prevalence=phi, acc_alpha=aa, acc_beta=ab)


def _frequencies(counts: DecisionCounts) -> dict[str, Fraction]:
    total = as_fraction(counts.total)
    return {p: as_fraction(counts[p]) / total for p in all_patterns(counts.n)}


def check_trio_counts(counts: DecisionCounts) -> None:
    if counts.n != 3:
        raise PreconditionError(f"a trio needs n=3 counts, got n={counts.n}")
    if counts.total <= 0:
        raise DegenerateCountsError("no items (M = 0)")
    dense = counts.dense()
    if len(set(dense)) == 1:
        raise DegenerateCountsError("all eight decision-event counts are equal")
    if any(v == 0 for v in dense):
        zeros = [p for p in all_patterns(3) if counts[p] == 0]
        warnings.warn(f"zero decision-event counts for {zeros}", DegeneracyWarning, stacklevel=3)


def trio_moments(counts: DecisionCounts) -> TrioMoments:
    if counts.n != 3:
        raise PreconditionError(f"a trio needs n=3 counts, got n={counts.n}")
    f = _frequencies(counts)
    v = {pat: [1 if c == ALPHA else 0 for c in pat] for pat in f}
    p = tuple(sum(fr * v[pat][i] for pat, fr in f.items()) for i in range(3))

    def central(idx):
        total = Fraction(0)
        for pat, fr in f.items():
            term = fr
            for i in idx:
                term *= v[pat][i] - p[i]
            total += term
        return total

    return TrioMoments(as_fraction(counts.total), p, central((0, 1)), central((0, 2)),
                       central((1, 2)), central((0, 1, 2)))


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _in_unit(x, tol) -> bool:
    if isinstance(x, Fraction):
        return 0 <= x <= 1
    return -tol <= x <= 1 + tol


def accuracy_radicands(mom: TrioMoments, phi) -> list:
    """``a_i**2 = c_ij c_ik / (q c_jk)`` for i = 1, 2, 3."""
    q = phi * (1 - phi)
    return [mom.cov(i, j) * mom.cov(i, k) / mom.cov(j, k) / q
            for i, j, k in ((0, 1, 2), (1, 0, 2), (2, 0, 1))]


def branch_signs(mom: TrioMoments, phi, branch_sign: int) -> list[int]:
    """Signs of ``a_1, a_2, a_3`` on the branch with prevalence ``phi``."""
    # pair signs from cov(v_i, v_j) = q a_i a_j; overall sign from the triple moment
    s_q = _sgn(phi * (1 - phi))
    signs = [1, _sgn(mom.c12) * s_q, _sgn(mom.c13) * s_q]
    want = _sgn(mom.triple) * _sgn(1 - 2 * phi) * s_q
    if want == 0:
        want = branch_sign * signs[1] * signs[2]  # symmetric root: split by branch
    if signs[0] * signs[1] * signs[2] != want:
        signs = [-s for s in signs]
    return signs


def _branch(mom: TrioMoments, root, branch_sign: int, exact: bool):
    """Accuracies for one prevalence root. Returns (phi, acc_alpha, acc_beta, exact)."""
    phi = Fraction(1, 2) + branch_sign * root / 2
    signs = branch_signs(mom, phi, branch_sign)
    mags, all_exact = [], exact
    for sq in accuracy_radicands(mom, phi):
        if sq < 0:
            raise ComplexSolutionError(f"accuracy radicand {sq} is negative at prevalence {phi}")
        r = sqrt_rational(sq) if all_exact else None
        if r is None:
            all_exact = False
            r = math.sqrt(float(sq))
        mags.append(r)
    if not all_exact:
        phi = float(phi)
        mags = [float(m) for m in mags]
    a = [s * m for s, m in zip(signs, mags)]
    p = mom.p if all_exact else tuple(float(x) for x in mom.p)
    acc_alpha = tuple(p[i] + (1 - phi) * a[i] for i in range(3))
    acc_beta = tuple(1 - p[i] + phi * a[i] for i in range(3))
    return phi, acc_alpha, acc_beta, all_exact


def residuals(estimate: TrioEstimate, counts: DecisionCounts) -> dict[str, object]:
    """Observed frequency minus the independent-model frequency, per pattern."""
    if counts.n != 3 or counts.total <= 0:
        raise PreconditionError("residuals need n=3 counts with M > 0")
    observed = _frequencies(counts)
    model = independent_frequencies(estimate.prevalence, estimate.acc_alpha, estimate.acc_beta)
    if estimate.exact:
        return {pat: observed[pat] - model[pat] for pat in observed}
    return {pat: float(observed[pat]) - float(model[pat]) for pat in observed}


def solve_trio(counts: DecisionCounts, exact: bool = False,
               tol: float = FEASIBILITY_TOL) -> tuple[TrioEstimate, TrioEstimate]:
    """Both point solutions of the independent trio system.

    In exact mode the branches are rational whenever every square root is
    rational; otherwise that branch falls back to floating point and
    carries ``exact=False``. Raises ``DegenerateCountsError`` for zero
    covariances or all-equal counts and ``ComplexSolutionError`` when the
    prevalence discriminant or an accuracy radicand is negative.
    """
    check_trio_counts(counts)
    mom = trio_moments(counts)
    if mom.c12 == 0 or mom.c13 == 0 or mom.c23 == 0:
        raise DegenerateCountsError("a pairwise vote covariance is zero")
    if mom.discriminant_denominator == 0:
        raise DegenerateCountsError("prevalence quadratic degenerates (4*c12*c13*c23 + T^2 = 0)")
    disc = mom.discriminant
    if disc < 0:
        raise ComplexSolutionError(f"prevalence discriminant {disc} is negative")

    root = sqrt_rational(disc) if exact else None
    exact_root = root is not None
    if root is None:
        root = math.sqrt(float(disc))

    out = []
    for branch_sign in (1, -1):
        phi, aa, ab, is_exact = _branch(mom, root, branch_sign, exact and exact_root)
        est = TrioEstimate(phi, aa, ab, residual=0, feasible=False, exact=is_exact)
        dev = residuals(est, counts).values()
        resid = max(abs(d) for d in dev)
        feasible = all(_in_unit(x, tol) for x in est.values())
        out.append(replace(est, residual=resid, feasible=feasible))
    return out[0], out[1]


def _mean_acc_policy(branches: Sequence[TrioEstimate]) -> TrioEstimate:
    return max(branches, key=lambda b: (b.mean_accuracy, b.prevalence))


BRANCH_POLICIES: dict[str, Callable[[Sequence[TrioEstimate]], TrioEstimate]] = {
    "mean-acc": _mean_acc_policy,
}


def select_branch(branches: Sequence[TrioEstimate],
                  policy: str | Callable[[Sequence[TrioEstimate]], TrioEstimate] = "mean-acc",
                  require_feasible: bool = True) -> TrioEstimate:
    """Pick one branch. The default prefers better-than-chance mean accuracy,
    then larger prevalence."""
    pick = BRANCH_POLICIES[policy] if isinstance(policy, str) else policy
    candidates = [b for b in branches if b.feasible] if require_feasible else list(branches)
    if not candidates:
        raise InfeasibleError("no feasible branch")
    if len(candidates) == 1:
        return candidates[0]
    return pick(candidates)
