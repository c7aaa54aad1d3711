"""Ground-truth-free independence tests for binary classifiers.

``detect_trio`` is exact: with integer counts every observable moment is
rational, so the prevalence of an independent sample (itself an integer
ratio) forces the discriminant under the square root to be a rational
square. A non-square, negative, or out-of-range discriminant therefore
rules out independence on that sample.

``four_trio_consistency`` is the graded test: solve every trio of a
four-classifier ensemble and measure how much the estimates disagree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegenerateError, InsufficientDataError, PreconditionError
from .exact import sqrt_rational, surd_sign
from .tally import ALPHA, BETA, LABELS, DecisionCounts, project_subset
from .trio import (
    TrioEstimate,
    accuracy_radicands,
    branch_signs,
    check_trio_counts,
    solve_trio,
    trio_moments,
)
from .truth_stats import EnsembleStats

CONSISTENT = "consistent-with-independence"
NON_INDEPENDENT = "non-independent"
DEGENERATE = "degenerate"

IRRATIONAL = "irrational-discriminant"
COMPLEX = "complex-solution"
OUT_OF_RANGE = "out-of-range-solution"
RATIONAL_FEASIBLE = "rational-feasible"


@dataclass(frozen=True)
class DetectionReport:
    verdict: str
    evidence: str | None
    discriminant: Fraction | None
    phi_candidates: tuple | None = None
    accuracies_rational: bool | None = None
    detail: str = ""

    def __post_init__(self):
        if (self.verdict == NON_INDEPENDENT) != (self.evidence in (IRRATIONAL, COMPLEX, OUT_OF_RANGE)):
            raise ValueError(f"inconsistent report: {self.verdict} with evidence {self.evidence}")


def _unit_interval_sign_ok(u: Fraction, w: Fraction, y: Fraction) -> bool:
    """Exactly test ``0 <= u + w*sqrt(y) <= 1``."""
    return surd_sign(u, w, y) >= 0 and surd_sign(1 - u, -w, y) >= 0


def detect_trio(counts: DecisionCounts) -> DetectionReport:
    """Exact independence detector for three classifiers.

    Needs exact (integer or rational) counts; no floating tolerance enters.
    """
    check_trio_counts(counts)
    mom = trio_moments(counts)
    if mom.c12 == 0 or mom.c13 == 0 or mom.c23 == 0:
        return DetectionReport(DEGENERATE, None, None, detail="a pairwise vote covariance is zero")
    if mom.discriminant_denominator == 0:
        return DetectionReport(DEGENERATE, None, None, detail="prevalence quadratic degenerates")

    disc = mom.discriminant
    if disc < 0:
        return DetectionReport(NON_INDEPENDENT, COMPLEX, disc, detail="negative discriminant")
    root = sqrt_rational(disc)
    if root is None:
        s = math.sqrt(disc)
        return DetectionReport(NON_INDEPENDENT, IRRATIONAL, disc, ((1 + s) / 2, (1 - s) / 2),
                               detail="discriminant is not a rational square")
    phis = (Fraction(1, 2) + root / 2, Fraction(1, 2) - root / 2)
    if disc > 1:
        return DetectionReport(NON_INDEPENDENT, OUT_OF_RANGE, disc, phis,
                               detail="prevalence outside [0, 1]")

    rational = True
    for branch_sign, phi in zip((1, -1), phis):
        signs = branch_signs(mom, phi, branch_sign)
        for i, (s, y) in enumerate(zip(signs, accuracy_radicands(mom, phi))):
            if y < 0:
                return DetectionReport(NON_INDEPENDENT, COMPLEX, disc, phis,
                                       detail="complex accuracy solution")
            rational = rational and sqrt_rational(y) is not None
            p = mom.p[i]
            ok_alpha = _unit_interval_sign_ok(p, s * (1 - phi), y)
            ok_beta = _unit_interval_sign_ok(1 - p, s * phi, y)
            if not (ok_alpha and ok_beta):
                return DetectionReport(NON_INDEPENDENT, OUT_OF_RANGE, disc, phis,
                                       detail=f"accuracy of classifier {i + 1} outside [0, 1]")
    return DetectionReport(CONSISTENT, RATIONAL_FEASIBLE, disc, phis, rational)


def trios_of(n: int) -> list[tuple[int, int, int]]:
    return list(itertools.combinations(range(n), 3))


@dataclass(frozen=True)
class ConsistencyReport:
    """Aligned trio solutions of a four-classifier ensemble.

    ``estimates[(i, label)]`` lists ``(trio_index, value)`` for classifier
    ``i``; ``spreads`` holds max - min of those values.
    """

    trios: tuple[tuple[int, int, int], ...]
    selected: tuple[TrioEstimate | None, ...]
    assignment: tuple[int | None, ...]
    estimates: dict[tuple[int, str], list[tuple[int, object]]]
    spreads: dict[tuple[int, str], object]
    prevalence_estimates: tuple
    prevalence_spread: object
    failures: dict[int, str] = field(default_factory=dict)

    def mean_spread(self, label: str) -> float:
        vals = [float(v) for (i, lab), v in self.spreads.items() if lab == label]
        return sum(vals) / len(vals)

    def scatter_rows(self, stats: EnsembleStats) -> list[dict]:
        """One row per (classifier, label, trio): truth vs recovered accuracy."""
        rows = []
        for (i, lab), ests in sorted(self.estimates.items()):
            truth = stats.accuracy(lab)[i]
            for t, val in ests:
                rows.append({
                    "classifier": i + 1,
                    "label": lab,
                    "trio": ",".join(str(k + 1) for k in self.trios[t]),
                    "truth_accuracy": float(truth),
                    "recovered_accuracy": float(val),
                })
        return rows


def _place(trio, estimate: TrioEstimate):
    """Map a trio estimate onto (classifier, label) -> value."""
    out = {}
    for pos, i in enumerate(trio):
        out[(i, ALPHA)] = estimate.acc_alpha[pos]
        out[(i, BETA)] = estimate.acc_beta[pos]
    return out


def _disagreement(chosen: list[tuple[tuple, TrioEstimate]]):
    """Sum of pairwise absolute differences over shared estimates and prevalence."""
    placed = [_place(t, e) for t, e in chosen]
    cost = 0
    for a, b in itertools.combinations(range(len(chosen)), 2):
        cost += abs(chosen[a][1].prevalence - chosen[b][1].prevalence)
        for key in placed[a].keys() & placed[b].keys():
            cost += abs(placed[a][key] - placed[b][key])
    return cost


def four_trio_consistency(counts: DecisionCounts, exact: bool = False) -> ConsistencyReport:
    """Solve all four trios and align their branches.

    Branches are aligned by exhaustive search for the assignment with the
    least total cross-trio disagreement. The global mirror of any
    assignment has the same disagreement, so ties are broken toward the
    larger mean accuracy, then the larger mean prevalence.
    """
    if counts.n != 4:
        raise PreconditionError(f"four-trio consistency needs n=4 counts, got n={counts.n}")
    trios = trios_of(4)
    solved, failures = {}, {}
    for t, trio in enumerate(trios):
        try:
            solved[t] = solve_trio(project_subset(counts.without_truth(), trio), exact=exact)
        except DegenerateError as exc:
            failures[t] = f"{type(exc).__name__}: {exc}"
    if len(solved) < 2:
        raise InsufficientDataError(f"only {len(solved)} of 4 trios are solvable: {failures}")

    keys = sorted(solved)
    scored = []
    for choice in itertools.product((0, 1), repeat=len(keys)):
        chosen = [(trios[t], solved[t][c]) for t, c in zip(keys, choice)]
        cost = _disagreement(chosen)
        mean_acc = sum(e.mean_accuracy for _, e in chosen) / len(chosen)
        mean_phi = sum(e.prevalence for _, e in chosen) / len(chosen)
        scored.append((cost, mean_acc, mean_phi, choice))
    best = min(s[0] for s in scored)
    slack = 0 if all(isinstance(s[0], Fraction) for s in scored) else 1e-12 * (1 + abs(best))
    tied = [s for s in scored if s[0] <= best + slack]
    _, _, _, choice = max(tied, key=lambda s: (s[1], s[2]))

    selected = [None] * 4
    assignment = [None] * 4
    for t, c in zip(keys, choice):
        selected[t] = solved[t][c]
        assignment[t] = c

    estimates: dict[tuple[int, str], list] = {(i, lab): [] for i in range(4) for lab in LABELS}
    for t in keys:
        for key, val in _place(trios[t], selected[t]).items():
            estimates[key].append((t, val))
    spreads = {}
    for key, vals in estimates.items():
        if vals:
            v = [x for _, x in vals]
            spreads[key] = max(v) - min(v)
    phis = tuple(selected[t].prevalence for t in keys)
    return ConsistencyReport(tuple(trios), tuple(selected), tuple(assignment), estimates,
                             spreads, phis, max(phis) - min(phis), failures)


def consistency_vs_correlation(report: ConsistencyReport, stats: EnsembleStats) -> dict:
    """Per label: (mean trio spread, mean absolute pairwise error moment)."""
    n_report = len({i for i, _ in report.estimates})
    if stats.n != n_report:
        raise PreconditionError(f"ensemble size mismatch: report has {n_report}, stats has {stats.n}")
    out = {}
    for lab in LABELS:
        gam = [abs(float(g)) for g in stats.pairwise(lab)]
        out[lab] = (report.mean_spread(lab), sum(gam) / len(gam))
    return out
