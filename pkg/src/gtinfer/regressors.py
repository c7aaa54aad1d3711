"""Error-covariance recovery for scalar regressors without ground truth.

Every ground-truth-free statistic here is computed on de-meaned columns,
so the recoverable quantity is the precision error covariance (errors with
their sample means removed) and all outputs are invariant to constant
shifts of any column.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ParseError, PreconditionError


@dataclass(frozen=True)
class RegressorPanel:
    regressor_ids: tuple[str, ...]
    predictions: np.ndarray
    truth: np.ndarray | None = None

    def __post_init__(self):
        preds = np.asarray(self.predictions, dtype=float)
        if preds.ndim != 2:
            raise PreconditionError("predictions must be an M x n matrix")
        if preds.shape[0] < 1:
            raise PreconditionError("a panel needs at least one item")
        if preds.shape[1] != len(self.regressor_ids):
            raise PreconditionError("one id per prediction column required")
        object.__setattr__(self, "predictions", preds)
        object.__setattr__(self, "regressor_ids", tuple(self.regressor_ids))
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=float)
            if truth.shape != (preds.shape[0],):
                raise PreconditionError("truth must have one value per item")
            object.__setattr__(self, "truth", truth)

    @property
    def n(self) -> int:
        return self.predictions.shape[1]

    @property
    def size(self) -> int:
        return self.predictions.shape[0]

    def centered(self) -> np.ndarray:
        return self.predictions - self.predictions.mean(axis=0)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        header = list(self.regressor_ids) + (["truth"] if self.truth is not None else [])
        w.writerow(header)
        for k in range(self.size):
            row = list(self.predictions[k])
            if self.truth is not None:
                row.append(self.truth[k])
            w.writerow([repr(float(x)) for x in row])
        return out.getvalue()


def parse_predictions(text: str, truth_column: str | None = None) -> RegressorPanel:
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty predictions file") from None
    if truth_column is not None and truth_column not in header:
        raise ConfigurationError(f"truth column {truth_column!r} not in header {header}")
    t_idx = header.index(truth_column) if truth_column is not None else None
    rows = []
    for line_no, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, got {len(cells)}", row=line_no)
        try:
            vals = [float(c) for c in cells]
        except ValueError:
            bad = next(k for k, c in enumerate(cells) if not _is_float(c))
            raise ParseError(f"not a number: {cells[bad]!r}", row=line_no, column=header[bad]) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", row=line_no)
        rows.append(vals)
    if not rows:
        raise ParseError("no data rows")
    data = np.array(rows)
    keep = [k for k in range(len(header)) if k != t_idx]
    truth = data[:, t_idx] if t_idx is not None else None
    return RegressorPanel(tuple(header[k] for k in keep), data[:, keep], truth)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def _check_index(panel: RegressorPanel, *idx: int) -> None:
    if len(set(idx)) != len(idx):
        raise PreconditionError(f"indices must be distinct: {idx}")
    if any(not 0 <= i < panel.n for i in idx):
        raise PreconditionError(f"indices {idx} out of range for n={panel.n}")


def pairwise_stat(panel: RegressorPanel, i: int, j: int) -> float:
    """Mean squared difference of two de-meaned columns.

    Equals ``e_ii + e_jj - 2 e_ij`` for the de-meaned error covariance.
    """
    _check_index(panel, i, j)
    y = panel.centered()
    d = y[:, i] - y[:, j]
    return float(d @ d) / panel.size


def pairwise_matrix(panel: RegressorPanel) -> np.ndarray:
    y = panel.centered()
    sq = np.einsum("mi,mi->i", y, y)
    gram = y.T @ y
    return (sq[:, None] + sq[None, :] - 2 * gram) / panel.size


@dataclass(frozen=True)
class CovarianceEstimate:
    trio: tuple[int, int, int]
    diag: tuple[float, float, float]
    mode: str = "independent-trio"

    @property
    def negative(self) -> tuple[bool, ...]:
        return tuple(v < 0 for v in self.diag)

    @property
    def feasible(self) -> bool:
        return not any(self.negative)


def solve_trio_regressors(panel: RegressorPanel, trio) -> CovarianceEstimate:
    """Diagonal error variances of three regressors assumed independent."""
    i, j, k = trio
    _check_index(panel, i, j, k)
    s_ij, s_ik, s_jk = (pairwise_stat(panel, a, b) for a, b in ((i, j), (i, k), (j, k)))
    diag = ((s_ij + s_ik - s_jk) / 2, (s_ij + s_jk - s_ik) / 2, (s_ik + s_jk - s_ij) / 2)
    return CovarianceEstimate((i, j, k), diag)


def _pairings(quad):
    i, j, k, l = quad
    return (((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k)))


def _pairing_moment(y: np.ndarray, a, b, c, d) -> float:
    return float((y[:, a] - y[:, b]) @ (y[:, c] - y[:, d])) / y.shape[0]


def consistency_constraints(panel: RegressorPanel, quad) -> dict:
    """Data moments ``mean((y_a - y_b)(y_c - y_d))`` for the three pairings.

    With ``quad = (i, j, k, l)`` the key ``((i, k), (j, l))`` holds
    ``mean((y_i - y_k)(y_j - y_l))``, which equals
    ``e_ij + e_kl - e_il - e_jk`` for the de-meaned error covariance.
    All three vanishing is what four consistent trio solutions require,
    unless the cross covariances are homogeneous.
    """
    _check_index(panel, *quad)
    y = panel.centered()
    return {((a, b), (c, d)): _pairing_moment(y, a, b, c, d) for (a, b), (c, d) in _pairings(quad)}


@dataclass(frozen=True)
class MixedMomentReport:
    threshold: float
    entries: list[dict] = field(default_factory=list)

    @property
    def max_normalized(self) -> float:
        return max((abs(e["normalized"]) for e in self.entries), default=0.0)

    @property
    def consistency_possible(self) -> bool:
        return self.max_normalized <= self.threshold


def mixed_moment_test(panel: RegressorPanel, threshold: float | None = None) -> MixedMomentReport:
    """Normalized pairing moments over every 4-subset of regressors.

    Each moment is divided by the geometric mean of the two difference
    columns' second moments (0/0 is reported as 0). The default threshold
    ``5/sqrt(M)`` is a reporting convention only.
    """
    if panel.n < 4:
        raise PreconditionError(f"the mixed-moment test needs n >= 4 regressors, got {panel.n}")
    y = panel.centered()
    m = panel.size
    threshold = 5 / math.sqrt(m) if threshold is None else threshold
    entries = []
    for quad in itertools.combinations(range(panel.n), 4):
        for (a, b), (c, d) in _pairings(quad):
            raw = _pairing_moment(y, a, b, c, d)
            d1 = y[:, a] - y[:, b]
            d2 = y[:, c] - y[:, d]
            scale = math.sqrt(float(d1 @ d1) / m * float(d2 @ d2) / m)
            normalized = raw / scale if scale > 0 else 0.0
            entries.append({"quad": quad, "pairing": ((a, b), (c, d)), "moment": raw, "normalized": normalized})
    return MixedMomentReport(threshold, entries)


def error_covariance_truth(panel: RegressorPanel) -> tuple[np.ndarray, np.ndarray]:
    """Raw and de-meaned error covariance matrices computed with the truth."""
    if panel.truth is None:
        raise PreconditionError("error_covariance_truth needs a truth column")
    err = panel.truth[:, None] - panel.predictions
    raw = err.T @ err / panel.size
    c = err - err.mean(axis=0)
    return raw, c.T @ c / panel.size
