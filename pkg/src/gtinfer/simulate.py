"""Seeded synthetic classifier votes and regressor panels.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; a seed is
always required, so identical arguments reproduce identical output.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import hadamard

from .errors import InputError, PreconditionError
from .regressors import RegressorPanel
from .tally import ALPHA, BETA, LABELS, VoteMatrix


def make_rng(seed: int) -> np.random.Generator:
    if seed is None:
        raise PreconditionError("a seed is required")
    return np.random.Generator(np.random.PCG64(seed))


def _ids(n: int, prefix: str) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def sample_independent_classifiers(prevalence, acc_alpha: Sequence, acc_beta: Sequence,
                                   size: int, seed: int) -> VoteMatrix:
    """Votes of classifiers that err independently given the true label."""
    n = len(acc_alpha)
    if len(acc_beta) != n:
        raise PreconditionError("accuracy vectors differ in length")
    for v in (prevalence, *acc_alpha, *acc_beta):
        if not 0 <= v <= 1:
            raise PreconditionError(f"parameter {v} outside [0, 1]")
    rng = make_rng(seed)
    is_alpha = rng.random(size) < float(prevalence)
    u = rng.random((size, n))
    acc = np.where(is_alpha[:, None],
                   np.array([float(a) for a in acc_alpha]),
                   np.array([float(b) for b in acc_beta]))
    correct = u < acc
    votes_alpha = np.where(is_alpha[:, None], correct, ~correct)
    rows = ["".join(ALPHA if v else BETA for v in r) for r in votes_alpha]
    truth = [ALPHA if t else BETA for t in is_alpha]
    return VoteMatrix(_ids(n, "c"), rows, truth)


def _check_distribution(dist: Mapping[str, object], label: str) -> int:
    if not dist:
        raise InputError(f"empty pattern distribution for label {label!r}")
    lengths = {len(p) for p in dist}
    if len(lengths) != 1:
        raise InputError("patterns of mixed length")
    for p, w in dist.items():
        if any(c not in LABELS for c in p):
            raise InputError(f"pattern {p!r} is not over 'ab'")
        if w < 0:
            raise InputError(f"negative probability {w} for pattern {p!r} given {label!r}")
    total = sum(dist.values())
    exact = all(isinstance(w, (int, Fraction)) for w in dist.values())
    if (exact and total != 1) or (not exact and abs(float(total) - 1) > 1e-12):
        raise InputError(f"pattern distribution for {label!r} sums to {total}, not 1")
    return lengths.pop()


def sample_from_pattern_distributions(dists: Mapping[str, Mapping[str, object]], prevalence,
                                      size: int, seed: int) -> VoteMatrix:
    """Draw the true label by prevalence, then a vote pattern from that label's distribution."""
    if set(dists) != set(LABELS):
        raise InputError("need one pattern distribution per label 'a' and 'b'")
    if not 0 <= prevalence <= 1:
        raise InputError(f"prevalence {prevalence} outside [0, 1]")
    ns = {_check_distribution(dists[lab], lab) for lab in LABELS}
    if len(ns) != 1:
        raise InputError("label distributions disagree on the number of classifiers")
    n = ns.pop()
    rng = make_rng(seed)
    is_alpha = rng.random(size) < float(prevalence)
    rows = [None] * size
    for lab, mask in ((ALPHA, is_alpha), (BETA, ~is_alpha)):
        pats = list(dists[lab])
        probs = np.array([float(dists[lab][p]) for p in pats])
        probs = probs / probs.sum()
        draws = rng.choice(len(pats), size=size, p=probs)
        for k in np.flatnonzero(mask):
            rows[k] = pats[draws[k]]
    truth = [ALPHA if t else BETA for t in is_alpha]
    return VoteMatrix(_ids(n, "c"), rows, truth)


def _factor(cov: np.ndarray) -> np.ndarray:
    """``L`` with ``L @ L.T == cov``; rejects non-PSD input."""
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise InputError("covariance must be a square matrix")
    if not np.allclose(cov, cov.T, atol=1e-12):
        raise InputError("covariance must be symmetric")
    if np.count_nonzero(cov - np.diag(np.diagonal(cov))) == 0:
        d = np.diagonal(cov)
        if (d < 0).any():
            raise InputError("covariance is not positive semidefinite")
        return np.diag(np.sqrt(d))
    w, v = np.linalg.eigh(cov)
    if w.min() < -1e-10 * max(1.0, abs(w).max()):
        raise InputError("covariance is not positive semidefinite")
    return v * np.sqrt(np.clip(w, 0, None))


def orthogonal_columns(size: int, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """``size x n`` matrix of mean-zero columns with ``W.T @ W / size == I``.

    Uses tiled Hadamard columns (entries +-1, exact in floating point) when
    ``size`` is a multiple of a power of two greater than ``n``; otherwise
    an orthonormalized random basis.
    """
    order = 1
    while order < n + 1:
        order *= 2
    if size % order == 0:
        h = hadamard(order).astype(float)
        return np.tile(h[:, 1:n + 1], (size // order, 1))
    if size < n + 1:
        raise PreconditionError(f"need at least n+1={n + 1} items for {n} orthogonal columns")
    rng = rng or make_rng(0)
    g = rng.standard_normal((size, n))
    g = np.column_stack([np.ones(size), g])
    q, _ = np.linalg.qr(g)
    return q[:, 1:] * np.sqrt(size)


def sample_regressor_panel(cov, size: int, seed: int, truth=None,
                           orthogonal: bool = False) -> RegressorPanel:
    """Truth plus noise whose error covariance is ``cov``.

    ``orthogonal=True`` builds noise whose sample covariance (with and
    without de-meaning) equals ``cov`` exactly, up to float rounding.
    Without a given ``truth``, truth values are standard normal draws.
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    chol = _factor(cov)
    n = cov.shape[0]
    rng = make_rng(seed)
    y = rng.standard_normal(size) if truth is None else np.asarray(truth, dtype=float)
    if y.shape != (size,):
        raise InputError("truth must have one value per item")
    if orthogonal:
        noise = orthogonal_columns(size, n, rng) @ chol.T
    else:
        noise = rng.standard_normal((size, n)) @ chol.T
    # error = truth - prediction, so predictions subtract the noise
    return RegressorPanel(_ids(n, "r"), y[:, None] - noise, y)
