"""Vote matrices and decision-event counts.

Labels are canonicalized to ``"a"`` (alpha) and ``"b"`` (beta). A decision
pattern is a string with one label per classifier, in classifier order, so
``"aab"`` means classifiers 1 and 2 voted alpha and classifier 3 voted beta.
Counters live in sparse dicts; a missing pattern is a zero.

Library indices are 0-based. File formats and the CLI use 1-based indices.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError, ParseError, PreconditionError

ALPHA = "a"
BETA = "b"
LABELS = (ALPHA, BETA)
MAX_DENSE_N = 16

DEFAULT_LABEL_MAP = {"0": ALPHA, "1": BETA}


def all_patterns(n: int) -> list[str]:
    """Every length-``n`` pattern, lexicographic (``a`` before ``b``)."""
    if n > MAX_DENSE_N:
        raise PreconditionError(f"dense enumeration is limited to n <= {MAX_DENSE_N}, got {n}")
    return ["".join(p) for p in itertools.product(LABELS, repeat=n)]


def other_label(label: str) -> str:
    return BETA if label == ALPHA else ALPHA


def flip_pattern(pattern: str) -> str:
    return pattern.translate(str.maketrans("ab", "ba"))


def parse_label_map(spec: str) -> dict[str, str]:
    """Parse ``"0=a,1=b"`` into a symbol -> canonical label map."""
    mapping = {}
    for item in spec.split(","):
        if "=" not in item:
            raise ConfigurationError(f"bad label mapping {item!r}; expected SYMBOL=a|b")
        sym, lab = (s.strip() for s in item.split("=", 1))
        if lab not in LABELS:
            raise ConfigurationError(f"label mapping target must be 'a' or 'b', got {lab!r}")
        mapping[sym] = lab
    if set(mapping.values()) != set(LABELS):
        raise ConfigurationError("label mapping must cover both 'a' and 'b'")
    return mapping


@dataclass(frozen=True)
class VoteMatrix:
    classifier_ids: tuple[str, ...]
    rows: tuple[str, ...]
    truth: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "classifier_ids", tuple(self.classifier_ids))
        object.__setattr__(self, "rows", tuple(self.rows))
        n = len(self.classifier_ids)
        for k, row in enumerate(self.rows):
            if len(row) != n or any(c not in LABELS for c in row):
                raise PreconditionError(f"row {k} is not a length-{n} pattern over 'ab': {row!r}")
        if self.truth is not None:
            object.__setattr__(self, "truth", tuple(self.truth))
            if len(self.truth) != len(self.rows):
                raise PreconditionError("truth length differs from number of rows")
            bad = [t for t in self.truth if t not in LABELS]
            if bad:
                raise PreconditionError(f"truth values must be 'a' or 'b', got {bad[0]!r}")

    @property
    def n(self) -> int:
        return len(self.classifier_ids)

    def __len__(self) -> int:
        return len(self.rows)

    def to_csv(self, symbols: Mapping[str, str] | None = None) -> str:
        """Render as a votes CSV; ``symbols`` maps canonical label -> file symbol."""
        symbols = symbols or {ALPHA: "0", BETA: "1"}
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        header = list(self.classifier_ids)
        if self.truth is not None:
            header.append("truth")
        w.writerow(header)
        for k, row in enumerate(self.rows):
            cells = [symbols[c] for c in row]
            if self.truth is not None:
                cells.append(symbols[self.truth[k]])
            w.writerow(cells)
        return out.getvalue()


def parse_votes(text: str, truth_column: str | None = None,
                label_map: Mapping[str, str] | None = None) -> VoteMatrix:
    """Parse a votes CSV. The header names the classifiers (and the truth column)."""
    label_map = dict(label_map or DEFAULT_LABEL_MAP)
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty votes file") from None
    if not header or any(h == "" for h in header):
        raise ParseError("header has empty column names", row=1)
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header", row=1)
    if truth_column is not None and truth_column not in header:
        raise ConfigurationError(f"truth column {truth_column!r} not in header {header}")
    t_idx = header.index(truth_column) if truth_column is not None else None
    ids = [h for k, h in enumerate(header) if k != t_idx]

    rows, truth = [], []
    for line_no, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, got {len(cells)}", row=line_no)
        pattern = []
        for k, cell in enumerate(cells):
            sym = cell.strip()
            if sym not in label_map:
                raise ParseError(f"unknown label symbol {sym!r}", row=line_no, column=header[k])
            if k == t_idx:
                truth.append(label_map[sym])
            else:
                pattern.append(label_map[sym])
        rows.append("".join(pattern))
    return VoteMatrix(ids, rows, truth if t_idx is not None else None)


def _clean(counts: Mapping[str, object], n: int) -> dict[str, int | Fraction]:
    out = {}
    for p, v in counts.items():
        if len(p) != n or any(c not in LABELS for c in p):
            raise PreconditionError(f"pattern {p!r} is not a length-{n} string over 'ab'")
        if isinstance(v, bool) or not isinstance(v, (int, Fraction)):
            raise PreconditionError(f"counter for {p!r} must be an int or Fraction, got {v!r}")
        if v < 0:
            raise PreconditionError(f"counter for {p!r} is negative: {v}")
        if v:
            out[p] = v
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class DecisionCounts:
    """Sparse decision-event counters, optionally split by true label.

    Counters are ints for tallied data. Forward-model output may carry
    ``Fraction`` counters (expected counts or frequencies).
    """

    n: int
    counts: dict[str, int | Fraction] = field(default_factory=dict)
    by_truth: dict[str, dict[str, int | Fraction]] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be >= 1")
        object.__setattr__(self, "counts", _clean(self.counts, self.n))
        if self.by_truth is not None:
            if set(self.by_truth) - set(LABELS):
                raise PreconditionError(f"by_truth keys must be 'a'/'b', got {sorted(self.by_truth)}")
            bt = {lab: _clean(self.by_truth.get(lab, {}), self.n) for lab in LABELS}
            object.__setattr__(self, "by_truth", bt)
            summed = Counter()
            for lab in LABELS:
                summed.update(bt[lab])
            if dict(summed) != self.counts:
                raise PreconditionError("by_truth does not sum to counts")

    @classmethod
    def from_by_truth(cls, n: int, by_truth: Mapping[str, Mapping[str, int | Fraction]]):
        summed: Counter = Counter()
        for lab in LABELS:
            summed.update(by_truth.get(lab, {}))
        return cls(n, dict(summed), {lab: dict(by_truth.get(lab, {})) for lab in LABELS})

    @property
    def total(self):
        return sum(self.counts.values(), 0)

    def __getitem__(self, pattern: str):
        return self.counts.get(pattern, 0)

    def label_total(self, label: str):
        if self.by_truth is None:
            raise PreconditionError("counts carry no by-truth split")
        return sum(self.by_truth[label].values(), 0)

    def dense(self) -> list[int | Fraction]:
        return [self[p] for p in all_patterns(self.n)]

    @property
    def is_integral(self) -> bool:
        vals = list(self.counts.values())
        if self.by_truth is not None:
            vals += [v for lab in LABELS for v in self.by_truth[lab].values()]
        return all(isinstance(v, int) or v.denominator == 1 for v in vals)

    def without_truth(self) -> "DecisionCounts":
        return DecisionCounts(self.n, dict(self.counts))

    def flipped(self) -> "DecisionCounts":
        """Swap the two labels in every vote (truth buckets are untouched)."""
        c = {flip_pattern(p): v for p, v in self.counts.items()}
        bt = None
        if self.by_truth is not None:
            bt = {lab: {flip_pattern(p): v for p, v in self.by_truth[lab].items()} for lab in LABELS}
        return DecisionCounts(self.n, c, bt)

    def __add__(self, other: "DecisionCounts") -> "DecisionCounts":
        if not isinstance(other, DecisionCounts):
            return NotImplemented
        if other.n != self.n:
            raise PreconditionError("cannot merge counts of different n")
        c = Counter(self.counts)
        c.update(other.counts)
        bt = None
        if self.by_truth is not None and other.by_truth is not None:
            bt = {}
            for lab in LABELS:
                b = Counter(self.by_truth[lab])
                b.update(other.by_truth[lab])
                bt[lab] = dict(b)
        return DecisionCounts(self.n, dict(c), bt)


def tally_counts(votes: VoteMatrix) -> DecisionCounts:
    counts = Counter(votes.rows)
    by_truth = None
    if votes.truth is not None:
        by_truth = {lab: Counter() for lab in LABELS}
        for row, t in zip(votes.rows, votes.truth):
            by_truth[t][row] += 1
        by_truth = {lab: dict(c) for lab, c in by_truth.items()}
    return DecisionCounts(votes.n, dict(counts), by_truth)


def marginalize_truth(counts: DecisionCounts) -> DecisionCounts:
    if counts.by_truth is None:
        raise PreconditionError("marginalize_truth needs by-truth counts")
    return DecisionCounts.from_by_truth(counts.n, counts.by_truth).without_truth()


def _project_map(m: Mapping[str, object], subset: Sequence[int]) -> dict:
    out: Counter = Counter()
    for p, v in m.items():
        out["".join(p[i] for i in subset)] += v
    return dict(out)


def project_subset(counts: DecisionCounts, subset: Iterable[int]) -> DecisionCounts:
    """Counts over an ordered subset of classifiers (0-based indices)."""
    subset = tuple(subset)
    if not subset:
        raise PreconditionError("subset must be non-empty")
    if len(set(subset)) != len(subset):
        raise PreconditionError(f"duplicate classifier index in subset {subset}")
    if any(not 0 <= i < counts.n for i in subset):
        raise PreconditionError(f"subset {subset} out of range for n={counts.n}")
    bt = None
    if counts.by_truth is not None:
        bt = {lab: _project_map(counts.by_truth[lab], subset) for lab in LABELS}
    return DecisionCounts(len(subset), _project_map(counts.counts, subset), bt)
