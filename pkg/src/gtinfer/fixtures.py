"""Decision-event counts by true label for three four-classifier experiments.

Each table row is ``(votes, count_with_true_0, count_with_true_1)`` where
``votes`` lists the four classifiers' decisions in the order of
``classifiers``. Label "0" is alpha and "1" is beta.

The twonorm table puts almost all of its true-0 mass on the all-"1" vote,
so its vote encoding is inverted relative to its truth column; the fixture
carries ``flip_votes=True`` and votes are complemented before use. The
other two tables are used as printed.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .errors import ConfigurationError
from .tally import ALPHA, BETA, DecisionCounts


@dataclass(frozen=True)
class Fixture:
    name: str
    classifiers: tuple[str, ...]
    table: tuple[tuple[str, int, int], ...]
    flip_votes: bool
    # (mean alpha, std alpha, mean beta, std beta) as printed
    expected_summary: tuple[str, str, str, str]

    def counts(self) -> DecisionCounts:
        """By-truth counts with the orientation flag applied."""
        by_truth = {ALPHA: {}, BETA: {}}
        for votes, n0, n1 in self.table:
            pattern = "".join(("b" if v == "0" else "a") if self.flip_votes else
                              ("a" if v == "0" else "b") for v in votes)
            by_truth[ALPHA][pattern] = n0
            by_truth[BETA][pattern] = n1
        return DecisionCounts.from_by_truth(len(self.classifiers), by_truth)

    def raw_column_sums(self) -> tuple[int, int]:
        return sum(r[1] for r in self.table), sum(r[2] for r in self.table)


def display_tolerance(printed: str) -> float:
    """Half a unit in the last displayed digit of a printed decimal."""
    return float(Decimal(1).scaleb(Decimal(printed).as_tuple().exponent) / 2)


TWONORM = Fixture(
    name="twonorm",
    classifiers=("NeuralNetwork", "GradientBoostedTrees", "NaiveBayes", "LogisticRegression"),
    table=(
        ("0000", 4, 1330), ("0001", 7, 237), ("0010", 18, 271), ("0011", 58, 48),
        ("0100", 15, 285), ("0101", 58, 42), ("0110", 50, 58), ("0111", 268, 7),
        ("1000", 11, 258), ("1001", 52, 38), ("1010", 42, 58), ("1011", 247, 8),
        ("1100", 56, 38), ("1101", 284, 7), ("1110", 245, 5), ("1111", 1172, 1),
    ),
    flip_votes=True,
    expected_summary=("-0.0000048", "0.0023", "-0.0021", "0.0024"),
)

SPAMBASE = Fixture(
    name="spambase",
    classifiers=("NeuralNetwork", "SupportVectorMachine", "DecisionTree", "NaiveBayes"),
    table=(
        ("0000", 1827, 185), ("0001", 53, 25), ("0010", 145, 153), ("0011", 13, 30),
        ("0100", 121, 14), ("0101", 17, 12), ("0110", 9, 14), ("0111", 3, 10),
        ("1000", 223, 151), ("1001", 10, 90), ("1010", 45, 182), ("1011", 5, 268),
        ("1100", 26, 22), ("1101", 5, 66), ("1110", 5, 65), ("1111", 2, 345),
    ),
    flip_votes=False,
    expected_summary=("0.0056", "0.0036", "0.067", "0.020"),
)

MUSHROOM = Fixture(
    name="mushroom",
    classifiers=("DecisionTree", "NaiveBayes", "NeuralNetwork", "SupportVectorMachine"),
    table=(
        ("0000", 2929, 0), ("0001", 75, 0), ("0010", 70, 28), ("0011", 45, 266),
        ("0100", 135, 35), ("0101", 0, 0), ("0110", 16, 14), ("0111", 42, 174),
        ("1000", 310, 0), ("1001", 5, 0), ("1010", 110, 29), ("1011", 10, 106),
        ("1100", 20, 29), ("1101", 0, 129), ("1110", 20, 0), ("1111", 0, 2714),
    ),
    flip_votes=False,
    expected_summary=("0.012", "0.011", "0.017", "0.025"),
)

FIXTURES = {f.name: f for f in (TWONORM, SPAMBASE, MUSHROOM)}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise ConfigurationError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
