"""Hypothesis strategies shared by the module tests."""

from fractions import Fraction

from hypothesis import strategies as st

from gtinfer.tally import VoteMatrix


def unit_fractions(max_denominator: int = 30, open_interval: bool = True):
    lo = 1 if open_interval else 0

    @st.composite
    def build(draw):
        d = draw(st.integers(2, max_denominator))
        return Fraction(draw(st.integers(lo, d - lo)), d)

    return build()


@st.composite
def vote_matrices(draw, n=None, min_size=0, max_size=40, truth=True, both_labels=False):
    n = n if n is not None else draw(st.integers(1, 4))
    size = draw(st.integers(max(min_size, 2 if both_labels else 0), max_size))
    rows = draw(st.lists(st.text("ab", min_size=n, max_size=n), min_size=size, max_size=size))
    labels = None
    if truth:
        labels = draw(st.lists(st.sampled_from("ab"), min_size=size, max_size=size))
        if both_labels:
            labels[0], labels[1] = "a", "b"
    return VoteMatrix(tuple(f"c{i + 1}" for i in range(n)), rows, labels)


@st.composite
def independent_params(draw, n=3):
    phi = draw(unit_fractions())
    alpha = draw(st.lists(unit_fractions(), min_size=n, max_size=n))
    beta = draw(st.lists(unit_fractions(), min_size=n, max_size=n))
    return phi, alpha, beta


def nondegenerate(params) -> bool:
    _, alpha, beta = params
    return all(a + b != 1 for a, b in zip(alpha, beta))
