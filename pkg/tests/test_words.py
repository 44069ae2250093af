from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymfluct.models import FreeShiftModel
from asymfluct.words import (
    FreeElement,
    LabelMap,
    Letter,
    Word,
    adjoint,
    apply_injection,
    apply_multitime_shift,
    apply_permutation,
    expand,
    format_word,
    is_reduced,
    normalize_labels,
    parse_word,
    reduce,
    word,
)

FREE = FreeShiftModel()
NAMES = ["1", "e0", "e1", "e0e1", "e1e0", "e2"]


def _words():
    letter = st.tuples(st.sampled_from(NAMES), st.integers(1, 3))
    return st.lists(letter, max_size=7).map(lambda xs: word(*[(FREE.observable(n), j) for n, j in xs]))


def test_reduce_drops_identities_and_merges_neighbours(free):
    e0, e1 = free.observable("e0"), free.observable("e1")
    w = word((e0, 1), (free.one(), 2), (e0, 1), (e1, 2))
    r = reduce(w)
    # e0 e0 = 1 in copy 1, then only e1@2 survives
    assert format_word(r) == "e1@2"
    assert is_reduced(r)


def test_reduce_factors_scalars(free):
    e0 = free.observable("e0")
    w = word((3 * e0, 1), (free.scalar(Fraction(1, 2)), 2))
    r = reduce(w)
    assert r.scalar == Fraction(3, 2)
    assert format_word(r) == "[3/2] e0@1"


def test_reduce_zero_letter(free):
    w = word((free.zero(), 1), (free.observable("e0"), 2))
    assert reduce(w).is_zero()


def test_normalize_labels_pads_missing_copies(free):
    e0 = free.observable("e0")
    padded, nu = normalize_labels(word((e0, 3), (e0, 1)))
    assert nu.nu == (1, 2, 3, 1)
    assert nu.is_normalized()
    assert nu.arity == 3
    assert reduce(padded) == reduce(word((e0, 3), (e0, 1)))


def test_label_map_detects_unnormalized():
    assert not LabelMap((2, 1)).is_normalized()
    assert LabelMap((1, 1, 2, 1, 3)).is_normalized()


def test_letter_rejects_nonpositive_copy(free):
    with pytest.raises(ValueError):
        Letter(free.observable("e0"), 0)


def test_parse_and_format_round_trip(free):
    w = parse_word("[2] e0@1 e1@2 e0e1@1", free)
    assert format_word(w) == "[2] e0@1 e1@2 e0e1@1"
    assert parse_word(format_word(w), free) == w


def test_parse_rejects_malformed(free):
    with pytest.raises(ValueError):
        parse_word("e0", free)
    with pytest.raises(KeyError):
        parse_word("zz@1", free)


def test_permutation_and_injection(free):
    e0, e1 = free.observable("e0"), free.observable("e1")
    w = word((e0, 1), (e1, 2))
    assert apply_permutation(w, {1: 2, 2: 1}).labels == (2, 1)
    assert apply_injection(w, {1: 2, 2: 5}).labels == (2, 5)
    with pytest.raises(ValueError):
        apply_injection(w, {1: 3, 2: 2})
    with pytest.raises(ValueError):
        apply_permutation(w, {1: 2})


def test_multitime_shift_moves_each_copy(free):
    e0 = free.observable("e0")
    w = apply_multitime_shift(word((e0, 1), (e0, 2)), {2: 3})
    assert format_word(w) == "e0@1 e3@2"


def test_expand_distributes_sums(free):
    e0, e1 = free.observable("e0"), free.observable("e1")
    fe = expand(word((e0 + 2 * e1, 1), (e0, 2)))
    assert len(fe) == 2
    assert sorted(str(w.scalar) for w in fe.words()) == ["1", "2"]


def test_free_element_cancels_like_terms(free):
    e0 = free.observable("e0")
    w = word((e0, 1))
    fe = FreeElement([w, Word(w.letters, Fraction(-1))])
    assert len(fe) == 0


@settings(max_examples=200, deadline=None)
@given(_words())
def test_reduce_is_idempotent(w):
    r = reduce(w)
    assert is_reduced(r) or r.is_zero()
    assert reduce(r) == r


@settings(max_examples=200, deadline=None)
@given(_words())
def test_adjoint_is_an_involution(w):
    assert reduce(adjoint(adjoint(w))) == reduce(w)


@settings(max_examples=100, deadline=None)
@given(_words(), _words())
def test_reduce_is_multiplicative(u, v):
    assert reduce(reduce(u) * reduce(v)) == reduce(u * v)


@settings(max_examples=100, deadline=None)
@given(_words())
def test_normalized_padding_always_normalizes(w):
    padded, nu = normalize_labels(w)
    assert nu.is_normalized()
    assert reduce(padded) == reduce(w)
