import pytest

from glim.models.words import (
    IDENTITY,
    Word,
    count_reduced_words,
    enumerate_reduced_words,
    free_generators,
    parse_word,
)


def test_words_are_reduced_on_construction():
    assert Word((1, -1, 2)) == (2,)
    assert Word((1, 2, -2, -1)).is_identity()
    assert Word.generator(1) * Word.generator(-1) == IDENTITY


def test_product_cancels_only_at_the_junction():
    u = Word((1, 2))
    w = Word((-2, 1))
    assert u * w == (1, 1)
    assert (u * w).length == 2


def test_inverse_and_rank():
    w = Word((1, -2, 3))
    assert w.inverse() == (-3, 2, -1)
    assert (w * w.inverse()).is_identity()
    assert w.rank() == 3
    assert IDENTITY.rank() == 0


def test_repr_and_token():
    w = Word((1, -2))
    assert repr(w) == "g1g2^-1"
    assert w.token() == "1.-2"
    assert repr(IDENTITY) == "e"


def test_zero_letter_is_rejected():
    with pytest.raises(ValueError, match="Invalid letter 0"):
        Word((0,))
    with pytest.raises(ValueError, match="Invalid letter 0"):
        Word.generator(0)


def test_free_generators_order():
    assert free_generators(2) == [(1,), (2,), (-1,), (-2,)]


def test_reduced_word_counts():
    assert count_reduced_words(2, 0) == 1
    assert count_reduced_words(2, 3) == 36
    for length in range(4):
        words = list(enumerate_reduced_words(2, length, length))
        assert len(words) == count_reduced_words(2, length)
        assert len(set(words)) == len(words)
        assert all(Word(w) == w for w in words)


def test_enumerate_is_sorted_by_length():
    lengths = [len(w) for w in enumerate_reduced_words(3, 3)]
    assert lengths == sorted(lengths)
    assert len(lengths) == sum(count_reduced_words(3, l) for l in range(4))


def test_parse_word():
    assert parse_word("1.-2") == (1, -2)
    assert parse_word([2, -1, 1]) == (2,)
    assert parse_word("e") == IDENTITY
    assert parse_word("") == IDENTITY
    with pytest.raises(ValueError, match="Invalid word"):
        parse_word("x")
    with pytest.raises(ValueError, match="Invalid word"):
        parse_word("1.0")
