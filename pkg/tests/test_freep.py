import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gogsep.errors import BudgetExceeded, InputError, MalformedWordError, TrivialWordError
from gogsep.freep import (
    MagnusWitness,
    TruncatedPoly,
    format_free_word,
    free_reduce,
    magnus_image,
    parse_free_word,
    separate_free,
    verify_magnus_witness,
)


def free_words(rank, max_size=8):
    letters = [i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)]
    return st.lists(st.sampled_from(letters), max_size=max_size)


def test_square_needs_degree_two_at_p2():
    witness = separate_free([1, 1], 1, 2)
    assert witness.degree == 2
    assert witness.monomial == (1, 1)
    assert witness.coefficient == 1


def test_cube_needs_degree_three_at_p3():
    witness = separate_free([1, 1, 1], 1, 3)
    assert witness.degree == 3
    assert witness.monomial == (1, 1, 1)


def test_generator_is_separated_at_degree_one():
    witness = separate_free([2], 2, 5)
    assert witness.degree == 1
    assert witness.monomial == (2,)


def test_commutator_lives_in_degree_two():
    # [x1, x2] = 1 + X1X2 - X2X1 + higher terms
    witness = separate_free([1, 2, -1, -2], 2, 3)
    assert witness.degree == 2
    image = magnus_image([1, 2, -1, -2], 2, 2, 3)
    assert image.coefficient((1, 2)) == 1
    assert image.coefficient((2, 1)) == 2
    assert image.coefficient((1,)) == 0


def test_inverse_generator_series():
    inverse = TruncatedPoly.generator(1, -1, 1, 3, 5)
    assert inverse * TruncatedPoly.generator(1, 1, 1, 3, 5) == TruncatedPoly.one(1, 3, 5)


def test_trivial_word_is_rejected():
    with pytest.raises(TrivialWordError):
        separate_free([1, 2, -2, -1], 2, 2)


def test_non_prime_is_rejected():
    with pytest.raises(InputError):
        separate_free([1], 1, 4)


def test_bad_letters_are_rejected():
    with pytest.raises(MalformedWordError):
        separate_free([3], 2, 2)
    with pytest.raises(MalformedWordError):
        magnus_image([1], 1, 0, 2)


def test_magnus_cap():
    with pytest.raises(BudgetExceeded):
        separate_free([1] * 4, 1, 2, cap=3)


def test_parse_and_format_free_words():
    assert parse_free_word("x1 x2^-1 x1", 2) == [1, -2, 1]
    assert format_free_word([1, -2]) == "x1 x2^-1"
    assert format_free_word([]) == "1"
    with pytest.raises(MalformedWordError):
        parse_free_word("y1", 2)
    with pytest.raises(MalformedWordError):
        parse_free_word("x3", 2)


def test_witness_round_trip():
    witness = separate_free([1, 2, 1], 2, 2)
    assert MagnusWitness.from_dict(witness.to_dict()) == witness


@given(free_words(2))
@settings(max_examples=150, deadline=None)
def test_nontrivial_words_are_separated(word):
    reduced = free_reduce(word)
    if not reduced:
        with pytest.raises(TrivialWordError):
            separate_free(word, 2, 2)
        return
    witness = separate_free(word, 2, 2)
    assert verify_magnus_witness(word, witness)
    assert witness.degree <= len(reduced) * 4
    tampered = MagnusWitness(witness.prime, witness.rank, witness.degree, witness.monomial, 0)
    assert not verify_magnus_witness(word, tampered)


@given(free_words(3, 6), free_words(3, 6))
@settings(max_examples=1000, deadline=None)
def test_magnus_map_is_multiplicative(u, v):
    lhs = magnus_image(u + v, 3, 5, 3)
    rhs = magnus_image(u, 3, 5, 3) * magnus_image(v, 3, 5, 3)
    assert lhs == rhs


@given(free_words(3, 6), st.sampled_from([2, 3, 5]))
@settings(max_examples=1000, deadline=None)
def test_magnus_map_respects_inverses(word, prime):
    inverse = [-letter for letter in reversed(word)]
    assert magnus_image(word + inverse, 3, 6, prime).is_one


@given(free_words(3, 10))
@settings(max_examples=100, deadline=None)
def test_free_reduce_is_idempotent(word):
    reduced = free_reduce(word)
    assert free_reduce(reduced) == reduced
    assert all(a != -b for a, b in zip(reduced, reduced[1:]))
