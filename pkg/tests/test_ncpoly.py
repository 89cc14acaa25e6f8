"""Noncommutative polynomial arithmetic and the ab/cd substitutions."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdposet.ncpoly import (
    AB,
    CD,
    AlphabetMismatch,
    InhomogeneousInput,
    NcPolynomial,
    NotInImage,
    ab_to_cd,
    ab_words,
    cd_words,
    expand_cd_to_ab,
    format_polynomial,
    multiply_right_letter,
    substitute_a_minus_b,
    substitute_a_plus_b,
    word_degree,
)


def cd(terms):
    return NcPolynomial(CD, terms)


def ab(terms):
    return NcPolynomial(AB, terms)


def cd_polys(max_degree=5, max_coeff=6):
    def build(draw):
        degree = draw(st.integers(min_value=0, max_value=max_degree))
        words = cd_words(degree)
        coeffs = draw(
            st.lists(st.integers(-max_coeff, max_coeff), min_size=len(words), max_size=len(words))
        )
        return cd(dict(zip(words, coeffs)))

    return st.composite(build)()


class TestArithmetic:
    def test_add_disjoint_supports(self):
        assert cd({"cc": 1}) + cd({"d": 2}) == cd({"cc": 1, "d": 2})

    def test_add_cancellation(self):
        assert (cd({"cd": 1}) + cd({"cd": -1})).is_zero()

    def test_add_collects(self):
        assert ab({"a": 1, "b": 1}) + ab({"a": 1, "b": -1}) == ab({"a": 2})

    def test_add_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            cd({"c": 1}) + ab({"a": 1})

    def test_right_letter_square_example(self):
        assert multiply_right_letter(cd({"cc": 1, "d": 2}), "c") == cd({"ccc": 1, "dc": 2})

    def test_right_letter_unit(self):
        assert multiply_right_letter(NcPolynomial.unit(CD), "d") == cd({"d": 1})

    def test_right_letter_word(self):
        assert multiply_right_letter(cd({"cd": 1}), "c") == cd({"cdc": 1})

    def test_right_letter_foreign(self):
        with pytest.raises(AlphabetMismatch):
            multiply_right_letter(cd({"c": 1}), "a")

    @given(p=cd_polys(), q=cd_polys())
    def test_right_letter_distributes(self, p, q):
        assert multiply_right_letter(p + q, "d") == multiply_right_letter(p, "d") + multiply_right_letter(q, "d")

    @given(p=cd_polys())
    def test_degree_additive(self, p):
        if p.is_zero():
            return
        if not p.is_homogeneous():
            return
        assert multiply_right_letter(p, "d").degree() == p.degree() + 2
        assert multiply_right_letter(p, "c").degree() == p.degree() + 1


class TestSubstitutions:
    def test_expand_generators(self):
        assert expand_cd_to_ab(cd({"c": 1})) == ab({"a": 1, "b": 1})
        assert expand_cd_to_ab(cd({"d": 1})) == ab({"ab": 1, "ba": 1})

    def test_expand_c_squared(self):
        assert expand_cd_to_ab(cd({"cc": 1})) == ab({"aa": 1, "ab": 1, "ba": 1, "bb": 1})

    def test_extract_degree_one(self):
        assert ab_to_cd(ab({"a": 1, "b": 1})) == cd({"c": 1})

    def test_extract_square(self):
        assert ab_to_cd(ab({"aa": 1, "ab": 3, "ba": 3, "bb": 1})) == cd({"cc": 1, "d": 2})

    def test_extract_not_in_image(self):
        with pytest.raises(NotInImage):
            ab_to_cd(ab({"a": 1}))

    def test_extract_inhomogeneous(self):
        with pytest.raises(InhomogeneousInput):
            ab_to_cd(ab({"a": 1, "aa": 1}))

    def test_substitute_diamond_chain_polynomial(self):
        assert substitute_a_minus_b(ab({"a": 1, "b": 2})) == ab({"a": 1, "b": 1})

    def test_substitute_fixes_b(self):
        assert substitute_a_minus_b(ab({"b": 1})) == ab({"b": 1})

    def test_substitute_aa(self):
        assert substitute_a_minus_b(ab({"aa": 1})) == ab({"aa": 1, "ab": -1, "ba": -1, "bb": 1})

    @given(p=cd_polys())
    @settings(deadline=None)
    def test_expand_extract_round_trip(self, p):
        assert ab_to_cd(expand_cd_to_ab(p)) == p

    @given(p=cd_polys(max_degree=4))
    @settings(deadline=None)
    def test_substitution_inverse(self, p):
        q = expand_cd_to_ab(p)
        assert substitute_a_plus_b(substitute_a_minus_b(q)) == q


class TestWords:
    def test_fibonacci_dimension(self):
        assert [len(cd_words(d)) for d in range(11)] == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]

    def test_ab_words_count(self):
        assert len(ab_words(6)) == 64

    def test_degree_counts_d_twice(self):
        assert word_degree("cdc") == 4
        assert word_degree("dd") == 4


class TestTextForm:
    def test_exponent_compression(self):
        assert str(cd({"ccc": 1, "cd": 5, "dc": 5})) == "c^3 + 5cd + 5dc"

    def test_zero_and_unit(self):
        assert str(NcPolynomial.zero(CD)) == "0"
        assert str(NcPolynomial.unit(CD)) == "1"

    def test_negative_coefficients(self):
        assert format_polynomial(ab({"aa": 1, "ab": -1})) == "a^2 - ab"
        assert format_polynomial(ab({"ab": -2})) == "-2ab"

    def test_canonical_order_is_graded_lex(self):
        p = cd({"dc": 1, "cd": 1, "ccc": 1, "c": 4})
        assert [w for w, _ in p.items()] == ["c", "ccc", "cd", "dc"]
