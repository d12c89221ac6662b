from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from doubleshuffle import ncalg
from doubleshuffle.ncalg import (
    E0,
    E1,
    EMPTY_WORD,
    TensorSeries,
    TruncatedSeries,
    TruncationMismatch,
    UnivariateSeries,
    exp_series,
    gamma_series,
    inverse_series,
    is_grouplike,
    is_primitive,
    log_series,
    primitive_coproduct,
    reg_word,
    render_series,
    shuffle_words,
)


def series(coeffs, trunc):
    return TruncatedSeries({w: Fraction(c) for w, c in coeffs.items()}, trunc)


def words_up_to(n):
    out = [EMPTY_WORD]
    for d in range(1, n + 1):
        out.extend(tuple((k >> i) & 1 for i in range(d)) for k in range(2**d))
    return out


@st.composite
def random_series(draw, trunc=4, max_terms=5):
    ws = words_up_to(trunc)
    n = draw(st.integers(0, max_terms))
    coeffs = {}
    for _ in range(n):
        w = draw(st.sampled_from(ws))
        c = draw(st.integers(-4, 4))
        coeffs[w] = coeffs.get(w, 0) + Fraction(c, draw(st.integers(1, 3)))
    return TruncatedSeries(coeffs, trunc)


class TestConcat:
    def test_monomial_concatenation(self):
        a = TruncatedSeries.letter(0, 3)
        b = TruncatedSeries.letter(1, 3)
        assert (a * b).coeffs == {(0, 1): 1}

    def test_distributivity(self):
        one = TruncatedSeries.one(3)
        a = one + TruncatedSeries.letter(0, 3)
        b = one + TruncatedSeries.letter(1, 3)
        assert (a * b).coeffs == {(): 1, (0,): 1, (1,): 1, (0, 1): 1}

    def test_truncation_drops_degree_two(self):
        a = TruncatedSeries.letter(0, 1)
        b = TruncatedSeries.letter(1, 1)
        assert (a * b).is_zero()

    def test_trunc_mismatch_raises(self):
        with pytest.raises(TruncationMismatch):
            TruncatedSeries.one(2) * TruncatedSeries.one(3)

    @given(random_series(), random_series(), random_series())
    @settings(max_examples=60, deadline=None)
    def test_associative_with_unit(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        one = TruncatedSeries.one(a.trunc)
        assert a * one == a
        assert one * a == a


class TestShuffle:
    def test_two_single_letters(self):
        a = TruncatedSeries.letter(0, 2)
        b = TruncatedSeries.letter(1, 2)
        assert a.shuffle(b).coeffs == {(0, 1): 1, (1, 0): 1}

    def test_square_of_letter(self):
        a = TruncatedSeries.letter(0, 2)
        assert a.shuffle(a).coeffs == {(0, 0): 2}

    def test_e0e1_shuffle_e1(self):
        # Expected value computed by the brute-force interleaving enumerator.
        expected = {}
        for w, m in shuffle_words((0, 1), (1,)).items():
            expected[w] = expected.get(w, 0) + m
        a = TruncatedSeries.unit_word((0, 1), 3)
        b = TruncatedSeries.letter(1, 3)
        assert a.shuffle(b).coeffs == expected
        # and the enumerator itself is what we think it is
        assert expected == {(0, 1, 1): 2, (1, 0, 1): 1}

    @given(random_series(trunc=3), random_series(trunc=3))
    @settings(max_examples=40, deadline=None)
    def test_commutative(self, a, b):
        assert a.shuffle(b) == b.shuffle(a)

    def test_shuffle_coproduct_duality(self):
        # (Delta(w) | u(x)v) == (u sh v | w) whenever deg u + deg v = deg w <= 6
        for w in words_up_to(6):
            if not w:
                continue
            delta = primitive_coproduct(TruncatedSeries.unit_word(w, len(w)))
            for du in range(len(w) + 1):
                for u in (x for x in words_up_to(du) if len(x) == du):
                    dv = len(w) - du
                    for v in (x for x in words_up_to(dv) if len(x) == dv):
                        lhs = delta.coeff(u, v)
                        rhs = shuffle_words(u, v).get(w, 0)
                        assert lhs == rhs


class TestCoproduct:
    def test_letter_is_primitive(self):
        d = primitive_coproduct(TruncatedSeries.letter(0, 2))
        assert d.coeffs == {((0,), ()): 1, ((), (0,)): 1}

    def test_unit(self):
        assert primitive_coproduct(TruncatedSeries.one(2)) == TensorSeries.one(2)

    def test_word_e0e1(self):
        d = primitive_coproduct(TruncatedSeries.unit_word((0, 1), 2))
        assert d.coeffs == {
            ((0, 1), ()): 1,
            ((0,), (1,)): 1,
            ((1,), (0,)): 1,
            ((), (0, 1)): 1,
        }

    @given(random_series(trunc=3, max_terms=3), random_series(trunc=3, max_terms=3))
    @settings(max_examples=30, deadline=None)
    def test_algebra_morphism(self, a, b):
        assert primitive_coproduct(a * b) == primitive_coproduct(a) * primitive_coproduct(b)


class TestExpLog:
    def test_exp_zero(self):
        assert exp_series(TruncatedSeries.zero(3)) == TruncatedSeries.one(3)

    def test_exp_letter_degree_two(self):
        e = exp_series(TruncatedSeries.letter(0, 2))
        assert e.coeffs == {(): 1, (0,): 1, (0, 0): Fraction(1, 2)}

    @pytest.mark.parametrize("trunc", range(1, 9))
    def test_log_exp_roundtrip(self, trunc):
        a = TruncatedSeries.letter(0, trunc)
        assert log_series(exp_series(a)) == a

    @given(random_series(trunc=4, max_terms=4))
    @settings(max_examples=30, deadline=None)
    def test_roundtrip_random(self, a):
        a = a - TruncatedSeries({EMPTY_WORD: a.constant_term()}, a.trunc)
        assert log_series(exp_series(a)) == a
        g = exp_series(a)
        assert exp_series(log_series(g)) == g

    def test_exp_requires_zero_constant(self):
        with pytest.raises(ValueError):
            exp_series(TruncatedSeries.one(2))

    def test_inverse(self):
        g = exp_series(TruncatedSeries.letter(1, 4))
        assert g * inverse_series(g) == TruncatedSeries.one(4)


class TestGrouplike:
    def test_exp_of_letter_is_grouplike(self):
        assert is_grouplike(exp_series(TruncatedSeries.letter(0, 4)))

    def test_one_plus_e0e1_is_not(self):
        a = TruncatedSeries.one(2) + TruncatedSeries.unit_word((0, 1), 2)
        assert not is_grouplike(a)

    def test_letter_is_primitive(self):
        assert is_primitive(TruncatedSeries.letter(0, 3))

    def test_grouplike_iff_primitive_log(self):
        # exp(p) group-like iff p primitive, on seeded random primitives
        import random

        rng = random.Random(7)
        for _ in range(50):
            p = _random_lie(rng, trunc=5)
            assert is_primitive(p)
            assert is_grouplike(exp_series(p))
        # negative control: a non-primitive element
        q = TruncatedSeries.unit_word((0, 1), 5)
        assert not is_primitive(q)
        assert not is_grouplike(exp_series(q))


def _random_lie(rng, trunc):
    """Random combination of nested commutators of the letters."""

    def bracket(depth):
        if depth <= 1:
            return TruncatedSeries.letter(rng.choice([0, 1]), trunc)
        left = bracket(rng.randint(1, depth - 1))
        right = bracket(depth - rng.randint(1, depth - 1))
        return left * right - right * left

    out = TruncatedSeries.zero(trunc)
    for _ in range(rng.randint(1, 4)):
        out = out + bracket(rng.randint(1, 4)).scale(Fraction(rng.randint(-3, 3)))
    return out


class TestGamma:
    def test_gamma_of_one(self):
        assert gamma_series(TruncatedSeries.one(4)) == UnivariateSeries.one(4)

    def test_gamma_of_exp_c_e1(self):
        # only the n=1 term survives: Gamma = exp(c t)
        c = Fraction(3, 2)
        g = exp_series(TruncatedSeries.letter(1, 4).scale(c))
        expo = UnivariateSeries({1: c}, 4)
        assert gamma_series(g) == expo.exp()

    def test_gamma_quadratic_term(self):
        s = Fraction(5, 7)
        g = TruncatedSeries({EMPTY_WORD: Fraction(1), (0, 1): s}, 4)
        gamma = gamma_series(g)
        assert gamma.coeff(1) == 0
        assert gamma.coeff(2) == -s / 2


class TestRegularization:
    def test_reg_e0e1(self):
        assert reg_word((0, 1)).coeffs == {(0, 1): 1, (1, 0): -1}

    def test_reg_e0e0e1(self):
        assert reg_word((0, 0, 1)).coeffs == {(0, 0, 1): 1, (0, 1, 0): -2, (1, 0, 0): 1}

    def test_reg_minus_word_is_non_admissible(self):
        from doubleshuffle.ncalg import is_admissible

        for w in words_up_to(5):
            if not is_admissible(w):
                continue
            r = reg_word(w)
            rest = r - TruncatedSeries.unit_word(w, len(w))
            assert all(not is_admissible(u) for u in rest.coeffs)

    def test_rejects_non_admissible(self):
        with pytest.raises(ValueError):
            reg_word((1, 0))


def test_render():
    a = series({EMPTY_WORD: 1, (0, 1): Fraction(3, 2), (1,): -1}, 3)
    assert render_series(a) == "1 + -1*e1 + 3/2*e0e1"
