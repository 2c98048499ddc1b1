"""Tests for the free commutative superalgebra layer."""

from __future__ import annotations

import doctest
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import supercartan.superalgebra
from supercartan.superalgebra import (
    QQ,
    ZSQRT2,
    ZZ,
    CoercionError,
    NotInvertibleError,
    ParseError,
    SpecMismatchError,
    Sqrt2,
    SuperAlgebra,
    SuperElement,
    format_element,
    in_odd_power_span,
    in_odd_power_subalgebra,
    odd_filtration_degree,
    parse_element,
    sa_invert,
    sa_mul,
)

A_INT = SuperAlgebra(ZZ, even_gens=1, odd_gens=4)
A_RAT = SuperAlgebra(QQ, even_gens=2, odd_gens=4)
A_SQRT = SuperAlgebra(ZSQRT2, even_gens=0, odd_gens=3)


def term_keys(algebra: SuperAlgebra, max_deg: int = 2) -> st.SearchStrategy:
    evens = st.tuples(*([st.integers(0, max_deg)] * algebra.even_gens))
    odds = st.integers(0, (1 << algebra.odd_gens) - 1)
    return st.tuples(evens, odds)


def elements(
    algebra: SuperAlgebra,
    coeffs: st.SearchStrategy | None = None,
    max_terms: int = 4,
) -> st.SearchStrategy:
    if coeffs is None:
        coeffs = st.integers(-4, 4)
    return st.dictionaries(term_keys(algebra), coeffs, max_size=max_terms).map(
        lambda terms: SuperElement(algebra, terms)
    )


def rational_coeffs() -> st.SearchStrategy:
    return st.fractions(min_value=-4, max_value=4, max_denominator=6)


def sqrt2_coeffs() -> st.SearchStrategy:
    return st.builds(Sqrt2, st.integers(-3, 3), st.integers(-3, 3))


# ---------------------------------------------------------------------------
# Sqrt2 and the base rings
# ---------------------------------------------------------------------------


class TestSqrt2:
    def test_multiplication_rule_specific(self):
        assert Sqrt2(1, 2) * Sqrt2(3, 4) == Sqrt2(1 * 3 + 2 * 2 * 4, 1 * 4 + 2 * 3)

    @given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
    def test_multiplication_rule(self, a, b, c, d):
        product = Sqrt2(a, b) * Sqrt2(c, d)
        assert product == Sqrt2(a * c + 2 * b * d, a * d + b * c)

    @given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9))
    def test_norm_multiplicative(self, a, b, c, d):
        x, y = Sqrt2(a, b), Sqrt2(c, d)
        assert (x * y).norm() == x.norm() * y.norm()

    def test_inverse(self):
        x = Sqrt2(1, 1)  # norm -1, fundamental unit
        assert x.inverse() == Sqrt2(-1, 1)
        assert x * x.inverse() == 1
        y = Sqrt2(3, 1)  # norm 7
        assert y * y.inverse() == 1
        with pytest.raises(ZeroDivisionError):
            Sqrt2(0, 0).inverse()

    def test_mixed_arithmetic(self):
        assert 1 + Sqrt2(0, 1) == Sqrt2(1, 1)
        assert Fraction(1, 2) * Sqrt2(2, 4) == Sqrt2(1, 2)
        assert 2 - Sqrt2(1, 1) == Sqrt2(1, -1)
        assert Sqrt2(4, 2) / 2 == Sqrt2(2, 1)

    def test_eq_hash_against_plain_numbers(self):
        assert Sqrt2(3, 0) == 3
        assert hash(Sqrt2(3, 0)) == hash(3)
        assert Sqrt2(0, 1) != 1
        assert Sqrt2(Fraction(1, 2), 0) == Fraction(1, 2)

    def test_str(self):
        assert str(Sqrt2(1, 2)) == "1+2*sqrt2"
        assert str(Sqrt2(1, -1)) == "1-sqrt2"
        assert str(Sqrt2(0, -2)) == "-2*sqrt2"
        assert str(Sqrt2(-5, 0)) == "-5"


class TestBaseRing:
    def test_coerce(self):
        assert ZZ.coerce(Fraction(4, 2)) == 2
        assert isinstance(ZZ.coerce(Fraction(4, 2)), int)
        assert QQ.coerce(3) == Fraction(3)
        assert ZSQRT2.coerce(2) == Sqrt2(2, 0)
        with pytest.raises(CoercionError):
            ZZ.coerce(Fraction(1, 2))
        with pytest.raises(CoercionError):
            ZSQRT2.coerce(Sqrt2(Fraction(1, 2), 0))
        with pytest.raises(CoercionError):
            ZZ.coerce(0.5)
        with pytest.raises(CoercionError):
            ZZ.coerce(True)

    def test_units(self):
        assert ZZ.is_unit(-1) and not ZZ.is_unit(2)
        assert QQ.is_unit(Fraction(2, 3)) and not QQ.is_unit(0)
        assert ZSQRT2.is_unit(Sqrt2(1, 1))  # norm -1
        assert ZSQRT2.is_unit(Sqrt2(3, 2))  # norm 1
        assert not ZSQRT2.is_unit(Sqrt2(0, 1))  # norm -2

    def test_invert(self):
        assert ZZ.invert(-1) == -1
        assert QQ.invert(Fraction(2, 3)) == Fraction(3, 2)
        assert ZSQRT2.invert(Sqrt2(3, 2)) == Sqrt2(3, -2)
        assert ZSQRT2.invert(Sqrt2(1, 1)) == Sqrt2(-1, 1)
        with pytest.raises(NotInvertibleError):
            ZZ.invert(2)


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


class TestProduct:
    def test_odd_square_is_zero(self):
        assert sa_mul(A_INT.xi(1), A_INT.xi(1)).is_zero()

    def test_sign_rule(self):
        xi1, xi2 = A_INT.xi(1), A_INT.xi(2)
        assert xi1 * xi2 == A_INT.monomial(odd_indices=(1, 2))
        assert xi2 * xi1 == A_INT.monomial(odd_indices=(1, 2), coeff=-1)

    def test_unit_product(self):
        x = A_INT.one() + A_INT.t(1) * A_INT.xi(1)
        y = A_INT.one() - A_INT.t(1) * A_INT.xi(1)
        assert x * y == A_INT.one()

    def test_interleaving_sign(self):
        # xi1*xi3 times xi2: moving xi2 past xi3 is one transposition.
        A = SuperAlgebra(ZZ, even_gens=0, odd_gens=3)
        lhs = A.monomial(odd_indices=(1, 3)) * A.xi(2)
        assert lhs == A.monomial(odd_indices=(1, 2, 3), coeff=-1)

    def test_spec_mismatch(self):
        other = SuperAlgebra(ZZ, even_gens=1, odd_gens=3)
        with pytest.raises(SpecMismatchError):
            sa_mul(A_INT.xi(1), other.xi(1))
        with pytest.raises(SpecMismatchError):
            A_INT.one() + other.one()

    @given(elements(A_RAT, rational_coeffs()), elements(A_RAT, rational_coeffs()))
    def test_supercommutativity(self, x, y):
        for a in (x.even_part(), x.odd_part()):
            for b in (y.even_part(), y.odd_part()):
                sign = -1 if (a.parity() == 1 and b.parity() == 1) else 1
                assert a * b == sign * (b * a)

    @given(elements(A_INT))
    def test_odd_square(self, x):
        z = x.odd_part()
        assert (z * z).is_zero()

    @given(elements(A_INT), elements(A_INT), elements(A_INT))
    @settings(max_examples=50)
    def test_associativity_distributivity(self, x, y, z):
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z

    @given(elements(A_SQRT, sqrt2_coeffs()), elements(A_SQRT, sqrt2_coeffs()))
    @settings(max_examples=40)
    def test_sqrt2_supercommutativity(self, x, y):
        for a in (x.even_part(), x.odd_part()):
            for b in (y.even_part(), y.odd_part()):
                sign = -1 if (a.parity() == 1 and b.parity() == 1) else 1
                assert a * b == sign * (b * a)


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------


class TestInvert:
    def test_examples(self):
        u = A_INT.one() + A_INT.xi(1) * A_INT.xi(2)
        assert sa_invert(u) == A_INT.one() - A_INT.xi(1) * A_INT.xi(2)
        assert sa_invert(A_INT.scalar(-1)) == A_INT.scalar(-1)
        v = A_RAT.scalar(2) + A_RAT.xi(1) * A_RAT.xi(2)
        expected = A_RAT.scalar(Fraction(1, 2)) + A_RAT.monomial(
            odd_indices=(1, 2), coeff=Fraction(-1, 4)
        )
        assert sa_invert(v) == expected
        assert v * sa_invert(v) == A_RAT.one()

    def test_rejections(self):
        with pytest.raises(NotInvertibleError):
            sa_invert(A_INT.one() + A_INT.t(1))  # non-nilpotent remainder
        with pytest.raises(NotInvertibleError):
            sa_invert(A_INT.scalar(2))  # 2 is not a unit of ZZ
        with pytest.raises(NotInvertibleError):
            sa_invert(A_INT.xi(1))  # odd
        with pytest.raises(NotInvertibleError):
            sa_invert(A_INT.zero())
        with pytest.raises(NotInvertibleError):
            sa_invert(A_RAT.one() + A_RAT.t(1) * A_RAT.t(2))

    def test_even_polynomial_coefficients_are_fine_on_odd_terms(self):
        # t-dependence inside terms that carry odd generators is nilpotent.
        u = A_RAT.scalar(3) + A_RAT.t(1) * A_RAT.xi(1) * A_RAT.xi(2)
        assert u * sa_invert(u) == A_RAT.one()

    @given(elements(A_RAT, rational_coeffs()), st.sampled_from([1, -1, 2, 3]))
    @settings(max_examples=60)
    def test_round_trip(self, noise, body):
        nilpotent = SuperElement(
            A_RAT,
            {
                key: c
                for (key, c) in noise.items()
                if key[1] != 0 and key[1].bit_count() % 2 == 0
            },
        )
        u = A_RAT.scalar(body) + nilpotent
        assert u * sa_invert(u) == A_RAT.one()

    @given(elements(A_INT), st.sampled_from([1, -1]))
    @settings(max_examples=60)
    def test_round_trip_integers(self, noise, body):
        nilpotent = SuperElement(
            A_INT,
            {
                key: c
                for (key, c) in noise.items()
                if key[1] != 0 and key[1].bit_count() % 2 == 0
            },
        )
        u = A_INT.scalar(body) + nilpotent
        assert u * sa_invert(u) == A_INT.one()


# ---------------------------------------------------------------------------
# Odd filtration
# ---------------------------------------------------------------------------


class TestFiltration:
    def test_examples(self):
        x = A_INT.monomial(odd_indices=(1, 2))
        y = A_INT.monomial(odd_indices=(1, 2, 3, 4))
        assert odd_filtration_degree(x + y) == 2
        assert odd_filtration_degree(A_INT.one()) == 0
        assert odd_filtration_degree(A_INT.zero()) == math.inf

    def test_span_membership(self):
        x = A_INT.monomial(odd_indices=(1, 2))
        assert in_odd_power_span(x, 2)
        assert in_odd_power_span(x, 0)
        assert not in_odd_power_span(x, 1)  # parity obstruction
        tri = A_INT.monomial(odd_indices=(1, 2, 3))
        assert in_odd_power_span(tri, 3)
        assert in_odd_power_span(tri, 1)
        assert not in_odd_power_span(tri, 2)
        mixed = x + tri
        assert not any(in_odd_power_span(mixed, m) for m in range(5))
        assert odd_filtration_degree(mixed) == 2  # but the ideal sees it
        assert in_odd_power_span(A_INT.zero(), 3)

    def test_subalgebra_membership(self):
        assert in_odd_power_subalgebra(A_INT.scalar(5), 3)
        assert not in_odd_power_subalgebra(A_INT.t(1), 1)
        x = A_INT.monomial(odd_indices=(1, 2))
        assert in_odd_power_subalgebra(x, 1)  # j = 2
        assert in_odd_power_subalgebra(x, 2)
        quad = A_INT.monomial(odd_indices=(1, 2, 3, 4))
        assert in_odd_power_subalgebra(quad, 2)  # j = 2
        tri = A_INT.monomial(odd_indices=(1, 2, 3))
        assert not in_odd_power_subalgebra(tri, 2)
        # m = 0 gives the even part
        assert in_odd_power_subalgebra(A_INT.t(1) + x, 0)
        assert not in_odd_power_subalgebra(A_INT.xi(1), 0)

    @given(elements(A_RAT, rational_coeffs()), elements(A_RAT, rational_coeffs()))
    def test_multiplicative(self, x, y):
        assert odd_filtration_degree(x * y) >= odd_filtration_degree(
            x
        ) + odd_filtration_degree(y)


# ---------------------------------------------------------------------------
# Text grammar
# ---------------------------------------------------------------------------


class TestGrammar:
    def test_parse_specific(self):
        x = parse_element(A_RAT, "1/2 - 1/4*xi1*xi2")
        assert x == A_RAT.scalar(Fraction(1, 2)) + A_RAT.monomial(
            odd_indices=(1, 2), coeff=Fraction(-1, 4)
        )
        y = parse_element(A_RAT, "-(t1 + xi1) * xi2")
        assert y == -(A_RAT.t(1) + A_RAT.xi(1)) * A_RAT.xi(2)
        z = parse_element(A_SQRT, "(1 + sqrt2) * xi1 - 2*sqrt2")
        assert z == A_SQRT.xi(1) * Sqrt2(1, 1) - A_SQRT.scalar(Sqrt2(0, 2))

    def test_parse_errors(self):
        for bad in ("xi9", "t1 t2", "1/0", "q5", "1 +", "(xi1", "xi1)", "?", ""):
            with pytest.raises(ParseError):
                parse_element(A_INT, bad)
        with pytest.raises(CoercionError):
            parse_element(A_INT, "1/2")  # not an integer
        with pytest.raises(CoercionError):
            parse_element(A_INT, "sqrt2")

    def test_format_specific(self):
        assert format_element(A_RAT.zero()) == "0"
        assert format_element(-A_RAT.one()) == "-1"
        x = A_RAT.monomial(odd_indices=(1,), coeff=Fraction(3, 2))
        assert format_element(x) == "3/2*xi1"
        y = A_SQRT.xi(1) * Sqrt2(1, 1)
        assert format_element(y) == "(1+sqrt2)*xi1"
        z = A_INT.t(1) * A_INT.t(1) * A_INT.xi(3) - 2
        assert format_element(z) == "-2 + t1*t1*xi3"

    @given(elements(A_RAT, rational_coeffs()))
    def test_round_trip_rationals(self, x):
        assert parse_element(A_RAT, format_element(x)) == x

    @given(elements(A_SQRT, sqrt2_coeffs()))
    def test_round_trip_sqrt2(self, x):
        assert parse_element(A_SQRT, format_element(x)) == x

    @given(elements(A_INT))
    def test_round_trip_integers(self, x):
        assert parse_element(A_INT, format_element(x)) == x


# ---------------------------------------------------------------------------
# Misc structure
# ---------------------------------------------------------------------------


class TestStructure:
    def test_parity(self):
        assert A_INT.one().parity() == 0
        assert A_INT.xi(1).parity() == 1
        assert (A_INT.one() + A_INT.xi(1)).parity() is None
        assert A_INT.zero().parity() == 0
        assert A_INT.zero().is_odd() and A_INT.zero().is_even()

    def test_parts(self):
        x = A_INT.one() + A_INT.xi(1) + A_INT.monomial(odd_indices=(1, 2))
        assert x.even_part() + x.odd_part() == x
        assert x.even_part().is_even() and x.odd_part().is_odd()

    def test_body_and_coefficient(self):
        x = A_RAT.scalar(Fraction(2, 3)) + A_RAT.t(1) * A_RAT.xi(2)
        assert x.body() == Fraction(2, 3)
        assert x.coefficient(even_exps=(1, 0), odd_indices=(2,)) == 1
        assert x.coefficient(even_exps=(0, 1), odd_indices=(2,)) == 0

    def test_odd_coefficient(self):
        x = A_RAT.t(1) * A_RAT.xi(1) * A_RAT.xi(2) + A_RAT.xi(1) * A_RAT.xi(2) * 3
        coeff = x.odd_coefficient((1, 2))
        assert coeff == A_RAT.t(1) + A_RAT.scalar(3)

    def test_monomial_validation(self):
        with pytest.raises(ValueError):
            A_INT.monomial(odd_indices=(1, 1))
        with pytest.raises(ValueError):
            A_INT.monomial(odd_indices=(9,))
        with pytest.raises(ValueError):
            A_INT.xi(0)

    def test_algebra_validation(self):
        with pytest.raises(ValueError):
            SuperAlgebra(ZZ, even_gens=-1)
        with pytest.raises(ValueError):
            SuperAlgebra(ZZ, odd_gens=65)
        with pytest.raises(TypeError):
            SuperAlgebra("ZZ", 1, 1)

    def test_hash_consistency(self):
        x = A_INT.xi(1) * A_INT.xi(2)
        y = -(A_INT.xi(2) * A_INT.xi(1))
        assert x == y and hash(x) == hash(y)

    def test_power(self):
        x = A_RAT.one() + A_RAT.xi(1) * A_RAT.xi(2)
        assert x ** 2 == A_RAT.one() + 2 * A_RAT.xi(1) * A_RAT.xi(2)
        assert x ** 0 == A_RAT.one()


def test_doctests():
    failures = doctest.testmod(supercartan.superalgebra).failed
    assert failures == 0
