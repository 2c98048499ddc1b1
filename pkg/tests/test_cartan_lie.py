"""Tests for the Cartan-type families: bases, brackets, squares, axiom scans.

The bracket and squaring tests below pin the operator-route results against
independent closed-form predictions (vanishing conditions, support bounds,
coefficient ranges) rather than against values produced by the module itself,
so a sign or ordering bug in either route cannot hide.
"""

from __future__ import annotations

import doctest
import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import supercartan.cartan_lie
from supercartan.cartan_lie import (
    Euler,
    Family,
    FirstType,
    HType,
    LieElement,
    SecondType,
    TildeType,
    basis_bracket,
    bracket,
    cartan_subalgebra_basis,
    enumerate_basis,
    format_lie_element,
    from_derivation,
    parse_lie_element,
    structure_constant_table,
    two_operation,
    vector_degree,
    vector_name,
    vector_parity,
    vector_to_derivation,
    verify_lie_axioms,
)
from supercartan.grassmann import (
    DomainError,
    GrassmannElement,
    ParityError,
    SymplecticForm,
    full_mask,
    hamiltonian_field,
    mask_from_indices,
    mask_weight,
    parse_super_derivation,
    poisson_bracket,
    super_commutator,
    unit_mask,
)
from supercartan.superalgebra import QQ, ParseError, SpecMismatchError

W2, W3, W4 = Family("W", 2), Family("W", 3), Family("W", 4)
S3, S4 = Family("S", 3), Family("S", 4)
ST4 = Family("Stilde", 4)
H4, H5 = Family("H", 4), Family("H", 5)

SMALL_FAMILIES = [W2, W3, S3, ST4, H4]
ALL_FAMILIES = [W2, W3, W4, S3, S4, ST4, H4, H5]


def unit(family: Family, v) -> LieElement:
    return LieElement.from_vector(family, v)


def bit(mask: int, j: int) -> int:
    return (mask >> (j - 1)) & 1


def element_strategy(family: Family, parity=None, include_euler=False):
    vecs = list(enumerate_basis(family))
    if parity is not None:
        vecs = [v for v in vecs if vector_parity(v, family.n) == parity]
    if include_euler:
        vecs = vecs + [Euler()]
    pairs = st.tuples(st.sampled_from(vecs), st.integers(-3, 3))
    return st.lists(pairs, max_size=4).map(lambda prs: LieElement(family, prs))


class TestFamily:
    def test_validation(self):
        for tag, n in [("W", 1), ("S", 2), ("Stilde", 5), ("Stilde", 2), ("H", 3), ("Q", 4), ("W", 17)]:
            with pytest.raises(ValueError):
                Family(tag, n)

    def test_dimension_formulas(self):
        assert Family("W", 2).dim == 8
        assert Family("W", 3).dim == 24
        assert Family("W", 4).dim == 64
        assert Family("S", 3).dim == 17
        assert Family("S", 4).dim == 49
        assert Family("Stilde", 4).dim == 49
        assert Family("Stilde", 6).dim == 321
        assert Family("H", 4).dim == 14
        assert Family("H", 5).dim == 30
        assert Family("H", 6).dim == 62

    def test_enumeration_matches_dimension(self):
        for fam in ALL_FAMILIES + [Family("W", 5), Family("S", 5), Family("H", 6)]:
            assert len(enumerate_basis(fam)) == fam.dim

    def test_rank_and_grading_metadata(self):
        assert W4.rank == 4 and S4.rank == 3 and ST4.rank == 3
        assert H4.rank == 2 and H5.rank == 2
        assert W4.degree_range == (-1, 3)
        assert S4.degree_range == (-1, 2)
        assert ST4.degree_range == (0, 3)
        assert H4.degree_range == (-1, 1)
        assert ST4.cyclic_modulus == 4
        assert not ST4.z_graded and W4.z_graded and H5.z_graded
        assert S3.has_euler_extension and H4.has_euler_extension
        assert not W3.has_euler_extension and not ST4.has_euler_extension

    def test_identity_and_hashing(self):
        assert Family("W", 3) == Family("W", 3)
        assert Family("W", 3) != Family("S", 3)
        assert len({Family("W", 3), Family("W", 3), Family("S", 3)}) == 2
        with pytest.raises(AttributeError):
            Family("W", 3).n = 4


class TestBasis:
    def test_small_census(self):
        st4_basis = enumerate_basis(ST4)
        tildes = [v for v in st4_basis if isinstance(v, TildeType)]
        assert len(tildes) == 4
        assert {v.j for v in tildes} == {1, 2, 3, 4}
        assert all(isinstance(v, FirstType) for v in enumerate_basis(W2))
        assert all(isinstance(v, HType) for v in enumerate_basis(H4))

    def test_no_duplicates_and_canonical_order(self):
        for fam in ALL_FAMILIES:
            basis = enumerate_basis(fam)
            assert len(set(basis)) == len(basis)
            degrees = [vector_degree(v, fam.n) for v in basis]
            assert degrees == sorted(degrees)

    def test_realizations_are_homogeneous(self):
        for fam in SMALL_FAMILIES + [H5]:
            for v in enumerate_basis(fam):
                D = vector_to_derivation(v, fam.n)
                assert D.parity() == vector_parity(v, fam.n)
                if isinstance(v, TildeType):
                    assert set(D.z_degrees()) == {-1, fam.n - 1}
                else:
                    assert set(D.z_degrees()) == {vector_degree(v, fam.n)}

    def test_vector_shape_validation(self):
        with pytest.raises(ValueError):
            SecondType(0, 2, 1)
        with pytest.raises(ValueError):
            SecondType(0b10, 2, 3)
        with pytest.raises(ValueError):
            HType(0)
        with pytest.raises(ValueError):
            FirstType(-1, 1)
        with pytest.raises(ValueError):
            TildeType(0)

    def test_foreign_keys_rejected(self):
        with pytest.raises(SpecMismatchError):
            LieElement(S3, {FirstType(0b1, 1): 1})  # diagonal term alone
        with pytest.raises(SpecMismatchError):
            LieElement(S3, {SecondType(0, 1, 3): 1})  # non-adjacent pair
        with pytest.raises(SpecMismatchError):
            LieElement(W2, {Euler(): 1})
        with pytest.raises(SpecMismatchError):
            LieElement(ST4, {TildeType(5): 1})
        with pytest.raises(SpecMismatchError):
            LieElement(H4, {HType(full_mask(4)): 1})

    def test_euler_key_allowed_where_extension_exists(self):
        for fam in (S3, H4):
            x = LieElement(fam, {Euler(): 2})
            assert x.euler_coefficient() == 2
            assert x.parity() == 0
            E = x.to_derivation()
            for i in range(1, fam.n + 1):
                assert E.component(i) == GrassmannElement.monomial(fam.n, (i,), 2)

    def test_cartan_subalgebra(self):
        for fam in ALL_FAMILIES:
            hs = cartan_subalgebra_basis(fam)
            assert len(hs) == fam.rank
            basis = set(enumerate_basis(fam))
            for v in hs:
                assert v in basis
                assert vector_parity(v, fam.n) == 0
                deg = vector_degree(v, fam.n)
                assert deg == 0 or (not fam.z_graded and deg % fam.n == 0)
            for v in hs:
                for w in hs:
                    assert basis_bracket(fam, v, w).is_zero()


class TestReexpression:
    def test_basis_vector_round_trip(self):
        for fam in ALL_FAMILIES:
            for v in enumerate_basis(fam):
                D = vector_to_derivation(v, fam.n)
                assert from_derivation(fam, D) == unit(fam, v)

    @pytest.mark.parametrize("fam", SMALL_FAMILIES, ids=str)
    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_random_round_trip(self, fam, data):
        x = data.draw(element_strategy(fam))
        assert from_derivation(fam, x.to_derivation()) == x

    def test_divergence_obstruction(self):
        D = parse_super_derivation(3, "xi(1)*d(1)")
        with pytest.raises(DomainError):
            from_derivation(S3, D)

    def test_tilde_obstructions(self):
        with pytest.raises(DomainError):
            from_derivation(ST4, parse_super_derivation(4, "d(1)"))
        with pytest.raises(DomainError):
            from_derivation(ST4, parse_super_derivation(4, "xi(1)*d(1)"))

    def test_hamiltonian_obstructions(self):
        with pytest.raises(DomainError):
            from_derivation(H4, parse_super_derivation(4, "xi(1)*d(2)"))
        with pytest.raises(DomainError):
            from_derivation(H4, parse_super_derivation(4, "xi(1)*d(3)"))
        top = hamiltonian_field(GrassmannElement.from_mask(4, full_mask(4)), SymplecticForm(4))
        with pytest.raises(DomainError):
            from_derivation(H4, top)

    def test_wrong_width_rejected(self):
        with pytest.raises(SpecMismatchError):
            from_derivation(W2, parse_super_derivation(3, "d(1)"))

    def test_non_derivation_rejected(self):
        with pytest.raises(TypeError):
            from_derivation(W2, GrassmannElement.one(2))


class TestBracketExamples:
    def test_transvection_pair(self):
        x = parse_lie_element(W2, "xi(1)*d(2)")
        y = parse_lie_element(W2, "xi(2)*d(1)")
        assert bracket(x, y) == parse_lie_element(W2, "xi(1)*d(1) - xi(2)*d(2)")

    def test_chain_composition(self):
        x = parse_lie_element(W3, "xi(1)*d(2)")
        y = parse_lie_element(W3, "xi(2)*d(3)")
        assert bracket(x, y) == parse_lie_element(W3, "xi(1)*d(3)")

    def test_same_index_monomials_commute(self):
        # [xi^a d_j, xi^b d_j] vanishes whenever j lies in both masks.
        for n in (2, 3, 4):
            fam = Family("W", n)
            checked = 0
            for j in range(1, n + 1):
                masks = [m for m in range(1 << n) if bit(m, j)]
                for a in masks:
                    for b in masks:
                        out = basis_bracket(fam, FirstType(a, j), FirstType(b, j))
                        assert out.is_zero(), (n, a, b, j)
                        checked += 1
            assert checked == n * 4 ** (n - 1)

    def test_witt_constants_stay_unimodular(self):
        for fam in (W2, W3, W4):
            table = structure_constant_table(fam)
            for rows in table["brackets"].values():
                for _, c in rows:
                    assert c in (-1, 1)
            for rows in table["squares"].values():
                for _, c in rows:
                    assert c in (-1, 1)

    def test_other_constants_stay_small(self):
        for fam in (S3, S4, ST4, H4, H5):
            table = structure_constant_table(fam)
            for rows in table["brackets"].values():
                for _, c in rows:
                    assert c in (-2, -1, 1, 2)

    def test_degree_additivity(self):
        for fam in ALL_FAMILIES:
            basis = enumerate_basis(fam)
            for v in basis:
                dv = vector_degree(v, fam.n)
                for w in basis:
                    out = basis_bracket(fam, v, w)
                    target = dv + vector_degree(w, fam.n)
                    for d in out.degrees():
                        if fam.z_graded:
                            assert d == target
                        else:
                            assert (d - target) % fam.cyclic_modulus == 0

    def test_parity_additivity(self):
        for fam in SMALL_FAMILIES:
            basis = enumerate_basis(fam)
            for v in basis:
                pv = vector_parity(v, fam.n)
                for w in basis:
                    out = basis_bracket(fam, v, w)
                    if not out.is_zero():
                        assert out.parity() == (pv + vector_parity(w, fam.n)) % 2

    def test_family_mismatch_rejected(self):
        with pytest.raises(SpecMismatchError):
            bracket(unit(W2, FirstType(0, 1)), unit(W3, FirstType(0, 1)))
        with pytest.raises(SpecMismatchError):
            bracket(unit(W3, FirstType(0, 1)), unit(S3, FirstType(0, 1)))

    @pytest.mark.parametrize("fam", [W3, S3], ids=str)
    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_bilinearity(self, fam, data):
        x = data.draw(element_strategy(fam))
        y = data.draw(element_strategy(fam))
        z = data.draw(element_strategy(fam))
        c = data.draw(st.integers(-3, 3))
        assert bracket(x + y, z) == bracket(x, z) + bracket(y, z)
        assert bracket(z, x + y) == bracket(z, x) + bracket(z, y)
        assert bracket(c * x, y) == c * bracket(x, y)

    def test_grading_operator_bracket(self):
        for fam in (S3, S4, H4, H5):
            E = LieElement(fam, {Euler(): 1})
            for v in enumerate_basis(fam):
                x = unit(fam, v)
                assert bracket(E, x) == vector_degree(v, fam.n) * x
                assert bracket(x, E) == (-vector_degree(v, fam.n)) * x

    def test_table_agrees_with_generic_route(self):
        for fam in SMALL_FAMILIES:
            basis = enumerate_basis(fam)
            picks = basis[:: max(1, len(basis) // 7)]
            for v in picks:
                for w in picks:
                    assert basis_bracket(fam, v, w) == bracket(unit(fam, v), unit(fam, w))


class TestSquares:
    def test_monomial_squares_vanish(self):
        for n in (2, 3, 4):
            fam = Family("W", n)
            count = 0
            for v in enumerate_basis(fam):
                if vector_parity(v, n) == 1:
                    assert two_operation(unit(fam, v)).is_zero()
                    count += 1
            assert count == n * 2 ** (n - 1)

    def test_divergence_free_squares_vanish(self):
        for fam in (S3, S4):
            count = 0
            for v in enumerate_basis(fam):
                if vector_parity(v, fam.n) == 1:
                    assert two_operation(unit(fam, v)).is_zero()
                    count += 1
            assert count > 0

    def test_deformed_generator_squares(self):
        # ((xi_1 ... xi_n - 1) d_j)^[2] = (-1)^j xi_1 ... (omit j) ... xi_n d_j
        for n in (4, 6):
            fam = Family("Stilde", n)
            for j in range(1, n + 1):
                sq = two_operation(unit(fam, TildeType(j)))
                target = FirstType(full_mask(n) ^ unit_mask(j), j)
                assert sq == LieElement(fam, {target: (-1) ** j})

    def test_hamiltonian_squares_vanish(self):
        for fam in (H4, H5):
            count = 0
            for v in enumerate_basis(fam):
                if vector_parity(v, fam.n) == 1:
                    assert two_operation(unit(fam, v)).is_zero()
                    count += 1
            assert count == sum(
                1 for m in range(1, 1 << fam.n) if 0 < mask_weight(m) < fam.n and mask_weight(m) % 2
            )

    def test_even_input_rejected(self):
        with pytest.raises(ParityError):
            two_operation(unit(W2, FirstType(0b1, 1)))
        mixed = unit(W2, FirstType(0b1, 1)) + unit(W2, FirstType(0, 1))
        with pytest.raises(ParityError):
            two_operation(mixed)

    def test_zero_squares_to_zero(self):
        assert two_operation(LieElement.zero(W2)).is_zero()

    @pytest.mark.parametrize("fam", [W3, ST4, H4], ids=str)
    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_square_scaling(self, fam, data):
        z = data.draw(element_strategy(fam, parity=1))
        c = data.draw(st.integers(-3, 3))
        assert two_operation(c * z) == (c * c) * two_operation(z)

    @pytest.mark.parametrize("fam", [W3, ST4, H4], ids=str)
    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_square_polarization(self, fam, data):
        x = data.draw(element_strategy(fam, parity=1))
        y = data.draw(element_strategy(fam, parity=1))
        assert two_operation(x + y) == two_operation(x) + bracket(x, y) + two_operation(y)


class TestFunctionRoute:
    """The degree -2 family bracket has two independent computations: the
    function-level bracket on coefficients and the operator commutator of the
    realized fields.  They must agree everywhere, and the function-level
    bracket obeys sharp closed-form vanishing and support bounds."""

    def test_bracket_matches_operator_route(self):
        for fam in (H4, H5):
            basis = enumerate_basis(fam)
            for v, w in product(basis, basis):
                op = super_commutator(vector_to_derivation(v, fam.n), vector_to_derivation(w, fam.n))
                assert basis_bracket(fam, v, w) == from_derivation(fam, op)

    @staticmethod
    def _monomials(n):
        return [(m, GrassmannElement.from_mask(n, m)) for m in range(1 << n)]

    def test_interlocked_pairs_vanish(self):
        # If some partner pair {s, s+r} lies inside both masks, the bracket is zero.
        for n in (4, 5):
            om = SymplecticForm(n)
            r = om.r
            mono = self._monomials(n)
            hits = 0
            for (a, f), (b, g) in product(mono, mono):
                if any(bit(a, s) and bit(a, r + s) and bit(b, s) and bit(b, r + s) for s in range(1, r + 1)):
                    assert poisson_bracket(f, g, om).is_zero(), (n, a, b)
                    hits += 1
            assert hits > 0

    def test_support_bound_without_center(self):
        # Without an interlocked pair (and not both masks holding the center
        # index), every output monomial is a+b minus one partner pair, with
        # coefficients in {-1, 0, 1}.
        for n in (4, 5):
            om = SymplecticForm(n)
            r = om.r
            mono = self._monomials(n)
            for (a, f), (b, g) in product(mono, mono):
                if any(bit(a, s) and bit(a, r + s) and bit(b, s) and bit(b, r + s) for s in range(1, r + 1)):
                    continue
                if n % 2 and bit(a, n) and bit(b, n):
                    continue
                allowed = set()
                for k in range(1, r + 1):
                    vec = [bit(a, i) + bit(b, i) - (1 if i in (k, r + k) else 0) for i in range(1, n + 1)]
                    if all(x in (0, 1) for x in vec):
                        allowed.add(sum(1 << i for i, x in enumerate(vec) if x))
                out = poisson_bracket(f, g, om)
                assert set(out.support()) <= allowed, (n, a, b)
                assert all(c in (-1, 1) for _, c in out.items())

    def test_support_bound_with_center(self):
        # Both masks holding the center index (odd width only): at most the
        # single monomial a + b - 2 e_n survives.
        n = 5
        om = SymplecticForm(n)
        r = om.r
        mono = self._monomials(n)
        hits = 0
        for (a, f), (b, g) in product(mono, mono):
            if not (bit(a, n) and bit(b, n)):
                continue
            if any(bit(a, s) and bit(a, r + s) and bit(b, s) and bit(b, r + s) for s in range(1, r + 1)):
                continue
            vec = [bit(a, i) + bit(b, i) - (2 if i == n else 0) for i in range(1, n + 1)]
            allowed = {sum(1 << i for i, x in enumerate(vec) if x)} if all(x in (0, 1) for x in vec) else set()
            out = poisson_bracket(f, g, om)
            assert set(out.support()) <= allowed, (n, a, b)
            assert all(c in (-1, 1) for _, c in out.items())
            hits += 1
        assert hits > 0

    def test_balanced_pairs_vanish(self):
        # Masks meeting every partner pair evenly (and missing the center
        # index) bracket to zero: they span an abelian piece.
        for n in (4, 5):
            om = SymplecticForm(n)
            r = om.r
            mono = self._monomials(n)
            hits = 0
            for (a, f), (b, g) in product(mono, mono):
                balanced = all(bit(a, s) == bit(a, r + s) and bit(b, s) == bit(b, r + s) for s in range(1, r + 1))
                if n % 2:
                    balanced = balanced and not bit(a, n) and not bit(b, n)
                if balanced:
                    assert poisson_bracket(f, g, om).is_zero(), (n, a, b)
                    hits += 1
            assert hits > 0

    def test_heavy_double_brackets_vanish(self):
        # {f, {f, g}} = 0 once the first mask has more than three indices.
        for n in (5, 6):
            om = SymplecticForm(n)
            mono = self._monomials(n)
            hits = 0
            for a, f in mono:
                if mask_weight(a) <= 3:
                    continue
                for b, g in mono:
                    inner = poisson_bracket(f, g, om)
                    assert poisson_bracket(f, inner, om).is_zero(), (n, a, b)
                    hits += 1
            assert hits > 0

    def test_self_brackets(self):
        # {xi^a, xi^a} = 0 except the center generator, whose self-bracket is -1.
        for n in (4, 5):
            om = SymplecticForm(n)
            for a, f in self._monomials(n):
                out = poisson_bracket(f, f, om)
                if n % 2 and a == unit_mask(n):
                    assert set(out.support()) == {0} and out.coefficient(0) == -1
                else:
                    assert out.is_zero(), (n, a)


class TestNilpotencyInstances:
    def test_heavy_monomial_vector_is_two_step(self):
        x = unit(W4, FirstType(mask_from_indices((1, 2, 3)), 1))
        assert any(not bracket(x, unit(W4, v)).is_zero() for v in enumerate_basis(W4))
        for v in enumerate_basis(W4):
            assert bracket(x, bracket(x, unit(W4, v))).is_zero()

    def test_degree_zero_pair_vector_is_three_step(self):
        h = unit(H4, HType(mask_from_indices((1, 2))))
        seen_two = False
        for v in enumerate_basis(H4):
            b2 = bracket(h, bracket(h, unit(H4, v)))
            seen_two = seen_two or not b2.is_zero()
            assert bracket(h, b2).is_zero()
        assert seen_two


class TestAxioms:
    @pytest.mark.parametrize("fam", ALL_FAMILIES, ids=str)
    def test_families_pass(self, fam):
        report = verify_lie_axioms(fam)
        assert report.ok, report.summary()
        assert report.dimension == fam.dim
        n_b = fam.dim
        assert report.counts["antisymmetry"] == n_b * (n_b + 1) // 2
        assert report.counts["jacobi"] == n_b * n_b * (n_b + 1) // 2

    def test_report_summary_wording(self):
        report = verify_lie_axioms(W2)
        text = report.summary()
        assert text.startswith("W(2): PASS")
        assert "checks" in text


class TestSerialization:
    def test_structure_table_is_json_ready(self):
        for fam in (W2, S3, H4):
            table = structure_constant_table(fam)
            blob = json.loads(json.dumps(table))
            assert blob["dimension"] == fam.dim
            assert len(blob["basis"]) == fam.dim
            assert len(blob["parity"]) == fam.dim
            assert len(blob["degree"]) == fam.dim
            names = set(blob["basis"])
            for key, rows in blob["brackets"].items():
                assert key.startswith("[") and key.endswith("]")
                for name, c in rows:
                    assert name in names and c != 0

    def test_basis_names_round_trip(self):
        for fam in ALL_FAMILIES:
            for v in enumerate_basis(fam):
                name = vector_name(v, fam.n)
                assert parse_lie_element(fam, name) == unit(fam, v)

    @pytest.mark.parametrize("fam", SMALL_FAMILIES, ids=str)
    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_text_round_trip(self, fam, data):
        x = data.draw(element_strategy(fam, include_euler=fam.has_euler_extension))
        assert parse_lie_element(fam, format_lie_element(x)) == x

    def test_grading_operator_parse(self):
        x = parse_lie_element(S3, "E")
        assert x == LieElement(S3, {Euler(): 1})
        y = parse_lie_element(H4, "2*E + D[xi(1)*xi(2)]")
        assert y.euler_coefficient() == 2
        assert y.coefficient(HType(0b11)) == 1

    def test_grading_operator_rejected_without_extension(self):
        with pytest.raises(ParseError):
            parse_lie_element(W2, "E")
        with pytest.raises((ParseError, DomainError)):
            parse_lie_element(ST4, "E")

    def test_trace_split_on_parse(self):
        x = parse_lie_element(S3, "xi(1)*d(1)", ring=QQ)
        assert x.euler_coefficient() == Fraction(1, 3)
        assert x.to_derivation() == parse_super_derivation(3, "xi(1)*d(1)", ring=QQ)

    def test_format_examples(self):
        x = LieElement(ST4, {TildeType(1): 1, FirstType(0b1, 2): -1})
        assert format_lie_element(x) == "-xi(1)*d(2) + (xi(1)*xi(2)*xi(3)*xi(4) - 1)*d(1)"
        assert str(LieElement.zero(W2)) == "0"


def test_doctests():
    result = doctest.testmod(supercartan.cartan_lie)
    assert result.failed == 0
    assert result.attempted > 20
