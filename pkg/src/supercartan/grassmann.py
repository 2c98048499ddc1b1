"""The Grassmann algebra Λ(n), its superderivations, divergence, and the
Poisson structure used by the Hamiltonian family.

Basis monomials of Λ(n) are encoded as bitmasks over the n odd generators
xi_1..xi_n; superderivations are stored by their generator images, i.e.
``D = Σ P_i ∂_i`` keeps the tuple ``(P_1, .., P_n)`` with ``P_i = D(xi_i)``.
All brackets in the rest of the package bottom out in operator composition
performed here.

>>> d2 = SuperDerivation.partial(2, 2)
>>> print(apply_derivation(d2, GrassmannElement.monomial(2, (1, 2))))
-xi(1)
>>> omega = SymplecticForm(4)
>>> print(format_super_derivation(hamiltonian_field(GrassmannElement.monomial(4, (1, 2)), omega)))
xi(2)*d(3) - xi(1)*d(4)
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .superalgebra import (
    ParseError,
    Sqrt2,
    SpecMismatchError,
    SuperAlgebraError,
    ZZ,
    BaseRing,
    _coefficient_text,
    _merge_sign,
)

__all__ = [
    "MAX_N",
    "GrassmannElement",
    "SuperDerivation",
    "SymplecticForm",
    "ParityError",
    "DomainError",
    "unit_mask",
    "full_mask",
    "mask_from_indices",
    "mask_indices",
    "mask_weight",
    "xi_mul",
    "partial_derivative",
    "apply_derivation",
    "super_commutator",
    "derivation_square",
    "divergence",
    "is_divergence_free",
    "satisfies_tilde_condition",
    "poisson_bracket",
    "hamiltonian_field",
    "parse_grassmann_element",
    "parse_super_derivation",
    "format_grassmann_element",
    "format_super_derivation",
]

MAX_N = 16


class ParityError(SuperAlgebraError, ValueError):
    """An operation required a homogeneous (or odd/even) argument."""


class DomainError(SuperAlgebraError, ValueError):
    """The argument lies outside the operation's domain."""


def _check_n(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in 1..{MAX_N}, got {n!r}")


def unit_mask(j: int) -> int:
    """Bitmask of the single generator xi_j (1-based)."""
    if j < 1:
        raise ValueError("generator indices are 1-based")
    return 1 << (j - 1)


def full_mask(n: int) -> int:
    """Bitmask of xi_1*...*xi_n."""
    _check_n(n)
    return (1 << n) - 1


def mask_from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for j in indices:
        bit = unit_mask(j)
        if mask & bit:
            raise ValueError(f"repeated index {j}")
        mask |= bit
    return mask


def mask_indices(mask: int) -> tuple[int, ...]:
    """Ascending 1-based indices of the set bits."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


def mask_weight(mask: int) -> int:
    return mask.bit_count()


def xi_mul(e: int, e2: int) -> tuple[int, int]:
    """Product of basis monomials: (sign, union mask); sign 0 on collision.

    >>> xi_mul(0b001, 0b010)
    (1, 3)
    >>> xi_mul(0b010, 0b001)
    (-1, 3)
    >>> xi_mul(0b101, 0b010)
    (-1, 7)
    """
    if e & e2:
        return (0, 0)
    return (_merge_sign(e, e2), e | e2)


class GrassmannElement:
    """Sparse element of Λ(n): a map from odd bitmasks to central scalars.

    Coefficients are duck-typed exact scalars (int, Fraction, Sqrt2); they
    must commute with everything (in particular, be even).
    """

    __slots__ = ("n", "_coeffs")

    def __init__(self, n: int, coeffs: Mapping[int, object]):
        _check_n(n)
        clean: dict[int, object] = {}
        for mask, coeff in coeffs.items():
            if not isinstance(mask, int) or mask < 0 or mask >> n:
                raise ValueError(f"bad mask {mask!r} for n={n}")
            if coeff == 0:
                continue
            if mask in clean:
                raise ValueError(f"duplicate mask {mask!r}")
            clean[mask] = coeff
        self.n = n
        self._coeffs = clean

    @classmethod
    def _raw(cls, n: int, coeffs: dict) -> "GrassmannElement":
        self = object.__new__(cls)
        self.n = n
        self._coeffs = coeffs
        return self

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "GrassmannElement":
        return cls(n, {})

    @classmethod
    def one(cls, n: int) -> "GrassmannElement":
        return cls(n, {0: 1})

    @classmethod
    def scalar(cls, n: int, coeff: object) -> "GrassmannElement":
        return cls(n, {0: coeff})

    @classmethod
    def generator(cls, n: int, j: int) -> "GrassmannElement":
        """The generator xi_j."""
        mask = unit_mask(j)
        if mask >> n:
            raise ValueError(f"xi index {j} out of range 1..{n}")
        return cls(n, {mask: 1})

    @classmethod
    def monomial(
        cls, n: int, indices: Iterable[int] = (), coeff: object = 1
    ) -> "GrassmannElement":
        """``coeff * xi_{j1}..xi_{jk}`` with ascending distinct indices."""
        return cls(n, {mask_from_indices(indices): coeff})

    @classmethod
    def from_mask(cls, n: int, mask: int, coeff: object = 1) -> "GrassmannElement":
        return cls(n, {mask: coeff})

    # -- inspection --------------------------------------------------------
    def items(self) -> list[tuple[int, object]]:
        """(mask, coefficient) pairs sorted by (weight, mask)."""
        return sorted(self._coeffs.items(), key=lambda kv: (kv[0].bit_count(), kv[0]))

    def coefficient(self, mask_or_indices: "int | Iterable[int]") -> object:
        if isinstance(mask_or_indices, int):
            mask = mask_or_indices
        else:
            mask = mask_from_indices(mask_or_indices)
        return self._coeffs.get(mask, 0)

    def constant_term(self) -> object:
        return self._coeffs.get(0, 0)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self._coeffs))

    def is_zero(self) -> bool:
        return not self._coeffs

    def parity(self) -> "int | None":
        parities = {mask.bit_count() & 1 for mask in self._coeffs}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def is_homogeneous(self) -> bool:
        return self.parity() is not None

    def z_degrees(self) -> tuple[int, ...]:
        """Sorted distinct monomial weights occurring in this element."""
        return tuple(sorted({mask.bit_count() for mask in self._coeffs}))

    def homogeneous_component(self, z: int) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.n,
            {m: c for m, c in self._coeffs.items() if m.bit_count() == z},
        )

    def even_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.n,
            {m: c for m, c in self._coeffs.items() if m.bit_count() % 2 == 0},
        )

    def odd_part(self) -> "GrassmannElement":
        return GrassmannElement._raw(
            self.n,
            {m: c for m, c in self._coeffs.items() if m.bit_count() % 2 == 1},
        )

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "GrassmannElement") -> None:
        if other.n != self.n:
            raise SpecMismatchError(
                f"operands live in different Grassmann algebras: n={self.n} vs n={other.n}"
            )

    def __add__(self, other: object) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check_same(other)
            out = dict(self._coeffs)
            for mask, c in other._coeffs.items():
                acc = out.get(mask)
                total = c if acc is None else acc + c
                if total == 0:
                    out.pop(mask, None)
                else:
                    out[mask] = total
            return GrassmannElement._raw(self.n, out)
        if isinstance(other, SuperDerivation):
            return NotImplemented
        return self + GrassmannElement.scalar(self.n, other)

    __radd__ = __add__

    def __sub__(self, other: object) -> "GrassmannElement":
        if isinstance(other, SuperDerivation):
            return NotImplemented
        return self + (-(other if isinstance(other, GrassmannElement) else GrassmannElement.scalar(self.n, other)))

    def __rsub__(self, other: object) -> "GrassmannElement":
        return (-self) + other

    def __neg__(self) -> "GrassmannElement":
        return GrassmannElement._raw(self.n, {m: -c for m, c in self._coeffs.items()})

    def __mul__(self, other: object) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check_same(other)
            out: dict[int, object] = {}
            for m1, c1 in self._coeffs.items():
                for m2, c2 in other._coeffs.items():
                    if m1 & m2:
                        continue
                    c = c1 * c2
                    if _merge_sign(m1, m2) < 0:
                        c = -c
                    key = m1 | m2
                    acc = out.get(key)
                    total = c if acc is None else acc + c
                    if total == 0:
                        out.pop(key, None)
                    else:
                        out[key] = total
            return GrassmannElement._raw(self.n, out)
        if isinstance(other, SuperDerivation):
            return NotImplemented  # handled by SuperDerivation.__rmul__
        # central scalar
        if other == 0:
            return GrassmannElement.zero(self.n)
        return GrassmannElement._raw(
            self.n, {m: c * other for m, c in self._coeffs.items()}
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "GrassmannElement":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = GrassmannElement.one(self.n)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GrassmannElement):
            return other.n == self.n and other._coeffs == self._coeffs
        if isinstance(other, SuperDerivation):
            return False
        try:
            return self == GrassmannElement.scalar(self.n, other)
        except Exception:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._coeffs.items())))

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __repr__(self) -> str:
        return f"<GrassmannElement n={self.n}: {format_grassmann_element(self)}>"

    def __str__(self) -> str:
        return format_grassmann_element(self)


class SuperDerivation:
    """A superderivation ``Σ P_i ∂_i`` of Λ(n), stored by generator images."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: Sequence[GrassmannElement]):
        _check_n(n)
        components = tuple(components)
        if len(components) != n:
            raise ValueError(f"expected {n} components, got {len(components)}")
        for p in components:
            if not isinstance(p, GrassmannElement) or p.n != n:
                raise ValueError("components must be GrassmannElements over the same n")
        self.n = n
        self.components = components

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "SuperDerivation":
        z = GrassmannElement.zero(n)
        return cls(n, (z,) * n)

    @classmethod
    def partial(cls, n: int, i: int) -> "SuperDerivation":
        """The coordinate derivation ∂_i."""
        if not 1 <= i <= n:
            raise ValueError(f"derivation index {i} out of range 1..{n}")
        comps = [GrassmannElement.zero(n) for _ in range(n)]
        comps[i - 1] = GrassmannElement.one(n)
        return cls(n, comps)

    @classmethod
    def from_monomial(
        cls, n: int, mask: int, i: int, coeff: object = 1
    ) -> "SuperDerivation":
        """The operator ``coeff * xi^mask * ∂_i``."""
        if not 1 <= i <= n:
            raise ValueError(f"derivation index {i} out of range 1..{n}")
        comps = [GrassmannElement.zero(n) for _ in range(n)]
        comps[i - 1] = GrassmannElement.from_mask(n, mask, coeff)
        return cls(n, comps)

    # -- inspection --------------------------------------------------------
    def component(self, i: int) -> GrassmannElement:
        """P_i = D(xi_i), 1-based."""
        return self.components[i - 1]

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def parity(self) -> "int | None":
        """Parity as an operator: a term xi^a ∂_i has parity |a| + 1 mod 2."""
        parities = {
            (mask.bit_count() + 1) & 1
            for p in self.components
            for mask in p._coeffs
        }
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def is_homogeneous(self) -> bool:
        return self.parity() is not None

    def homogeneous_part(self, parity: int) -> "SuperDerivation":
        return SuperDerivation(
            self.n,
            tuple(
                GrassmannElement._raw(
                    self.n,
                    {
                        m: c
                        for m, c in p._coeffs.items()
                        if (m.bit_count() + 1) & 1 == parity
                    },
                )
                for p in self.components
            ),
        )

    def z_degrees(self) -> tuple[int, ...]:
        """Distinct ZZ-degrees: a term xi^a ∂_i has degree |a| - 1."""
        return tuple(
            sorted(
                {
                    mask.bit_count() - 1
                    for p in self.components
                    for mask in p._coeffs
                }
            )
        )

    def z_component(self, z: int) -> "SuperDerivation":
        """The part of ZZ-degree z (terms xi^a ∂_i with |a| = z + 1)."""
        return SuperDerivation(
            self.n,
            tuple(p.homogeneous_component(z + 1) for p in self.components),
        )

    # -- action ------------------------------------------------------------
    def __call__(self, f: GrassmannElement) -> GrassmannElement:
        return apply_derivation(self, f)

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "SuperDerivation") -> None:
        if other.n != self.n:
            raise SpecMismatchError(
                f"derivations over different Grassmann algebras: n={self.n} vs n={other.n}"
            )

    def __add__(self, other: "SuperDerivation") -> "SuperDerivation":
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        self._check_same(other)
        return SuperDerivation(
            self.n, tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other: "SuperDerivation") -> "SuperDerivation":
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "SuperDerivation":
        return SuperDerivation(self.n, tuple(-p for p in self.components))

    def __mul__(self, other: object) -> "SuperDerivation":
        # right-multiplication by a central scalar only
        if isinstance(other, (GrassmannElement, SuperDerivation)):
            return NotImplemented
        return SuperDerivation(self.n, tuple(p * other for p in self.components))

    def __rmul__(self, other: object) -> "SuperDerivation":
        # f * (Σ P_i ∂_i) = Σ (f P_i) ∂_i  — operator composition with a
        # left multiplication; also covers central scalars.
        if isinstance(other, SuperDerivation):
            return NotImplemented
        if isinstance(other, GrassmannElement):
            if other.n != self.n:
                raise SpecMismatchError("function and derivation over different n")
            return SuperDerivation(
                self.n, tuple(other * p for p in self.components)
            )
        return SuperDerivation(self.n, tuple(other * p for p in self.components))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        return other.n == self.n and other.components == self.components

    def __hash__(self) -> int:
        return hash((self.n, self.components))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"<SuperDerivation n={self.n}: {format_super_derivation(self)}>"

    def __str__(self) -> str:
        return format_super_derivation(self)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------

def partial_derivative(f: GrassmannElement, i: int) -> GrassmannElement:
    """∂_i(f): removes xi_i with sign (-1)^{number of set bits below i}.

    >>> print(partial_derivative(GrassmannElement.monomial(2, (1, 2)), 2))
    -xi(1)
    """
    if not 1 <= i <= f.n:
        raise ValueError(f"derivation index {i} out of range 1..{f.n}")
    bit = 1 << (i - 1)
    below = bit - 1
    out: dict[int, object] = {}
    for mask, c in f._coeffs.items():
        if mask & bit:
            if (mask & below).bit_count() & 1:
                c = -c
            out[mask ^ bit] = c
    return GrassmannElement._raw(f.n, out)


def apply_derivation(D: SuperDerivation, f: GrassmannElement) -> GrassmannElement:
    """The action of ``Σ P_i ∂_i`` on f by operator composition."""
    if f.n != D.n:
        raise SpecMismatchError("derivation and argument over different n")
    result = GrassmannElement.zero(f.n)
    for i, p in enumerate(D.components, start=1):
        if p.is_zero():
            continue
        result = result + p * partial_derivative(f, i)
    return result


def super_commutator(x: SuperDerivation, y: SuperDerivation) -> SuperDerivation:
    """[x, y] = x∘y - (-1)^{p(x)p(y)} y∘x, extended bilinearly.

    The result is again a superderivation, determined by its images on the
    generators; that is how it is computed here.
    """
    if x.n != y.n:
        raise SpecMismatchError("derivations over different n")
    n = x.n
    total = SuperDerivation.zero(n)
    for px in (0, 1):
        a = x.homogeneous_part(px)
        if a.is_zero():
            continue
        for py in (0, 1):
            b = y.homogeneous_part(py)
            if b.is_zero():
                continue
            sign = -1 if (px and py) else 1
            comps = tuple(
                a(b.components[k]) - sign * b(a.components[k]) for k in range(n)
            )
            total = total + SuperDerivation(n, comps)
    return total


def derivation_square(z: SuperDerivation) -> SuperDerivation:
    """The operator square z∘z of an odd superderivation (its 2-operation).

    For odd z the square is an even superderivation, so it is again
    determined by its generator images z(z(xi_k)).
    """
    if z.parity() != 1 and not z.is_zero():
        raise ParityError("the square operation is defined for odd derivations only")
    return SuperDerivation(z.n, tuple(z(p) for p in z.components))


def divergence(D: SuperDerivation) -> GrassmannElement:
    """div(Σ P_i ∂_i) = Σ ∂_i(P_i).

    >>> print(divergence(SuperDerivation.from_monomial(2, 0b01, 1)))
    1
    >>> print(divergence(SuperDerivation.from_monomial(2, 0b10, 1)))
    0
    """
    result = GrassmannElement.zero(D.n)
    for i, p in enumerate(D.components, start=1):
        result = result + partial_derivative(p, i)
    return result


def is_divergence_free(D: SuperDerivation) -> bool:
    """Membership test for the special (divergence-zero) subalgebra."""
    return divergence(D).is_zero()


def satisfies_tilde_condition(D: SuperDerivation) -> bool:
    """Membership test for the deformed special subalgebra:
    ``(1 + xi_1..xi_n) * div(D) + D(xi_1..xi_n) = 0``."""
    n = D.n
    top = GrassmannElement.from_mask(n, full_mask(n))
    lhs = (GrassmannElement.one(n) + top) * divergence(D) + apply_derivation(D, top)
    return lhs.is_zero()


class SymplecticForm:
    """The canonical odd symmetric form: pairs (i, r+i), plus a unit square
    in the last coordinate when n is odd."""

    __slots__ = ("n", "r")

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        self.r = n // 2

    def matrix(self) -> tuple[tuple[int, ...], ...]:
        n, r = self.n, self.r
        rows = []
        for i in range(n):
            row = [0] * n
            if i < r:
                row[i + r] = 1
            elif i < 2 * r:
                row[i - r] = 1
            else:
                row[i] = 1
            rows.append(tuple(row))
        return tuple(rows)

    def partner(self, j: int) -> int:
        """The index paired with j (j itself for the odd-n extra index)."""
        if not 1 <= j <= self.n:
            raise ValueError(f"index {j} out of range 1..{self.n}")
        if j <= self.r:
            return j + self.r
        if j <= 2 * self.r:
            return j - self.r
        return j

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymplecticForm) and other.n == self.n

    def __hash__(self) -> int:
        return hash(("SymplecticForm", self.n))

    def __repr__(self) -> str:
        return f"SymplecticForm({self.n})"


def poisson_bracket(
    f: GrassmannElement, g: GrassmannElement, omega: SymplecticForm
) -> GrassmannElement:
    """The Poisson bracket attached to the canonical form.

    {f, g} = (-1)^{p(f)} ( Σ_{s=1}^{r} (∂_s f ∂_{r+s} g + ∂_{r+s} f ∂_s g)
                           + [n odd] ∂_n f ∂_n g ).

    >>> omega = SymplecticForm(4)
    >>> xi = lambda j: GrassmannElement.generator(4, j)
    >>> print(poisson_bracket(xi(1), xi(3), omega))
    -1
    """
    if f.n != omega.n or g.n != omega.n:
        raise SpecMismatchError("arguments must live in Λ(n) for the form's n")
    p = f.parity()
    if p is None:
        raise ParityError("the first argument must be parity-homogeneous")
    n, r = omega.n, omega.r
    total = GrassmannElement.zero(n)
    for s in range(1, r + 1):
        total = total + partial_derivative(f, s) * partial_derivative(g, r + s)
        total = total + partial_derivative(f, r + s) * partial_derivative(g, s)
    if n % 2 == 1:
        total = total + partial_derivative(f, n) * partial_derivative(g, n)
    return -total if p else total


def hamiltonian_field(f: GrassmannElement, omega: SymplecticForm) -> SuperDerivation:
    """The derivation D_f = Σ_s (∂_s f ∂_{r+s} + ∂_{r+s} f ∂_s) (+ ∂_n f ∂_n).

    Defined for f with zero constant term (the kernel of f ↦ D_f is the
    scalars); satisfies [D_f, D_g] = D_{{f,g}} and lowers ZZ-degree by 2.
    """
    if f.n != omega.n:
        raise SpecMismatchError("argument must live in Λ(n) for the form's n")
    if f.constant_term() != 0:
        raise DomainError("hamiltonian_field needs a zero constant term")
    n, r = omega.n, omega.r
    comps = [GrassmannElement.zero(n) for _ in range(n)]
    for s in range(1, r + 1):
        comps[r + s - 1] = partial_derivative(f, s)
        comps[s - 1] = partial_derivative(f, r + s)
    if n % 2 == 1:
        comps[n - 1] = partial_derivative(f, n)
    return SuperDerivation(n, comps)


# ---------------------------------------------------------------------------
# Text grammar: xi(1)*xi(3), d(2), D[xi(1)*xi(2)]
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens: list[tuple[str, object]] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            break
        pos = match.end()
        number, name, char = match.groups()
        if number is not None:
            tokens.append(("num", int(number)))
        elif name is not None:
            tokens.append(("name", name))
        elif char in "+-*/()[]":
            tokens.append((char, char))
        else:
            raise ParseError(f"unexpected character {char!r} in {text!r}")
    tokens.append(("end", None))
    return tokens


class _Pair:
    """Intermediate parse value: a function part plus a derivation part."""

    __slots__ = ("f", "D")

    def __init__(self, f: GrassmannElement, D: SuperDerivation):
        self.f = f
        self.D = D


class _GrassmannParser:
    def __init__(self, n: int, text: str, ring: BaseRing):
        self.n = n
        self.ring = ring
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos][0]

    def next(self) -> tuple[str, object]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str) -> object:
        token_kind, value = self.next()
        if token_kind != kind:
            raise ParseError(f"expected {kind!r}, found {token_kind!r} in {self.text!r}")
        return value

    def parse(self) -> _Pair:
        value = self.expression()
        if self.peek() != "end":
            raise ParseError(f"trailing input in {self.text!r}")
        return value

    def expression(self) -> _Pair:
        value = self.term()
        while self.peek() in "+-":
            op, _ = self.next()
            rhs = self.term()
            if op == "+":
                value = _Pair(value.f + rhs.f, value.D + rhs.D)
            else:
                value = _Pair(value.f - rhs.f, value.D - rhs.D)
        return value

    def term(self) -> _Pair:
        value = self.factor()
        while self.peek() == "*":
            self.next()
            rhs = self.factor()
            if not value.D.is_zero():
                raise ParseError(
                    "a derivation factor must be rightmost in each product"
                )
            value = _Pair(value.f * rhs.f, value.f * rhs.D)
        return value

    def factor(self) -> _Pair:
        if self.peek() == "-":
            self.next()
            inner = self.factor()
            return _Pair(-inner.f, -inner.D)
        return self.atom()

    def atom(self) -> _Pair:
        kind = self.peek()
        zero_d = SuperDerivation.zero(self.n)
        if kind == "num":
            _, numerator = self.next()
            if self.peek() == "/":
                self.next()
                denominator = self.expect("num")
                if denominator == 0:
                    raise ParseError("zero denominator")
                value = self.ring.coerce(Fraction(numerator, denominator))
            else:
                value = self.ring.coerce(numerator)
            return _Pair(GrassmannElement.scalar(self.n, value), zero_d)
        if kind == "name":
            _, name = self.next()
            return self.named_atom(name)
        if kind == "(":
            self.next()
            value = self.expression()
            self.expect(")")
            return value
        raise ParseError(f"unexpected token {kind!r} in {self.text!r}")

    def named_atom(self, name: str) -> _Pair:
        """Resolve a name token; subclasses may extend the vocabulary."""
        zero_d = SuperDerivation.zero(self.n)
        if name == "sqrt2":
            return _Pair(GrassmannElement.scalar(self.n, Sqrt2(0, 1)), zero_d)
        if name == "xi":
            self.expect("(")
            index = self.expect("num")
            self.expect(")")
            if not 1 <= index <= self.n:
                raise ParseError(f"xi index {index} out of range 1..{self.n}")
            return _Pair(GrassmannElement.generator(self.n, index), zero_d)
        if name == "d":
            self.expect("(")
            index = self.expect("num")
            self.expect(")")
            if not 1 <= index <= self.n:
                raise ParseError(f"d index {index} out of range 1..{self.n}")
            return _Pair(
                GrassmannElement.zero(self.n),
                SuperDerivation.partial(self.n, index),
            )
        if name == "D":
            self.expect("[")
            inner = self.expression()
            self.expect("]")
            if not inner.D.is_zero():
                raise ParseError("D[...] takes a function, not a derivation")
            try:
                field = hamiltonian_field(inner.f, SymplecticForm(self.n))
            except DomainError as exc:
                raise ParseError(str(exc)) from exc
            return _Pair(GrassmannElement.zero(self.n), field)
        raise ParseError(f"unknown name {name!r} in {self.text!r}")


def parse_grassmann_element(
    n: int, text: str, ring: BaseRing = ZZ
) -> GrassmannElement:
    """Parse Λ(n) element text such as ``1 - 2*xi(1)*xi(3)``."""
    pair = _GrassmannParser(n, text, ring).parse()
    if not pair.D.is_zero():
        raise ParseError("expected a Grassmann element, found a derivation")
    return pair.f


def parse_super_derivation(n: int, text: str, ring: BaseRing = ZZ) -> SuperDerivation:
    """Parse derivation text such as ``xi(1)*d(2) - d(1)`` or ``D[xi(1)*xi(2)]``."""
    pair = _GrassmannParser(n, text, ring).parse()
    if not pair.f.is_zero():
        raise ParseError("expected a derivation, found a Grassmann element part")
    return pair.D


def _format_term(coeff: object, factors: list[str]) -> tuple[str, bool]:
    if isinstance(coeff, (int, Fraction, Sqrt2)):
        coeff_text, negative = _coefficient_text(coeff, bool(factors))
    else:  # exotic central coefficient: print verbatim, parenthesized
        coeff_text, negative = f"({coeff})", False
    parts = ([coeff_text] if coeff_text else []) + factors
    return "*".join(parts) if parts else "1", negative


def _join_terms(chunks: list[tuple[str, bool]]) -> str:
    out: list[str] = []
    for body, negative in chunks:
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def format_grassmann_element(f: GrassmannElement) -> str:
    """Canonical text form using the xi(j) grammar."""
    if f.is_zero():
        return "0"
    chunks = []
    for mask, coeff in f.items():
        factors = [f"xi({j})" for j in mask_indices(mask)]
        chunks.append(_format_term(coeff, factors))
    return _join_terms(chunks)


def format_super_derivation(D: SuperDerivation) -> str:
    """Canonical text form: terms ``coeff*xi(..)*d(i)`` sorted by (i, mask)."""
    chunks = []
    for i, p in enumerate(D.components, start=1):
        for mask, coeff in p.items():
            factors = [f"xi({j})" for j in mask_indices(mask)] + [f"d({i})"]
            chunks.append(_format_term(coeff, factors))
    if not chunks:
        return "0"
    return _join_terms(chunks)
