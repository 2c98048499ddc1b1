"""Exact free commutative superalgebras over ZZ, QQ, and ZZ[sqrt2].

This module provides the coefficient rings and the test superalgebras
``A = k[t_1..t_p | xi_1..xi_q]`` at which every group functor in this package
is evaluated.  Everything is exact: integers are arbitrary precision,
rationals are reduced fractions, and quadratic irrationalities are pairs
``a + b*sqrt2``.

>>> A = SuperAlgebra(QQ, even_gens=1, odd_gens=2)
>>> x = A.one() + A.t(1) * A.xi(1)
>>> y = A.one() - A.t(1) * A.xi(1)
>>> x * y == A.one()
True
>>> print(sa_invert(A.scalar(2) + A.xi(1) * A.xi(2)))
1/2 - 1/4*xi1*xi2
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Sqrt2",
    "BaseRing",
    "ZZ",
    "QQ",
    "ZSQRT2",
    "SuperAlgebra",
    "SuperElement",
    "sa_mul",
    "sa_invert",
    "odd_filtration_degree",
    "in_odd_power_span",
    "in_odd_power_subalgebra",
    "parse_element",
    "format_element",
    "SuperAlgebraError",
    "SpecMismatchError",
    "NotInvertibleError",
    "CoercionError",
    "ParseError",
]


class SuperAlgebraError(Exception):
    """Base class for errors raised by this package's algebra layers."""


class SpecMismatchError(SuperAlgebraError):
    """Operands belong to different algebras."""


class NotInvertibleError(SuperAlgebraError):
    """The element has no inverse in its algebra."""


class CoercionError(SuperAlgebraError, TypeError):
    """A value cannot be interpreted in the requested ring."""


class ParseError(SuperAlgebraError, ValueError):
    """Malformed element text."""


_Rational = Union[int, Fraction]


def _normalize_component(value: _Rational) -> _Rational:
    if isinstance(value, bool):
        raise CoercionError("booleans are not ring elements")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    raise CoercionError(f"expected an integer or Fraction, got {value!r}")


class Sqrt2:
    """The quadratic irrational ``a + b*sqrt2`` with exact components.

    Components are integers or reduced fractions.  Multiplication follows
    ``(a + b*sqrt2)(c + d*sqrt2) = (ac + 2bd) + (ad + bc)*sqrt2``.

    >>> Sqrt2(1, 1) * Sqrt2(1, -1)
    Sqrt2(-1, 0)
    >>> Sqrt2(0, 1) ** 2 == 2
    True
    """

    __slots__ = ("a", "b")

    def __init__(self, a: _Rational = 0, b: _Rational = 0):
        self.a = _normalize_component(a)
        self.b = _normalize_component(b)

    # -- helpers ---------------------------------------------------------
    @staticmethod
    def _coerce(value: object) -> "Sqrt2 | None":
        if isinstance(value, Sqrt2):
            return value
        if isinstance(value, bool):
            return None
        if isinstance(value, (int, Fraction)):
            return Sqrt2(value, 0)
        return None

    def norm(self) -> _Rational:
        """Field norm ``a**2 - 2*b**2`` (multiplicative)."""
        return _normalize_component(Fraction(self.a * self.a - 2 * self.b * self.b))

    def conjugate(self) -> "Sqrt2":
        return Sqrt2(self.a, -self.b)

    def inverse(self) -> "Sqrt2":
        """Exact inverse in QQ(sqrt2); raises ZeroDivisionError on zero."""
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in QQ(sqrt2)")
        return Sqrt2(Fraction(self.a, 1) / n, Fraction(-self.b, 1) / n)

    def is_integral(self) -> bool:
        """True when both components are integers (element of ZZ[sqrt2])."""
        return isinstance(self.a, int) and isinstance(self.b, int)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Sqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Sqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Sqrt2(o.a - self.a, o.b - self.b)

    def __mul__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Sqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> "Sqrt2":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self) -> "Sqrt2":
        return Sqrt2(-self.a, -self.b)

    def __pow__(self, exponent: int) -> "Sqrt2":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = Sqrt2(1, 0)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, "sqrt2"))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __repr__(self) -> str:
        return f"Sqrt2({self.a!r}, {self.b!r})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        if self.b == 1:
            root = "sqrt2"
        elif self.b == -1:
            root = "-sqrt2"
        else:
            root = f"{self.b}*sqrt2"
        if self.a == 0:
            return root
        sign = "-" if root.startswith("-") else "+"
        return f"{self.a}{sign}{root.lstrip('-')}"


Scalar = Union[int, Fraction, Sqrt2]


class BaseRing:
    """One of the coefficient rings ZZ, QQ, or ZZ[sqrt2].

    Use the module-level singletons ``ZZ``, ``QQ``, ``ZSQRT2``.
    """

    __slots__ = ("kind",)

    _KINDS = ("Integers", "Rationals", "IntegersAdjoinSqrt2")
    _NAMES = {
        "Integers": "ZZ",
        "Rationals": "QQ",
        "IntegersAdjoinSqrt2": "ZZ[sqrt2]",
    }

    def __init__(self, kind: str):
        if kind not in self._KINDS:
            raise ValueError(f"unknown ring kind {kind!r}")
        self.kind = kind

    def __repr__(self) -> str:
        return self._NAMES[self.kind]

    __str__ = __repr__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BaseRing) and other.kind == self.kind

    def __hash__(self) -> int:
        return hash(self.kind)

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    def coerce(self, value: object) -> Scalar:
        """Interpret ``value`` as an element of this ring, exactly."""
        if isinstance(value, bool):
            raise CoercionError("booleans are not ring elements")
        if self.kind == "Integers":
            if isinstance(value, int):
                return value
            if isinstance(value, Fraction):
                if value.denominator == 1:
                    return int(value)
                raise CoercionError(f"{value} is not an integer")
            if isinstance(value, Sqrt2) and value.b == 0:
                return self.coerce(value.a)
            raise CoercionError(f"cannot interpret {value!r} in ZZ")
        if self.kind == "Rationals":
            if isinstance(value, int):
                return Fraction(value)
            if isinstance(value, Fraction):
                return value
            if isinstance(value, Sqrt2) and value.b == 0:
                return Fraction(value.a)
            raise CoercionError(f"cannot interpret {value!r} in QQ")
        # IntegersAdjoinSqrt2
        if isinstance(value, (int, Fraction)):
            return Sqrt2(ZZ.coerce(value), 0)
        if isinstance(value, Sqrt2):
            return Sqrt2(ZZ.coerce(Fraction(value.a)), ZZ.coerce(Fraction(value.b)))
        raise CoercionError(f"cannot interpret {value!r} in ZZ[sqrt2]")

    def is_unit(self, value: object) -> bool:
        try:
            c = self.coerce(value)
        except CoercionError:
            return False
        if self.kind == "Integers":
            return c in (1, -1)
        if self.kind == "Rationals":
            return c != 0
        return abs(c.norm()) == 1

    def invert(self, value: object) -> Scalar:
        c = self.coerce(value)
        if not self.is_unit(c):
            raise NotInvertibleError(f"{c} is not a unit of {self}")
        if self.kind == "Integers":
            return c
        if self.kind == "Rationals":
            return Fraction(1) / c
        return self.coerce(c.inverse())


ZZ = BaseRing("Integers")
QQ = BaseRing("Rationals")
ZSQRT2 = BaseRing("IntegersAdjoinSqrt2")

_MAX_ODD_GENS = 64

TermKey = tuple  # (even multidegree tuple, odd bitmask int)


def _merge_sign(mask1: int, mask2: int) -> int:
    """Sign of sorting the concatenation of two ascending disjoint masks.

    Equals the parity of the number of pairs (i in mask1, j in mask2)
    with i > j.
    """
    inversions = 0
    m = mask1
    while m:
        low = m & -m
        inversions += (mask2 & (low - 1)).bit_count()
        m &= m - 1
    return -1 if inversions & 1 else 1


class SuperAlgebra:
    """The free commutative superalgebra ``base[t_1..t_p | xi_1..xi_q]``.

    >>> A = SuperAlgebra(ZZ, even_gens=1, odd_gens=3)
    >>> print(A.xi(2) * A.xi(1))
    -xi1*xi2
    >>> print(A.t(1) * A.t(1) - A.scalar(4))
    -4 + t1*t1
    """

    __slots__ = ("base", "even_gens", "odd_gens")

    def __init__(self, base: BaseRing, even_gens: int = 0, odd_gens: int = 0):
        if not isinstance(base, BaseRing):
            raise TypeError("base must be a BaseRing")
        if not isinstance(even_gens, int) or even_gens < 0:
            raise ValueError("even_gens must be a nonnegative integer")
        if not isinstance(odd_gens, int) or not 0 <= odd_gens <= _MAX_ODD_GENS:
            raise ValueError(f"odd_gens must lie in 0..{_MAX_ODD_GENS}")
        self.base = base
        self.even_gens = even_gens
        self.odd_gens = odd_gens

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SuperAlgebra)
            and other.base == self.base
            and other.even_gens == self.even_gens
            and other.odd_gens == self.odd_gens
        )

    def __hash__(self) -> int:
        return hash((self.base, self.even_gens, self.odd_gens))

    def __repr__(self) -> str:
        return (
            f"SuperAlgebra({self.base!r}, even_gens={self.even_gens}, "
            f"odd_gens={self.odd_gens})"
        )

    def __str__(self) -> str:
        evens = ",".join(f"t{i}" for i in range(1, self.even_gens + 1))
        odds = ",".join(f"xi{j}" for j in range(1, self.odd_gens + 1))
        return f"{self.base}[{evens}|{odds}]"

    # -- element constructors -------------------------------------------
    def zero(self) -> "SuperElement":
        return SuperElement(self, {})

    def one(self) -> "SuperElement":
        return self.scalar(1)

    def scalar(self, value: object) -> "SuperElement":
        return SuperElement(self, {((0,) * self.even_gens, 0): value})

    def t(self, index: int) -> "SuperElement":
        """The even generator ``t_index`` (1-based)."""
        if not 1 <= index <= self.even_gens:
            raise ValueError(f"t index {index} out of range 1..{self.even_gens}")
        exps = tuple(1 if k == index - 1 else 0 for k in range(self.even_gens))
        return SuperElement(self, {(exps, 0): 1})

    def xi(self, index: int) -> "SuperElement":
        """The odd generator ``xi_index`` (1-based)."""
        if not 1 <= index <= self.odd_gens:
            raise ValueError(f"xi index {index} out of range 1..{self.odd_gens}")
        return SuperElement(self, {((0,) * self.even_gens, 1 << (index - 1)): 1})

    def monomial(
        self,
        even_exps: Iterable[int] = (),
        odd_indices: Iterable[int] = (),
        coeff: object = 1,
    ) -> "SuperElement":
        """The monomial ``coeff * t^even_exps * xi_{j1}...xi_{jk}``.

        ``odd_indices`` is treated as a set of distinct 1-based indices; the
        generators are multiplied in ascending order.
        """
        exps = tuple(even_exps)
        if len(exps) < self.even_gens:
            exps = exps + (0,) * (self.even_gens - len(exps))
        mask = 0
        for j in odd_indices:
            if not 1 <= j <= self.odd_gens:
                raise ValueError(f"xi index {j} out of range 1..{self.odd_gens}")
            bit = 1 << (j - 1)
            if mask & bit:
                raise ValueError(f"repeated odd index {j}")
            mask |= bit
        return SuperElement(self, {(exps, mask): coeff})

    def parse(self, text: str) -> "SuperElement":
        return parse_element(self, text)


class SuperElement:
    """A sparse element of a free commutative superalgebra.

    Terms map ``(even multidegree, odd bitmask)`` to nonzero coefficients;
    odd generators inside a term key are implicitly ascending, with all sign
    normalization absorbed into the coefficient.
    """

    __slots__ = ("algebra", "_terms")

    def __init__(self, algebra: SuperAlgebra, terms: Mapping[TermKey, object]):
        if not isinstance(algebra, SuperAlgebra):
            raise TypeError("algebra must be a SuperAlgebra")
        clean: dict[TermKey, Scalar] = {}
        for (exps, mask), raw in terms.items():
            exps = tuple(exps)
            if len(exps) != algebra.even_gens or any(
                not isinstance(e, int) or e < 0 for e in exps
            ):
                raise ValueError(f"bad even multidegree {exps!r}")
            if not isinstance(mask, int) or mask < 0 or mask >> algebra.odd_gens:
                raise ValueError(f"bad odd bitmask {mask!r}")
            coeff = algebra.base.coerce(raw)
            if coeff == 0:
                continue
            key = (exps, mask)
            if key in clean:
                raise ValueError(f"duplicate term key {key!r}")
            clean[key] = coeff
        self.algebra = algebra
        self._terms = clean

    @classmethod
    def _raw(cls, algebra: SuperAlgebra, terms: dict) -> "SuperElement":
        """Internal fast path: terms already canonical, nonzero, coerced."""
        self = object.__new__(cls)
        self.algebra = algebra
        self._terms = terms
        return self

    # -- inspection ------------------------------------------------------
    def items(self) -> list[tuple[TermKey, Scalar]]:
        """Terms in the canonical print order (ascending total degree)."""
        return sorted(
            self._terms.items(),
            key=lambda kv: (
                sum(kv[0][0]) + kv[0][1].bit_count(),
                kv[0][0],
                kv[0][1],
            ),
        )

    def coefficient(
        self, even_exps: Iterable[int] = (), odd_indices: Iterable[int] = ()
    ) -> Scalar:
        """Coefficient of the canonical monomial ``t^e * xi_{j1<...<jk}``."""
        exps = tuple(even_exps)
        if len(exps) < self.algebra.even_gens:
            exps = exps + (0,) * (self.algebra.even_gens - len(exps))
        mask = 0
        for j in odd_indices:
            mask |= 1 << (j - 1)
        return self._terms.get((exps, mask), self.algebra.base.zero)

    def is_zero(self) -> bool:
        return not self._terms

    def parity(self) -> "int | None":
        """0 for even, 1 for odd, None for inhomogeneous; zero counts as even."""
        parities = {mask.bit_count() & 1 for _, mask in self._terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def is_homogeneous(self) -> bool:
        return self.parity() is not None

    def is_even(self) -> bool:
        return self.parity() == 0

    def is_odd(self) -> bool:
        return self.parity() == 1 or self.is_zero()

    def even_part(self) -> "SuperElement":
        return SuperElement._raw(
            self.algebra,
            {k: c for k, c in self._terms.items() if k[1].bit_count() % 2 == 0},
        )

    def odd_part(self) -> "SuperElement":
        return SuperElement._raw(
            self.algebra,
            {k: c for k, c in self._terms.items() if k[1].bit_count() % 2 == 1},
        )

    def body(self) -> Scalar:
        """The coefficient of 1 (all generators killed)."""
        return self._terms.get(
            ((0,) * self.algebra.even_gens, 0), self.algebra.base.zero
        )

    def odd_coefficient(self, odd_indices: Iterable[int]) -> "SuperElement":
        """The formal coefficient of ``xi_{j1<...<jk}``: terms with exactly
        that odd mask, with the mask removed."""
        mask = 0
        for j in odd_indices:
            mask |= 1 << (j - 1)
        return SuperElement._raw(
            self.algebra,
            {(exps, 0): c for (exps, w), c in self._terms.items() if w == mask},
        )

    def max_even_degree(self) -> int:
        """Largest total degree in the even generators (0 for 0)."""
        return max((sum(exps) for exps, _ in self._terms), default=0)

    # -- arithmetic ------------------------------------------------------
    def _check_same(self, other: "SuperElement") -> None:
        if other.algebra != self.algebra:
            raise SpecMismatchError(
                f"operands live in different algebras: {self.algebra} vs {other.algebra}"
            )

    def _as_scalar(self, value: object) -> "Scalar | None":
        if isinstance(value, SuperElement):
            return None
        try:
            return self.algebra.base.coerce(value)
        except CoercionError:
            return None

    def __add__(self, other: object) -> "SuperElement":
        if isinstance(other, SuperElement):
            self._check_same(other)
            out = dict(self._terms)
            for key, c in other._terms.items():
                acc = out.get(key)
                total = c if acc is None else acc + c
                if total == 0:
                    out.pop(key, None)
                else:
                    out[key] = total
            return SuperElement._raw(self.algebra, out)
        c = self._as_scalar(other)
        if c is None:
            return NotImplemented
        return self + self.algebra.scalar(c)

    __radd__ = __add__

    def __sub__(self, other: object) -> "SuperElement":
        if isinstance(other, SuperElement):
            return self + (-other)
        c = self._as_scalar(other)
        if c is None:
            return NotImplemented
        return self + self.algebra.scalar(-c)

    def __rsub__(self, other: object) -> "SuperElement":
        return (-self) + other

    def __neg__(self) -> "SuperElement":
        return SuperElement._raw(
            self.algebra, {k: -c for k, c in self._terms.items()}
        )

    def __mul__(self, other: object) -> "SuperElement":
        if isinstance(other, SuperElement):
            self._check_same(other)
            out: dict[TermKey, Scalar] = {}
            for (d1, w1), c1 in self._terms.items():
                for (d2, w2), c2 in other._terms.items():
                    if w1 & w2:
                        continue
                    c = c1 * c2
                    if _merge_sign(w1, w2) < 0:
                        c = -c
                    key = (
                        tuple(a + b for a, b in zip(d1, d2)),
                        w1 | w2,
                    )
                    acc = out.get(key)
                    total = c if acc is None else acc + c
                    if total == 0:
                        out.pop(key, None)
                    else:
                        out[key] = total
            return SuperElement._raw(self.algebra, out)
        c = self._as_scalar(other)
        if c is None:
            return NotImplemented
        if c == 0:
            return self.algebra.zero()
        return SuperElement._raw(
            self.algebra, {k: c0 * c for k, c0 in self._terms.items()}
        )

    __rmul__ = __mul__  # scalars are even: no sign

    def __pow__(self, exponent: int) -> "SuperElement":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = self.algebra.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SuperElement):
            return other.algebra == self.algebra and other._terms == self._terms
        c = self._as_scalar(other)
        if c is None:
            return NotImplemented
        return self == self.algebra.scalar(c)

    def __hash__(self) -> int:
        return hash((self.algebra, frozenset(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"<SuperElement {format_element(self)} over {self.algebra}>"

    def __str__(self) -> str:
        return format_element(self)


# ---------------------------------------------------------------------------
# Named operations
# ---------------------------------------------------------------------------

def sa_mul(a: SuperElement, b: SuperElement) -> SuperElement:
    """Supercommutative product of two elements of the same algebra."""
    if not isinstance(a, SuperElement) or not isinstance(b, SuperElement):
        raise TypeError("sa_mul expects two SuperElements")
    return a * b


def sa_invert(u: SuperElement) -> SuperElement:
    """Inverse of an even element whose body is a unit of the base ring.

    The inverse exists iff the body is a unit and the remainder is nilpotent,
    which in a free superalgebra means every non-body term contains an odd
    generator.

    >>> A = SuperAlgebra(ZZ, even_gens=1, odd_gens=2)
    >>> print(sa_invert(A.one() + A.xi(1) * A.xi(2)))
    1 - xi1*xi2
    >>> sa_invert(A.one() + A.t(1))
    Traceback (most recent call last):
        ...
    supercartan.superalgebra.NotInvertibleError: non-nilpotent remainder: term t1 has no odd part
    """
    if not isinstance(u, SuperElement):
        raise TypeError("sa_invert expects a SuperElement")
    algebra = u.algebra
    if not u.is_even():
        raise NotInvertibleError("element is not even")
    body = u.body()
    if not algebra.base.is_unit(body):
        raise NotInvertibleError(f"body {body} is not a unit of {algebra.base}")
    for exps, mask in u._terms:
        if mask == 0 and any(exps):
            mono = _format_monomial(exps, mask)
            raise NotInvertibleError(
                f"non-nilpotent remainder: term {mono} has no odd part"
            )
    body_inv = algebra.base.invert(body)
    x = (u - algebra.scalar(body)) * body_inv
    # x is even with every term containing >= 2 odd generators, so the
    # geometric series terminates after at most odd_gens/2 steps.
    result = algebra.one()
    power = algebra.one()
    steps = 0
    while True:
        power = power * x
        if power.is_zero():
            break
        steps += 1
        if steps > algebra.odd_gens:
            raise AssertionError("geometric series failed to terminate")
        result = result + (power if steps % 2 == 0 else -power)
    return result * body_inv


def odd_filtration_degree(a: SuperElement) -> "int | float":
    """The largest m with ``a`` in the ideal generated by m-fold odd products.

    Equals the minimum odd-bitmask popcount over the nonzero terms of ``a``
    (``math.inf`` for the zero element).

    >>> A = SuperAlgebra(ZZ, even_gens=0, odd_gens=4)
    >>> x = A.xi(1) * A.xi(2)
    >>> odd_filtration_degree(x + x * A.xi(3) * A.xi(4))
    2
    >>> odd_filtration_degree(A.one())
    0
    >>> odd_filtration_degree(A.zero())
    inf
    """
    if not isinstance(a, SuperElement):
        raise TypeError("odd_filtration_degree expects a SuperElement")
    return min(
        (mask.bit_count() for _, mask in a._terms),
        default=math.inf,
    )


def in_odd_power_span(a: SuperElement, m: int) -> bool:
    """Membership in the even-coefficient span of m-fold odd products.

    A term qualifies iff its odd popcount is >= m and congruent to m mod 2;
    the zero element belongs for every m.
    """
    if not isinstance(m, int) or m < 0:
        raise ValueError("m must be a nonnegative integer")
    return all(
        mask.bit_count() >= m and (mask.bit_count() - m) % 2 == 0
        for _, mask in a._terms
    )


def in_odd_power_subalgebra(a: SuperElement, m: int) -> bool:
    """Membership in the unital subalgebra generated by m-fold odd products.

    That subalgebra is spanned by the scalars together with, for each j >= 1,
    the terms whose odd popcount is >= j*m and congruent to j*m mod 2.
    """
    if not isinstance(m, int) or m < 0:
        raise ValueError("m must be a nonnegative integer")
    for exps, mask in a._terms:
        weight = mask.bit_count()
        if weight == 0 and not any(exps):
            continue  # scalar term
        if m == 0:
            if weight % 2 == 0:
                continue
            return False
        if not any(
            weight - j * m >= 0 and (weight - j * m) % 2 == 0
            for j in range(1, weight // m + 1)
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# Text grammar
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens: list[tuple[str, object]] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:  # only trailing whitespace remains
            break
        pos = match.end()
        number, name, char = match.groups()
        if number is not None:
            tokens.append(("num", int(number)))
        elif name is not None:
            tokens.append(("name", name))
        elif char in "+-*/()":
            tokens.append((char, char))
        else:
            raise ParseError(f"unexpected character {char!r} in {text!r}")
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, algebra: SuperAlgebra, text: str):
        self.algebra = algebra
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

    def parse(self) -> SuperElement:
        value = self.expression()
        if self.peek() != "end":
            raise ParseError(f"trailing input after position {self.pos} in {self.text!r}")
        return value

    def expression(self) -> SuperElement:
        value = self.term()
        while self.peek() in "+-":
            op, _ = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> SuperElement:
        value = self.factor()
        while self.peek() == "*":
            self.next()
            value = value * self.factor()
        return value

    def factor(self) -> SuperElement:
        if self.peek() == "-":
            self.next()
            return -self.factor()
        return self.atom()

    def atom(self) -> SuperElement:
        kind = self.peek()
        if kind == "num":
            _, numerator = self.next()
            if self.peek() == "/":
                self.next()
                denominator = self.expect("num")
                if denominator == 0:
                    raise ParseError("zero denominator")
                return self.algebra.scalar(Fraction(numerator, denominator))
            return self.algebra.scalar(numerator)
        if kind == "name":
            _, name = self.next()
            return self.resolve(name)
        if kind == "(":
            self.next()
            value = self.expression()
            self.expect(")")
            return value
        raise ParseError(f"unexpected token {kind!r} in {self.text!r}")

    def resolve(self, name: str) -> SuperElement:
        if name == "sqrt2":
            return self.algebra.scalar(Sqrt2(0, 1))
        for prefix, getter in (("xi", self.algebra.xi), ("t", self.algebra.t)):
            if name.startswith(prefix) and name[len(prefix):].isdigit():
                index = int(name[len(prefix):])
                try:
                    return getter(index)
                except ValueError as exc:
                    raise ParseError(str(exc)) from exc
        raise ParseError(f"unknown generator {name!r}")


def parse_element(algebra: SuperAlgebra, text: str) -> SuperElement:
    """Parse element text: integers/fractions, t<i>, xi<j>, sqrt2, + - * ()."""
    return _Parser(algebra, text).parse()


def _format_monomial(exps: tuple, mask: int) -> str:
    parts = []
    for i, e in enumerate(exps):
        parts.extend([f"t{i + 1}"] * e)
    j = 1
    while mask:
        if mask & 1:
            parts.append(f"xi{j}")
        mask >>= 1
        j += 1
    return "*".join(parts)


def _coefficient_text(coeff: Scalar, has_monomial: bool) -> tuple[str, bool]:
    """Return (magnitude text, is_negative); empty text means coefficient 1."""
    if isinstance(coeff, Sqrt2):
        if coeff.b == 0:
            return _coefficient_text(coeff.a, has_monomial)
        if coeff.a == 0:
            negative = coeff.b < 0
            magnitude = abs(coeff.b)
            if magnitude == 1:
                return "sqrt2", negative
            return f"{magnitude}*sqrt2", negative
        negative = coeff.a < 0
        c = -coeff if negative else coeff
        return f"({c})", negative
    negative = coeff < 0
    magnitude = -coeff if negative else coeff
    if magnitude == 1 and has_monomial:
        return "", negative
    return str(magnitude), negative


def format_element(x: SuperElement) -> str:
    """Canonical text form; ``parse_element`` is a left inverse of this."""
    if x.is_zero():
        return "0"
    chunks: list[str] = []
    for (exps, mask), coeff in x.items():
        monomial = _format_monomial(exps, mask)
        coeff_text, negative = _coefficient_text(coeff, bool(monomial))
        if coeff_text and monomial:
            body = f"{coeff_text}*{monomial}"
        else:
            body = coeff_text or monomial or "1"
        if not chunks:
            chunks.append(f"-{body}" if negative else body)
        else:
            chunks.append(f" - {body}" if negative else f" + {body}")
    return "".join(chunks)
