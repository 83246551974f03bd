"""
Exact arithmetic in cyclotomic fields Q(ζ_N).

An element is a polynomial in ζ_N with rational coefficients, reduced modulo
the N-th cyclotomic polynomial, so every element has exactly deg Φ_N
coefficients in canonical form.
"""
import math
from functools import lru_cache
from typing import Iterable, Sequence, Tuple, Union

import sympy
from sympy import Poly, Rational, cyclotomic_poly, ilcm, resultant

from gradord.core.exceptions import CyclotomicParseError, GroupDataError

X = sympy.Symbol('x')

Scalar = Union[int, Rational]


@lru_cache(maxsize=None)
def cyclotomic_modulus(level: int) -> Poly:
    """Φ_N as a polynomial over QQ."""
    if level < 1:
        raise GroupDataError(f"Cyclotomic level must be positive (got {level})")
    return Poly(cyclotomic_poly(level, X), X, domain='QQ')


def _reduce(level: int, poly: Poly) -> Poly:
    return poly.rem(cyclotomic_modulus(level))


def _power_poly(level: int, terms: Iterable[Tuple[int, Scalar]]) -> Poly:
    """Σ c x^k with exponents taken modulo N and reduced modulo Φ_N."""
    dense = {}
    for k, c in terms:
        k %= level
        dense[k] = dense.get(k, 0) + c
    if not dense:
        return Poly(0, X, domain='QQ')
    poly = Poly.from_dict({(k,): c for k, c in dense.items()}, X, domain='QQ')
    return _reduce(level, poly)


class CyclotomicNumber:
    """An element of Q(ζ_N)."""
    __slots__ = ('level', 'poly', '_hash')

    def __init__(self, level: int, poly: Poly):
        self.level = level
        self.poly = poly
        self._hash = None

    # ------------------------------------------------------------------ construction

    @classmethod
    def from_coefficients(cls, level: int, coefficients: Sequence[Scalar]) -> "CyclotomicNumber":
        terms = [(k, Rational(c)) for k, c in enumerate(coefficients) if c != 0]
        return cls(level, _power_poly(level, terms))

    @classmethod
    def rational(cls, level: int, value: Scalar) -> "CyclotomicNumber":
        return cls.from_coefficients(level, [value])

    @classmethod
    def zero(cls, level: int) -> "CyclotomicNumber":
        return cls.rational(level, 0)

    @classmethod
    def one(cls, level: int) -> "CyclotomicNumber":
        return cls.rational(level, 1)

    @classmethod
    def root_of_unity(cls, level: int, k: int = 1) -> "CyclotomicNumber":
        """ζ_N^k."""
        return cls(level, _power_poly(level, [(k, 1)]))

    # ------------------------------------------------------------------ views

    @property
    def degree(self) -> int:
        return cyclotomic_modulus(self.level).degree()

    @property
    def coefficients(self) -> Tuple[Rational, ...]:
        """Coefficients of 1, ζ, ..., ζ^(d-1)."""
        values = [Rational(0)] * self.degree
        for (k,), c in self.poly.terms():
            values[k] = Rational(c)
        return tuple(values)

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coefficients[1:])

    def to_rational(self) -> Rational:
        if not self.is_rational():
            raise GroupDataError(f"{self.to_literal()} is not rational")
        return self.coefficients[0]

    # ------------------------------------------------------------------ level changes

    def lift(self, level: int) -> "CyclotomicNumber":
        """The same number written in Q(ζ_L) for a multiple L of the level."""
        if level == self.level:
            return self
        if level % self.level:
            raise GroupDataError(f"Cannot lift level {self.level} to {level}")
        step = level // self.level
        terms = [(k * step, c) for k, c in enumerate(self.coefficients) if c != 0]
        return CyclotomicNumber(level, _power_poly(level, terms))

    def minimal_level(self) -> int:
        """The least divisor M of the level with the number in Q(ζ_M)."""
        units = [a for a in range(1, self.level + 1) if math.gcd(a, self.level) == 1]
        for level in sympy.divisors(self.level):
            if all(self.galois(a) == self for a in units if a % level == 1 % level):
                return level
        return self.level

    def descend(self, level: int) -> "CyclotomicNumber":
        """The same number written in Q(ζ_M) for a divisor M of the level."""
        if level == self.level:
            return self
        if self.level % level:
            raise GroupDataError(f"Cannot descend level {self.level} to {level}")
        step = self.level // level
        basis = sympy.Matrix.hstack(*(
            sympy.Matrix(CyclotomicNumber.root_of_unity(self.level, k * step).coefficients)
            for k in range(cyclotomic_modulus(level).degree())
        ))
        try:
            solution, _ = basis.gauss_jordan_solve(sympy.Matrix(self.coefficients))
        except ValueError:
            raise GroupDataError(f"{self.to_literal()} does not lie in Q(ζ_{level})")
        return CyclotomicNumber.from_coefficients(level, list(solution))

    def _common(self, other) -> Tuple["CyclotomicNumber", "CyclotomicNumber"]:
        if not isinstance(other, CyclotomicNumber):
            return self, CyclotomicNumber.rational(self.level, Rational(other))
        if other.level == self.level:
            return self, other
        level = int(ilcm(self.level, other.level))
        return self.lift(level), other.lift(level)

    # ------------------------------------------------------------------ arithmetic

    def __add__(self, other) -> "CyclotomicNumber":
        a, b = self._common(other)
        return CyclotomicNumber(a.level, a.poly + b.poly)

    __radd__ = __add__

    def __neg__(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.level, -self.poly)

    def __sub__(self, other) -> "CyclotomicNumber":
        a, b = self._common(other)
        return CyclotomicNumber(a.level, a.poly - b.poly)

    def __rsub__(self, other) -> "CyclotomicNumber":
        return (-self) + other

    def __mul__(self, other) -> "CyclotomicNumber":
        if not isinstance(other, CyclotomicNumber):
            return CyclotomicNumber(self.level, self.poly * Rational(other))
        a, b = self._common(other)
        return CyclotomicNumber(a.level, _reduce(a.level, a.poly * b.poly))

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "CyclotomicNumber":
        return CyclotomicNumber(self.level, self.poly * (1 / Rational(other)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, (CyclotomicNumber, int, Rational)):
            return NotImplemented
        a, b = self._common(other)
        return a.poly == b.poly

    def __hash__(self) -> int:
        # equal numbers at different levels share their minimal-level form
        if self._hash is None:
            reduced = self.descend(self.minimal_level())
            if reduced.level == 1:
                self._hash = hash(reduced.coefficients[0])
            else:
                self._hash = hash((reduced.level, reduced.coefficients))
        return self._hash

    def galois(self, a: int) -> "CyclotomicNumber":
        """σ_a: ζ ↦ ζ^a for a unit a modulo N."""
        if sympy.gcd(a, self.level) != 1:
            raise GroupDataError(f"{a} is not a unit modulo {self.level}")
        terms = [(k * a, c) for k, c in enumerate(self.coefficients) if c != 0]
        return CyclotomicNumber(self.level, _power_poly(self.level, terms))

    def conjugate(self) -> "CyclotomicNumber":
        return self.galois(-1)

    def norm(self) -> Rational:
        """The norm from Q(ζ_N) to Q."""
        if self.is_zero():
            return Rational(0)
        return Rational(resultant(cyclotomic_modulus(self.level).as_expr(), self.poly.as_expr(), X))

    # ------------------------------------------------------------------ text

    def to_literal(self) -> str:
        return f"{self.level}:" + ",".join(str(c) for c in self.coefficients)

    def __str__(self) -> str:
        return self.to_literal()

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.to_literal()!r})"


def parse_cyclotomic(text: str, level: int = None) -> CyclotomicNumber:
    """
    Parse a literal ``N:c0,c1,...`` (rationals may be written a/b).

    A bare rational such as ``-1`` or ``1/2`` is accepted when a level is given.

    Args:
        text: The literal
        level: Level to lift the number to

    Returns:
        The parsed number
    """
    stripped = text.strip()
    try:
        if ":" in stripped:
            head, body = stripped.split(":", 1)
            source_level = int(head)
            coefficients = [Rational(part.strip()) for part in body.split(",") if part.strip()]
        else:
            if level is None:
                raise CyclotomicParseError(f"Literal '{text}' has no level")
            source_level = level
            coefficients = [Rational(stripped)]
    except (TypeError, ValueError, sympy.SympifyError) as e:
        raise CyclotomicParseError(f"Cannot parse cyclotomic literal '{text}': {e}") from e
    if source_level < 1:
        raise CyclotomicParseError(f"Cyclotomic level must be positive in '{text}'")
    number = CyclotomicNumber.from_coefficients(source_level, coefficients)
    return number.lift(level) if level is not None else number
