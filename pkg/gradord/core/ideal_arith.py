"""
Fractional ideals of the coefficient maximal order.

Two backends are supported:

* ``dvr``: the ideal m^k of a discrete valuation ring, stored as the exponent k.
* ``monomial``: a fractional monomial ideal of a two-variable regular local ring
  (the model ring O_K[[T]] with uniformizer p), stored as the reduced antichain
  of exponent pairs (a, b) of its generators p^a T^b.

Ideals are immutable pydantic models in canonical form, so equality of
ideals is equality of models.
"""
import re
import logging
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, root_validator

from gradord.core.exceptions import (
    BackendMismatchError,
    IdealParseError,
    NonInvertibleIdealError,
)

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int]
# A ring element up to units: an integer for the dvr backend, a pair for monomials
RingExponent = Union[int, Exponent]


class IdealBackend(str, Enum):
    dvr = "dvr"
    monomial = "monomial"


def reduce_antichain(generators: Iterable[Exponent]) -> Tuple[Exponent, ...]:
    """
    Keep only the minimal exponent pairs of a generator set.

    The result is sorted by ascending first component, so the second components
    strictly decrease.

    Args:
        generators: Exponent pairs (a, b) standing for p^a T^b

    Returns:
        The reduced antichain
    """
    reduced: List[Exponent] = []
    for a, b in sorted(set((int(a), int(b)) for a, b in generators)):
        # Sorted by (a, b): a pair is redundant iff an earlier kept pair has b' <= b
        if not reduced or b < reduced[-1][1]:
            reduced.append((a, b))
    return tuple(reduced)


class FracIdeal(BaseModel):
    """A nonzero two-sided fractional ideal in canonical form."""
    backend: IdealBackend
    exponent: Optional[int] = None
    generators: Tuple[Exponent, ...] = ()

    class Config:
        frozen = True

    @root_validator
    def normalize(cls, values):
        backend = values.get('backend')
        if backend == IdealBackend.dvr:
            if values.get('exponent') is None:
                raise ValueError("A dvr ideal needs an exponent")
            values['generators'] = ()
        elif backend == IdealBackend.monomial:
            generators = values.get('generators') or ()
            if not generators:
                raise ValueError("A monomial ideal needs at least one generator (the zero ideal is not allowed)")
            values['generators'] = reduce_antichain(generators)
            values['exponent'] = None
        return values

    def __str__(self) -> str:
        return format_ideal(self)

    def __repr__(self) -> str:
        return f"FracIdeal({format_ideal(self)!r})"

    def __mul__(self, other: "FracIdeal") -> "FracIdeal":
        return product(self, other)

    def __add__(self, other: "FracIdeal") -> "FracIdeal":
        return ideal_sum(self, other)

    def __and__(self, other: "FracIdeal") -> "FracIdeal":
        return intersect(self, other)

    def __le__(self, other: "FracIdeal") -> bool:
        return contains(other, self)

    def __ge__(self, other: "FracIdeal") -> bool:
        return contains(self, other)


# ============================================================================
# Construction
# ============================================================================

def dvr_ideal(k: int) -> FracIdeal:
    """The ideal m^k of the dvr backend."""
    return FracIdeal.construct(backend=IdealBackend.dvr, exponent=int(k), generators=())


def monomial_ideal(generators: Iterable[Exponent]) -> FracIdeal:
    """The monomial ideal generated by the given exponent pairs."""
    reduced = reduce_antichain(generators)
    if not reduced:
        raise ValueError("A monomial ideal needs at least one generator (the zero ideal is not allowed)")
    return FracIdeal.construct(backend=IdealBackend.monomial, exponent=None, generators=reduced)


def principal_ideal(backend: IdealBackend, element: RingExponent) -> FracIdeal:
    if IdealBackend(backend) == IdealBackend.dvr:
        return dvr_ideal(int(element))
    a, b = element
    return monomial_ideal([(a, b)])


def unit_ideal(backend: IdealBackend) -> FracIdeal:
    """Ω itself."""
    if IdealBackend(backend) == IdealBackend.dvr:
        return dvr_ideal(0)
    return monomial_ideal([(0, 0)])


def maximal_ideal(backend: IdealBackend) -> FracIdeal:
    """The unique two-sided maximal ideal m_Ω: m in the dvr backend, (p, T) for monomials."""
    if IdealBackend(backend) == IdealBackend.dvr:
        return dvr_ideal(1)
    return monomial_ideal([(1, 0), (0, 1)])


# ============================================================================
# Lattice and ring operations
# ============================================================================

def _check_backend(I: FracIdeal, J: FracIdeal) -> None:
    if I.backend != J.backend:
        raise BackendMismatchError(
            f"Backend mismatch: {I.backend.value} ideal {format_ideal(I)} "
            f"against {J.backend.value} ideal {format_ideal(J)}"
        )


def product(I: FracIdeal, J: FracIdeal) -> FracIdeal:
    _check_backend(I, J)
    if I.backend == IdealBackend.dvr:
        return dvr_ideal(I.exponent + J.exponent)
    return monomial_ideal(
        (a + c, b + d) for a, b in I.generators for c, d in J.generators
    )


def ideal_sum(I: FracIdeal, J: FracIdeal) -> FracIdeal:
    _check_backend(I, J)
    if I.backend == IdealBackend.dvr:
        return dvr_ideal(min(I.exponent, J.exponent))
    return monomial_ideal(I.generators + J.generators)


def intersect(I: FracIdeal, J: FracIdeal) -> FracIdeal:
    _check_backend(I, J)
    if I.backend == IdealBackend.dvr:
        return dvr_ideal(max(I.exponent, J.exponent))
    # lcm of every pair of generators
    return monomial_ideal(
        (max(a, c), max(b, d)) for a, b in I.generators for c, d in J.generators
    )


def element_in(I: FracIdeal, element: RingExponent) -> bool:
    """
    Check whether the monomial with the given exponent lies in I.

    Args:
        I: The ideal
        element: An integer k (the element π^k) or a pair (a, b) (the element p^a T^b)

    Returns:
        True if the element is in I
    """
    if I.backend == IdealBackend.dvr:
        return int(element) >= I.exponent
    a, b = element
    return any(c <= a and d <= b for c, d in I.generators)


def contains(I: FracIdeal, J: FracIdeal) -> bool:
    """True iff I ⊇ J."""
    _check_backend(I, J)
    if I.backend == IdealBackend.dvr:
        return I.exponent <= J.exponent
    return all(element_in(I, g) for g in J.generators)


def is_invertible(I: FracIdeal) -> bool:
    """Invertible means principal: always for dvr, a single generator for monomials."""
    if I.backend == IdealBackend.dvr:
        return True
    return len(I.generators) == 1


def inverse(I: FracIdeal) -> FracIdeal:
    if not is_invertible(I):
        raise NonInvertibleIdealError(f"Ideal {format_ideal(I)} is not invertible (not principal)")
    if I.backend == IdealBackend.dvr:
        return dvr_ideal(-I.exponent)
    (a, b), = I.generators
    return monomial_ideal([(-a, -b)])


def power(I: FracIdeal, k: int) -> FracIdeal:
    """I^k; negative k requires I invertible."""
    if k < 0:
        return power(inverse(I), -k)
    result = unit_ideal(I.backend)
    for _ in range(k):
        result = product(result, I)
    return result


def generator_elements(I: FracIdeal) -> List[RingExponent]:
    """The generators of I as ring exponents."""
    if I.backend == IdealBackend.dvr:
        return [I.exponent]
    return list(I.generators)


def ideal_intersection_all(ideals: Sequence[FracIdeal]) -> FracIdeal:
    result = ideals[0]
    for ideal in ideals[1:]:
        result = intersect(result, ideal)
    return result


# ============================================================================
# Text serialization
# ============================================================================

_DVR_PATTERN = re.compile(r"^m(?:\^\(?(-?\d+)\)?)?$")
_FACTOR_PATTERN = re.compile(r"(p|T)(?:\^\(?(-?\d+)\)?)?")
_UNIT_NAMES = {"1", "Ω", "O", "Omega"}


def _format_monomial(a: int, b: int) -> str:
    return f"p^{a}*T^{b}"


def format_ideal(I: FracIdeal) -> str:
    """
    Canonical text form: ``m^k`` for dvr ideals, ``p^a*T^b, p^c*T^d`` for monomial ideals.
    """
    if I.backend == IdealBackend.dvr:
        return f"m^{I.exponent}"
    return ", ".join(_format_monomial(a, b) for a, b in I.generators)


def _parse_monomial(term: str) -> Exponent:
    compact = term.replace(" ", "")
    if compact in _UNIT_NAMES:
        return (0, 0)
    a = b = 0
    position = 0
    for match in _FACTOR_PATTERN.finditer(compact):
        gap = compact[position:match.start()]
        if gap not in ("", "*"):
            raise IdealParseError(f"Cannot parse monomial '{term}'")
        power_value = int(match.group(2)) if match.group(2) is not None else 1
        if match.group(1) == "p":
            a += power_value
        else:
            b += power_value
        position = match.end()
    if position == 0 or position != len(compact):
        raise IdealParseError(f"Cannot parse monomial '{term}'")
    return (a, b)


def parse_ideal(text: str, backend: IdealBackend) -> FracIdeal:
    """
    Parse an ideal string for the given backend.

    Accepts the canonical forms plus shorthands such as ``m``, ``Ω``, ``1``,
    ``(p,T)``, ``p*T`` and ``T^2``; ``m`` is the maximal ideal in both backends.

    Args:
        text: The ideal string
        backend: The backend to parse into

    Returns:
        The parsed ideal

    Raises:
        IdealParseError: If the text is not an ideal of the backend
    """
    backend = IdealBackend(backend)
    stripped = text.strip()
    if stripped.startswith("(") and stripped.endswith(")"):
        stripped = stripped[1:-1].strip()
    if not stripped:
        raise IdealParseError("Empty ideal string")

    if backend == IdealBackend.dvr:
        compact = stripped.replace(" ", "")
        if compact in _UNIT_NAMES:
            return unit_ideal(backend)
        match = _DVR_PATTERN.match(compact)
        if not match:
            raise IdealParseError(f"Cannot parse dvr ideal '{text}' (expected m^k)")
        return dvr_ideal(int(match.group(1)) if match.group(1) is not None else 1)

    if stripped.replace(" ", "") == "m":
        return maximal_ideal(backend)
    generators = [_parse_monomial(term) for term in stripped.split(",")]
    return monomial_ideal(generators)
