"""
Idempotents of group algebras over Q_p and the invariants w_χ, v_χ.

Characters are rows of a CharacterTable; the Galois group of Q_p(ζ_N)/Q_p is
realized as the decomposition group at p inside (Z/N)^×.
"""
import logging
from math import gcd
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel
from sympy import Rational, isprime, n_order
from sympy.ntheory.modular import crt

from gradord.core.cyclotomic import CyclotomicNumber
from gradord.core.exceptions import AutomorphismError, FieldSpecError, GroupDataError
from gradord.core.finite_groups import CharacterTable, FiniteGroup

logger = logging.getLogger(__name__)


# ============================================================================
# Decomposition groups
# ============================================================================

class DecompositionGroup(BaseModel):
    level: int
    prime: int
    elements: List[int]
    inertia: List[int]
    frobenius: int
    ramification_index: int
    residue_degree: int

    class Config:
        frozen = True


def split_level(level: int, prime: int) -> Tuple[int, int]:
    """Write N = p^k m with p ∤ m; returns (k, m)."""
    k, m = 0, level
    while m % prime == 0:
        m //= prime
        k += 1
    return k, m


def units(level: int) -> List[int]:
    if level == 1:
        return [0]
    return [a for a in range(1, level) if gcd(a, level) == 1]


def subgroup_generated(generators: Sequence[int], level: int) -> List[int]:
    """The subgroup of (Z/N)^× generated by the given residues."""
    identity = 1 % level
    elements = {identity}
    frontier = [identity]
    gens = [g % level for g in generators]
    for g in gens:
        if gcd(g, level) != 1 and level > 1:
            raise FieldSpecError(f"{g} is not a unit modulo {level}")
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = (x * g) % level
            if y not in elements:
                elements.add(y)
                frontier.append(y)
    return sorted(elements)


def decomposition_group(level: int, prime: int) -> DecompositionGroup:
    """
    The decomposition group at p of Q(ζ_N)/Q as a subgroup of (Z/N)^×.

    With N = p^k m it consists of the residues congruent to a power of p
    modulo m. Its inertia part is the residues ≡ 1 mod m; a Frobenius element
    is ≡ p mod m and ≡ 1 mod p^k.

    Args:
        level: N ≥ 1
        prime: An odd prime p

    Returns:
        The decomposition group with its inertia subgroup and Frobenius
    """
    if level < 1:
        raise FieldSpecError(f"Level must be positive (got {level})")
    if prime < 3 or not isprime(prime):
        raise FieldSpecError(f"{prime} is not an odd prime")

    k, m = split_level(level, prime)
    f = int(n_order(prime, m)) if m > 1 else 1
    powers = {pow(prime, j, m) for j in range(f)} if m > 1 else {0}
    elements = [a for a in units(level) if a % m in powers]
    inertia = [a for a in elements if a % m == 1 % m]

    p_part = prime ** k
    if level == 1:
        frobenius = 0
    else:
        frobenius = int(crt([m, p_part], [prime % m, 1 % p_part])[0]) % level

    return DecompositionGroup(
        level=level, prime=prime, elements=elements, inertia=inertia,
        frobenius=frobenius, ramification_index=len(inertia), residue_degree=f,
    )


def subfield_invariants(dec: DecompositionGroup, subgroup: Sequence[int]) -> Tuple[int, int]:
    """
    Ramification index and residue degree over Q_p of the fixed field of a subgroup.

    The subgroup is intersected with the decomposition group first.
    """
    fixing = set(subgroup) & set(dec.elements)
    inertia = set(dec.inertia)
    tame = len(inertia & fixing)
    e = len(inertia) // tame
    # |I·S| = |I||S| / |I ∩ S|
    f = len(dec.elements) * tame // (len(inertia) * len(fixing))
    return e, f


# ============================================================================
# Group algebra elements
# ============================================================================

class GroupAlgebraElement:
    """Σ_h c_h h with cyclotomic coefficients, indexed by group element."""
    __slots__ = ('group', 'coefficients')

    def __init__(self, group: FiniteGroup, coefficients: Sequence[CyclotomicNumber]):
        self.group = group
        self.coefficients = tuple(coefficients)

    @classmethod
    def zero(cls, group: FiniteGroup, level: int) -> "GroupAlgebraElement":
        return cls(group, [CyclotomicNumber.zero(level)] * group.order)

    @classmethod
    def basis(cls, group: FiniteGroup, level: int, element: int) -> "GroupAlgebraElement":
        zero, one = CyclotomicNumber.zero(level), CyclotomicNumber.one(level)
        return cls(group, [one if h == element else zero for h in range(group.order)])

    @classmethod
    def from_rationals(cls, group: FiniteGroup, values: Sequence[Rational], level: int = 1) -> "GroupAlgebraElement":
        return cls(group, [CyclotomicNumber.rational(level, v) for v in values])

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, [a - b for a, b in zip(self.coefficients, other.coefficients)])

    def __mul__(self, other) -> "GroupAlgebraElement":
        if not isinstance(other, GroupAlgebraElement):
            return GroupAlgebraElement(self.group, [a * other for a in self.coefficients])
        table = self.group.table
        level = self.coefficients[0].level
        result = [CyclotomicNumber.zero(level)] * self.group.order
        for x, a in enumerate(self.coefficients):
            if a.is_zero():
                continue
            for y, b in enumerate(other.coefficients):
                if b.is_zero():
                    continue
                xy = table[x][y]
                result[xy] = result[xy] + a * b
        return GroupAlgebraElement(self.group, result)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def galois(self, a: int) -> "GroupAlgebraElement":
        return GroupAlgebraElement(self.group, [c.galois(a) for c in self.coefficients])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def rational_vector(self) -> List[Rational]:
        return [c.to_rational() for c in self.coefficients]

    def is_central(self) -> bool:
        level = self.coefficients[0].level
        for g in range(self.group.order):
            basis = GroupAlgebraElement.basis(self.group, level, g)
            if basis * self != self * basis:
                return False
        return True

    def literals(self) -> List[str]:
        return [c.to_literal() for c in self.coefficients]


# ============================================================================
# Orbits and idempotents
# ============================================================================

def galois_row(table: CharacterTable, row: int, a: int) -> Tuple[CyclotomicNumber, ...]:
    return tuple(value.galois(a) for value in table.rows[row])


def p_adic_orbits(table: CharacterTable, prime: int) -> List[List[int]]:
    """
    Partition Irr(H) into orbits under σ_a for a in the decomposition group at p.

    Returns:
        Orbits as sorted index lists, ordered by their first member
    """
    dec = decomposition_group(table.level, prime)
    seen = set()
    orbits = []
    for row in range(len(table)):
        if row in seen:
            continue
        orbit = set()
        for a in dec.elements:
            image = table.find_row(galois_row(table, row, a))
            if image is None:
                raise GroupDataError(f"Character table is not Galois stable: σ_{a} of {table.names[row]} is missing")
            orbit.add(image)
        seen.update(orbit)
        orbits.append(sorted(orbit))
    logger.debug("%s at p=%d: %d orbits", table.group.name, prime, len(orbits))
    return orbits


def primitive_idempotent(table: CharacterTable, row: int) -> GroupAlgebraElement:
    """e(η) = η(1)/#H Σ_h η(h^{-1}) h."""
    group = table.group
    factor = Rational(table.degree(row), group.order)
    coefficients = [table.value(row, group.inverses[h]) * factor for h in range(group.order)]
    return GroupAlgebraElement(group, coefficients)


def epsilon_idempotent(table: CharacterTable, orbit: Sequence[int]) -> GroupAlgebraElement:
    """ε(η): the sum of e(η') over the Galois orbit of η."""
    result = GroupAlgebraElement.zero(table.group, table.level)
    for row in orbit:
        result = result + primitive_idempotent(table, row)
    return result


def character_field_subgroup(table: CharacterTable, values: Sequence[CyclotomicNumber], prime: int) -> List[int]:
    """Decomposition-group elements fixing every given character value."""
    dec = decomposition_group(table.level, prime)
    return [a for a in dec.elements if all(value.galois(a) == value for value in values)]


# ============================================================================
# Twisted characters: w_χ and v_χ
# ============================================================================

class ChiInvariants(BaseModel):
    w_chi: int
    v_chi: int
    tau: int
    orbit: List[int]
    eta_field_subgroup: List[int]
    chi_field_subgroup: List[int]


def validate_automorphism(group: FiniteGroup, alpha: Sequence[int], prime: int) -> int:
    """
    Check that alpha is an automorphism of p-power order.

    Returns:
        The order of alpha
    """
    alpha = list(alpha)
    if len(alpha) != group.order or not group.is_automorphism(alpha):
        raise AutomorphismError(f"The given map is not an automorphism of {group.name}")
    order, current = 1, alpha
    identity = list(range(group.order))
    while current != identity:
        current = [alpha[x] for x in current]
        order += 1
    k = order
    while k % prime == 0:
        k //= prime
    if k != 1:
        raise AutomorphismError(f"Automorphism order {order} is not a power of {prime}")
    return order


def twist_row(table: CharacterTable, row: int, alpha: Sequence[int]) -> int:
    """The row of η∘α."""
    group = table.group
    values = [table.value(row, alpha[cls[0]]) for cls in group.classes]
    index = table.find_row(values)
    if index is None:
        raise GroupDataError(f"{table.names[row]}∘α is not a character of the table")
    return index


def chi_invariants(table: CharacterTable, alpha: Sequence[int], row: int, prime: int) -> ChiInvariants:
    """
    Compute w_χ and v_χ for χ induced from η along the automorphism alpha.

    w_χ is the orbit length of η under η ↦ η∘α; v_χ the least v with
    η∘α^v = σ_a∘η for some a fixing the values of χ|_H = Σ_{j<w} η∘α^j.

    Args:
        table: Character table of H
        alpha: The automorphism h ↦ γ h γ^{-1} as an index map
        row: The character η
        prime: The odd prime p

    Returns:
        The invariants, with tau the least residue realizing τ
    """
    validate_automorphism(table.group, alpha, prime)
    if not 0 <= row < len(table.rows):
        raise GroupDataError(f"Character index {row} is out of range for {len(table.rows)} characters")

    orbit = [row]
    current = twist_row(table, row, alpha)
    while current != row:
        orbit.append(current)
        current = twist_row(table, current, alpha)
    w = len(orbit)

    restriction = list(table.rows[orbit[0]])
    for other in orbit[1:]:
        restriction = [a + b for a, b in zip(restriction, table.rows[other])]
    chi_subgroup = character_field_subgroup(table, restriction, prime)
    eta_subgroup = character_field_subgroup(table, table.rows[row], prime)

    for v in range(1, w + 1):
        target = table.rows[orbit[v % w]]
        witnesses = [a for a in chi_subgroup if galois_row(table, row, a) == target]
        if not witnesses:
            continue
        # All witnesses must restrict to one automorphism of F(η)
        restrictions = {tuple(value.galois(a) for value in table.rows[row]) for a in witnesses}
        if len(restrictions) != 1:
            raise GroupDataError(f"More than one automorphism τ realizes v = {v} for {table.names[row]}")
        if w % v:
            raise GroupDataError(f"v_chi = {v} does not divide w_chi = {w}")
        logger.info("w_chi=%d v_chi=%d for %s", w, v, table.names[row])
        return ChiInvariants(
            w_chi=w, v_chi=v, tau=min(witnesses), orbit=orbit,
            eta_field_subgroup=eta_subgroup, chi_field_subgroup=chi_subgroup,
        )

    raise GroupDataError(f"No power of α acts on {table.names[row]} as a Galois automorphism")
