"""
Brute-force central conductor of Z_p[H] in its maximal order.

For every p-adic orbit of characters the maximal order component Γε is
written down explicitly: for linear characters it is Z_p[H]ε itself (the
ring of integers of F(η)), for rational characters with a bundled integral
realization ρ it is ρ^{-1}(M_d(Z_p)) spanned by the matrix-unit elements
(d/#H) Σ_h ρ(h^{-1})_{ji} h. The centre of Γε is O_{F(η)}; the conductor
component {z ∈ O_{F(η)} : zΓε ⊆ Z_p[H]} is found by elementary divisors
modulo p^precision.
"""
import logging
from typing import List, Optional, Sequence

from sympy import Rational

from gradord.core.config import get_settings
from gradord.core.cyclotomic import CyclotomicNumber
from gradord.core.exceptions import OracleError, PrecisionExhaustedError
from gradord.core.finite_groups import CharacterTable, FiniteGroup
from gradord.core.group_algebra import (
    character_field_subgroup,
    decomposition_group,
    epsilon_idempotent,
    p_adic_orbits,
    subfield_invariants,
)
from gradord.core.padic_linalg import annihilator_length
from gradord.core.schemas import OracleOrbit

logger = logging.getLogger(__name__)

MIN_ORACLE_PRECISION = 6


def _rational_product(group: FiniteGroup, u: Sequence[Rational], v: Sequence[Rational]) -> List[Rational]:
    result = [Rational(0)] * group.order
    for x, a in enumerate(u):
        if a == 0:
            continue
        for y, b in enumerate(v):
            if b:
                xy = group.table[x][y]
                result[xy] += a * b
    return result


def _root_order(value: CyclotomicNumber) -> int:
    """Multiplicative order of a root of unity."""
    one = CyclotomicNumber.one(value.level)
    power, k = value, 1
    while power != one:
        power = power * value
        k += 1
        if k > 2 * value.level:
            raise OracleError(f"{value.to_literal()} is not a root of unity")
    return k


def _linear_orbit_basis(table: CharacterTable, row: int, epsilon: List[Rational], rank: int) -> List[List[Rational]]:
    group = table.group
    orders = [_root_order(table.value(row, h)) for h in range(group.order)]
    generator = max(range(group.order), key=lambda h: (orders[h], -h))
    basis = []
    power = [Rational(0)] * group.order
    power[group.identity] = Rational(1)
    for _ in range(rank):
        basis.append(_rational_product(group, power, epsilon))
        step = [Rational(0)] * group.order
        step[generator] = Rational(1)
        power = _rational_product(group, power, step)
    return basis


def _matrix_unit_basis(table: CharacterTable, row: int) -> List[List[Rational]]:
    group = table.group
    matrices = table.realizations[row]
    d = table.degree(row)
    factor = Rational(d, group.order)
    basis = []
    for i in range(d):
        for j in range(d):
            basis.append([factor * matrices[group.inverses[h]][j][i] for h in range(group.order)])
    return basis


def bruteforce_conductor(table: CharacterTable, prime: int, precision: Optional[int] = None) -> List[OracleOrbit]:
    """
    Per-orbit valuations of the central conductor of Z_p[H], by lattice computation.

    Args:
        table: Character table of H (#H bounded by the configured oracle limit)
        prime: Odd prime p
        precision: Work modulo p^precision; defaults to the configured precision

    Returns:
        One entry per p-adic orbit, the valuation normalized in F(η)

    Raises:
        OracleError: If the group is too large or a component has no integral model
        PrecisionExhaustedError: If the valuation cannot be certified at this precision
    """
    settings = get_settings()
    precision = settings.precision if precision is None else precision
    group = table.group
    if group.order > settings.oracle_max_order:
        raise OracleError(f"Group order {group.order} exceeds the oracle limit {settings.oracle_max_order}")
    if precision < MIN_ORACLE_PRECISION:
        raise OracleError(f"The conductor oracle needs precision at least {MIN_ORACLE_PRECISION} (got {precision})")

    dec = decomposition_group(table.level, prime)
    results = []
    for orbit in p_adic_orbits(table, prime):
        row = orbit[0]
        e, f = subfield_invariants(dec, character_field_subgroup(table, table.rows[row], prime))
        degree = table.degree(row)

        if degree == 1:
            if len(orbit) != e * f:
                raise OracleError(f"Orbit of {table.names[row]} has {len(orbit)} members but [F(η):Q_p] = {e * f}")
            epsilon = epsilon_idempotent(table, orbit).rational_vector()
            centre = _linear_orbit_basis(table, row, epsilon, len(orbit))
            overorder = centre
        elif row in table.realizations and len(orbit) == 1:
            centre = [epsilon_idempotent(table, orbit).rational_vector()]
            overorder = _matrix_unit_basis(table, row)
        elif group.order % prime:
            # p ∤ #H: Z_p[H] is already maximal
            results.append(OracleOrbit(orbit=orbit, valuation=0, ramification_index=e, residue_degree=f))
            continue
        else:
            raise OracleError(f"No integral realization bundled for {table.names[row]}")

        rows = []
        for c in centre:
            row_values = []
            for g in overorder:
                row_values.extend(_rational_product(group, c, g))
            rows.append(row_values)

        length = annihilator_length(rows, prime, precision)
        if length % f:
            raise OracleError(f"Conductor length {length} is not a multiple of the residue degree {f}")
        valuation = length // f
        if valuation >= precision - 1:
            raise PrecisionExhaustedError(f"Conductor valuation {valuation} is not below precision {precision} - 1")
        logger.info("%s orbit %s at p=%d: valuation %d", group.name, orbit, prime, valuation)
        results.append(OracleOrbit(orbit=orbit, valuation=valuation, ramification_index=e, residue_degree=f))
    return results
