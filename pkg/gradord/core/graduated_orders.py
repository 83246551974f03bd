"""
Graduated orders in standard form.

An order Λ(n, I) is described by block sizes n = (n_1..n_t) and a t x t matrix
of fractional ideals I_ij of the coefficient maximal order Ω. The block (i, j)
of an element of Λ(n, I) is an n_i x n_j matrix with entries in I_ij.
"""
import logging
import math
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
from pydantic import BaseModel, validator

from gradord.core.config import get_settings
from gradord.core.exceptions import (
    BackendMismatchError,
    EpacError,
    HullError,
    LatticeError,
    NonInvertibleIdealError,
    OracleError,
    ShapeMismatchError,
    StandardFormError,
)
from gradord.core.ideal_arith import (
    FracIdeal,
    IdealBackend,
    RingExponent,
    contains,
    dvr_ideal,
    element_in,
    format_ideal,
    generator_elements,
    ideal_intersection_all,
    ideal_sum,
    intersect,
    inverse,
    is_invertible,
    maximal_ideal,
    monomial_ideal,
    principal_ideal,
    product,
    unit_ideal,
)
from gradord.core.schemas import ViolationReport

logger = logging.getLogger(__name__)

IdealMatrix = Tuple[Tuple[FracIdeal, ...], ...]
LatticeShape = Tuple[FracIdeal, ...]

P_SYMBOL, T_SYMBOL = sympy.symbols('p T')


class GraduatedOrder(BaseModel):
    blocks: Tuple[int, ...]
    ideals: IdealMatrix
    d_omega: FracIdeal

    class Config:
        frozen = True

    @validator('blocks')
    def validate_blocks(cls, v):
        if not v:
            raise ValueError("An order needs at least one block")
        if any(size < 1 for size in v):
            raise ValueError(f"Block sizes must be positive (got {list(v)})")
        return v

    @validator('ideals')
    def validate_ideals(cls, v, values):
        t = len(values.get('blocks', ()))
        if len(v) != t or any(len(row) != t for row in v):
            raise ValueError(f"Ideal matrix must be {t} x {t}")
        return v

    @property
    def t(self) -> int:
        return len(self.blocks)

    @property
    def total(self) -> int:
        return sum(self.blocks)

    @property
    def backend(self) -> IdealBackend:
        return self.d_omega.backend


# ============================================================================
# Construction helpers
# ============================================================================

def as_matrix(ideals: Sequence[Sequence[FracIdeal]]) -> IdealMatrix:
    return tuple(tuple(row) for row in ideals)


def matrix_backend(ideals: Sequence[Sequence[FracIdeal]]) -> IdealBackend:
    """
    Return the common backend of a square ideal matrix.

    Raises:
        ShapeMismatchError: If the matrix is not square
        BackendMismatchError: If entries mix backends
    """
    t = len(ideals)
    if t == 0 or any(len(row) != t for row in ideals):
        raise ShapeMismatchError(f"Ideal matrix must be square and nonempty (got {len(ideals)} rows)")
    backends = {ideal.backend for row in ideals for ideal in row}
    if len(backends) != 1:
        raise BackendMismatchError(f"Ideal matrix mixes backends {sorted(b.value for b in backends)}")
    return backends.pop()


def make_order(blocks: Sequence[int], ideals: Sequence[Sequence[FracIdeal]],
               d_omega: Optional[FracIdeal] = None) -> GraduatedOrder:
    """
    Assemble an order after checking shape and backend (not the standard-form conditions).
    """
    blocks = tuple(int(size) for size in blocks)
    if not blocks or any(size < 1 for size in blocks):
        raise ShapeMismatchError(f"Block sizes must be positive (got {list(blocks)})")
    backend = matrix_backend(ideals)
    if len(ideals) != len(blocks):
        raise ShapeMismatchError(f"{len(blocks)} blocks need a {len(blocks)} x {len(blocks)} ideal matrix (got {len(ideals)} rows)")
    if d_omega is None:
        d_omega = unit_ideal(backend)
    if d_omega.backend != backend:
        raise BackendMismatchError(f"d_omega {format_ideal(d_omega)} is not a {backend.value} ideal")
    return GraduatedOrder.construct(blocks=blocks, ideals=as_matrix(ideals), d_omega=d_omega)


def maximal_order(blocks: Sequence[int], backend: IdealBackend,
                  d_omega: Optional[FracIdeal] = None) -> GraduatedOrder:
    """M_n(Ω) written in the given block frame."""
    t = len(blocks)
    one = unit_ideal(backend)
    return make_order(blocks, [[one] * t for _ in range(t)], d_omega)


def staircase_order(blocks: Sequence[int], backend: IdealBackend,
                    ranks: Optional[Sequence[int]] = None,
                    d_omega: Optional[FracIdeal] = None) -> GraduatedOrder:
    """
    The extremal staircase order: I_ij = m when rank(i) < rank(j), Ω otherwise.

    With the identity ranking this is m above the diagonal and Ω on and below it.

    Args:
        blocks: Block sizes
        backend: Ideal backend
        ranks: A permutation of range(t) placing the blocks in the staircase
        d_omega: Inverse different of the coefficient ring

    Returns:
        The staircase order
    """
    t = len(blocks)
    ranks = list(range(t)) if ranks is None else list(ranks)
    if sorted(ranks) != list(range(t)):
        raise ShapeMismatchError(f"Ranks {ranks} are not a permutation of 0..{t - 1}")
    one, m = unit_ideal(backend), maximal_ideal(backend)
    ideals = [[m if ranks[i] < ranks[j] else one for j in range(t)] for i in range(t)]
    return make_order(blocks, ideals, d_omega)


# ============================================================================
# Ideal matrix arithmetic
# ============================================================================

def matrix_product(A: IdealMatrix, B: IdealMatrix) -> IdealMatrix:
    """(A*B)_ik = sum_j A_ij B_jk."""
    t = len(A)
    result = []
    for i in range(t):
        row = []
        for k in range(t):
            entry = product(A[i][0], B[0][k])
            for j in range(1, t):
                entry = ideal_sum(entry, product(A[i][j], B[j][k]))
            row.append(entry)
        result.append(tuple(row))
    return tuple(result)


def matrix_contains(A: IdealMatrix, B: IdealMatrix) -> bool:
    """Entrywise A ⊇ B."""
    t = len(A)
    if len(B) != t:
        raise ShapeMismatchError(f"Cannot compare a {t} x {t} ideal matrix with a {len(B)} x {len(B)} one")
    return all(contains(A[i][j], B[i][j]) for i in range(t) for j in range(t))


def matrix_intersect(A: IdealMatrix, B: IdealMatrix) -> IdealMatrix:
    t = len(A)
    if len(B) != t:
        raise ShapeMismatchError(f"Cannot intersect a {t} x {t} ideal matrix with a {len(B)} x {len(B)} one")
    return tuple(tuple(intersect(A[i][j], B[i][j]) for j in range(t)) for i in range(t))


def transpose_inverse(A: IdealMatrix) -> IdealMatrix:
    """The matrix I^{-,T}: entry (i, j) is I_ji^{-1}."""
    t = len(A)
    result = []
    for i in range(t):
        row = []
        for j in range(t):
            if not is_invertible(A[j][i]):
                raise NonInvertibleIdealError(
                    f"Entry ({j},{i}) = {format_ideal(A[j][i])} is not invertible",
                    position=(j, i),
                )
            row.append(inverse(A[j][i]))
        result.append(tuple(row))
    return tuple(result)


def scale_matrix(d: FracIdeal, A: IdealMatrix) -> IdealMatrix:
    return tuple(tuple(product(d, entry) for entry in row) for row in A)


# ============================================================================
# Standard form
# ============================================================================

def check_standard_form(ideals: IdealMatrix) -> ViolationReport:
    """
    Check conditions (i) multiplicativity, (ii) diagonal and (iii) properness, in that order.

    Args:
        ideals: A square ideal matrix with a single backend

    Returns:
        A report naming the first violated condition and its (0-based) indices
    """
    backend = matrix_backend(ideals)
    t = len(ideals)
    one = unit_ideal(backend)

    # Step 1: I_ij I_jk ⊆ I_ik
    for i in range(t):
        for j in range(t):
            for k in range(t):
                left = product(ideals[i][j], ideals[j][k])
                if not contains(ideals[i][k], left):
                    return ViolationReport(
                        valid=False, condition="i", indices=[i, j, k],
                        message=(f"condition (i) fails at ({i},{j},{k}): I_{i}{j}*I_{j}{k} = "
                                 f"{format_ideal(left)} is not contained in I_{i}{k} = {format_ideal(ideals[i][k])}"),
                    )

    # Step 2: I_ii = Ω
    for i in range(t):
        if ideals[i][i] != one:
            return ViolationReport(
                valid=False, condition="ii", indices=[i],
                message=f"condition (ii) fails at ({i}): I_{i}{i} = {format_ideal(ideals[i][i])} is not the unit ideal",
            )

    # Step 3: I_ij I_ji ⊊ Ω
    for i in range(t):
        for j in range(i + 1, t):
            loop = product(ideals[i][j], ideals[j][i])
            if not contains(one, loop) or loop == one:
                return ViolationReport(
                    valid=False, condition="iii", indices=[i, j],
                    message=(f"condition (iii) fails at ({i},{j}): I_{i}{j}*I_{j}{i} = "
                             f"{format_ideal(loop)} is not properly contained in the unit ideal"),
                )

    return ViolationReport(valid=True)


def validate_standard_form(blocks: Sequence[int], ideals: Sequence[Sequence[FracIdeal]],
                           d_omega: Optional[FracIdeal] = None) -> Union[GraduatedOrder, ViolationReport]:
    """
    Return the order when (i)-(iii) hold, otherwise the violation report.
    """
    order = make_order(blocks, ideals, d_omega)
    report = check_standard_form(order.ideals)
    if not report.valid:
        logger.info("Not a standard form: %s", report.message)
        return report
    return order


def build_order(blocks: Sequence[int], ideals: Sequence[Sequence[FracIdeal]],
                d_omega: Optional[FracIdeal] = None) -> GraduatedOrder:
    """Like validate_standard_form but raises StandardFormError on a violation."""
    result = validate_standard_form(blocks, ideals, d_omega)
    if isinstance(result, ViolationReport):
        raise StandardFormError(result.message)
    return result


def orders_equal(o1: GraduatedOrder, o2: GraduatedOrder) -> bool:
    """Entrywise equality on a fixed frame."""
    return o1.blocks == o2.blocks and o1.ideals == o2.ideals


# ============================================================================
# Radical and quotient
# ============================================================================

def jacobson_radical(order: GraduatedOrder) -> IdealMatrix:
    """Λ(n, I * E_m): the diagonal entries become m_Ω, the rest is unchanged."""
    m = maximal_ideal(order.backend)
    return tuple(
        tuple(product(entry, m) if i == j else entry for j, entry in enumerate(row))
        for i, row in enumerate(order.ideals)
    )


def radical_quotient(order: GraduatedOrder) -> List[Tuple[int, str]]:
    """
    Describe order/radical as a product of full matrix rings over the residue field.

    Returns:
        One (n_i, descriptor) pair per block

    Raises:
        StandardFormError: If, in the dvr backend, the length of order/radical is not sum n_i^2
    """
    blocks = [(size, f"M_{size}(Omega/m)") for size in order.blocks]
    if order.backend == IdealBackend.dvr:
        radical = jacobson_radical(order)
        length = sum(
            order.blocks[i] * order.blocks[j] * (radical[i][j].exponent - order.ideals[i][j].exponent)
            for i in range(order.t) for j in range(order.t)
        )
        expected = sum(size * size for size in order.blocks)
        if length != expected:
            raise StandardFormError(f"Length of order/radical is {length}, expected {expected}")
    return blocks


# ============================================================================
# Lattices
# ============================================================================

def _check_shape_length(order: GraduatedOrder, shape: Sequence[FracIdeal]) -> None:
    if len(shape) != order.t:
        raise LatticeError(f"Lattice shape has {len(shape)} entries, the order has {order.t} blocks")
    for ideal in shape:
        if ideal.backend != order.backend:
            raise BackendMismatchError(f"Lattice entry {format_ideal(ideal)} is not a {order.backend.value} ideal")


def is_lattice_shape(order: GraduatedOrder, shape: Sequence[FracIdeal]) -> bool:
    """True iff I_ij m_j ⊆ m_i for all i, j (a left lattice L(m))."""
    _check_shape_length(order, shape)
    return all(
        contains(shape[i], product(order.ideals[i][j], shape[j]))
        for i in range(order.t) for j in range(order.t)
    )


def is_right_lattice_shape(order: GraduatedOrder, shape: Sequence[FracIdeal]) -> bool:
    """True iff m_i I_ij ⊆ m_j for all i, j (a right lattice)."""
    _check_shape_length(order, shape)
    return all(
        contains(shape[j], product(shape[i], order.ideals[i][j]))
        for i in range(order.t) for j in range(order.t)
    )


def projective_indecomposables(order: GraduatedOrder) -> Dict[str, List[LatticeShape]]:
    """
    The indecomposable projective lattices: the columns of I (left) and its rows (right).
    """
    t = order.t
    columns = [tuple(order.ideals[i][j] for i in range(t)) for j in range(t)]
    rows = [tuple(order.ideals[i]) for i in range(t)]
    return {"left": columns, "right": rows}


def lattices_isomorphic(order: GraduatedOrder, shape: Sequence[FracIdeal],
                        other: Sequence[FracIdeal]) -> Tuple[bool, Optional[FracIdeal]]:
    """
    Decide whether L(m) ≅ L(m'), i.e. m = (α) m' for one principal ideal (α).

    Args:
        order: The order
        shape: The shape m
        other: The shape m'

    Returns:
        (True, (α)) when isomorphic, otherwise (False, None)
    """
    for s in (shape, other):
        if not is_lattice_shape(order, s):
            raise LatticeError(f"({', '.join(format_ideal(i) for i in s)}) is not a lattice shape of the order")

    witness = None
    for mine, theirs in zip(shape, other):
        if order.backend == IdealBackend.dvr:
            shift = dvr_ideal(mine.exponent - theirs.exponent)
        else:
            if len(mine.generators) != len(theirs.generators):
                return False, None
            (a, b), (c, d) = mine.generators[0], theirs.generators[0]
            shift = monomial_ideal([(a - c, b - d)])
        if product(shift, theirs) != mine:
            return False, None
        if witness is None:
            witness = shift
        elif shift != witness:
            return False, None
    return True, witness


def fractional_ideal_violation(order: GraduatedOrder, J: IdealMatrix) -> Optional[Tuple[str, int, int, int]]:
    """
    Find the first triple breaking two-sidedness of J.

    Returns:
        ("left", i, j, k) when I_ij J_jk ⊄ J_ik, ("right", i, j, k) when J_ij I_jk ⊄ J_ik, or None
    """
    t = order.t
    if len(J) != t or any(len(row) != t for row in J):
        raise ShapeMismatchError(f"Ideal matrix must be {t} x {t}")
    I = order.ideals
    for i in range(t):
        for j in range(t):
            for k in range(t):
                if not contains(J[i][k], product(I[i][j], J[j][k])):
                    return ("left", i, j, k)
                if not contains(J[i][k], product(J[i][j], I[j][k])):
                    return ("right", i, j, k)
    return None


def is_fractional_ideal_matrix(order: GraduatedOrder, J: IdealMatrix) -> bool:
    violation = fractional_ideal_violation(order, J)
    if violation is not None:
        logger.debug("Not a two-sided ideal, %s triple %s", violation[0], violation[1:])
    return violation is None


# ============================================================================
# Inverse different and conductor
# ============================================================================

def inverse_different(order: GraduatedOrder) -> IdealMatrix:
    """
    Entry (i, j) of the inverse different is dΩ * I_ji^{-1}.

    Raises:
        NonInvertibleIdealError: Naming the first entry I_ji that is not invertible
    """
    return scale_matrix(order.d_omega, transpose_inverse(order.ideals))


def trace_dual_oracle(order: GraduatedOrder, exponent_bound: Optional[int] = None) -> IdealMatrix:
    """
    Compute the trace dual of a dvr-backend order by exhaustive search.

    For each position (i, j) the dual entry is m^a for the least a in
    [-bound, bound] such that tr(E_ij π^a · E_kl π^{e_kl}) lies in dΩ for every
    block position (k, l).

    Args:
        order: A dvr-backend order
        exponent_bound: Search bound; defaults to the configured trace bound

    Returns:
        The dual ideal matrix

    Raises:
        OracleError: If the backend is not dvr or the bound is too small
    """
    if order.backend != IdealBackend.dvr:
        raise OracleError("The trace-dual oracle only handles the dvr backend")
    bound = get_settings().trace_bound if exponent_bound is None else exponent_bound
    t = order.t
    d = order.d_omega.exponent
    exponents = [[entry.exponent for entry in row] for row in order.ideals]

    units = {(i, j): sympy.Matrix(t, t, lambda r, c: int((r, c) == (i, j))) for i in range(t) for j in range(t)}
    unit_traces = {(x, y): (units[x] * units[y]).trace() for x in units for y in units}

    def trace_exponent(i, j, a, k, l) -> Optional[int]:
        # matrix-unit traces are 0 or 1
        if unit_traces[(i, j), (k, l)] == 0:
            return None
        return a + exponents[k][l]

    result = []
    for i in range(t):
        row = []
        for j in range(t):
            found = None
            for a in range(-bound, bound + 1):
                traces = (trace_exponent(i, j, a, k, l) for k in range(t) for l in range(t))
                if all(value is None or value >= d for value in traces):
                    found = a
                    break
            if found is None or found == -bound:
                raise OracleError(f"Exponent bound {bound} too small at position ({i},{j})")
            row.append(dvr_ideal(found))
        result.append(tuple(row))
    return tuple(result)


def conductor_into_selfdual(order: GraduatedOrder) -> IdealMatrix:
    """
    The conductor (Γ:Λ) of the order Γ into any self-dual suborder Λ.

    It does not depend on Λ and equals the inverse different of Γ.
    """
    conductor = inverse_different(order)
    logger.info("Conductor into self-dual suborders of a %d-block order computed", order.t)
    return conductor


def conductor_of_direct_sum(orders: Sequence[GraduatedOrder]) -> List[IdealMatrix]:
    """The conductor of a direct product of orders, one component per factor."""
    return [conductor_into_selfdual(order) for order in orders]


# ============================================================================
# Refinement, intersection and membership
# ============================================================================

def _boundaries(blocks: Sequence[int]) -> List[int]:
    points, total = [0], 0
    for size in blocks:
        total += size
        points.append(total)
    return points


def common_refinement(b1: Sequence[int], b2: Sequence[int]) -> Tuple[int, ...]:
    """The join of two block subdivisions of the same total size."""
    if sum(b1) != sum(b2):
        raise ShapeMismatchError(f"Block sizes {list(b1)} and {list(b2)} have different totals")
    points = sorted(set(_boundaries(b1)) | set(_boundaries(b2)))
    return tuple(points[i + 1] - points[i] for i in range(len(points) - 1))


def _parents(coarse: Sequence[int], fine: Sequence[int]) -> List[int]:
    coarse_points = _boundaries(coarse)
    fine_points = _boundaries(fine)
    if not set(coarse_points) <= set(fine_points):
        raise ShapeMismatchError(f"Blocks {list(fine)} do not refine {list(coarse)}")
    parents = []
    for start in fine_points[:-1]:
        # Largest coarse boundary at or before the fine block start
        parent = max(index for index, point in enumerate(coarse_points[:-1]) if point <= start)
        parents.append(parent)
    return parents


def refine_matrix(blocks: Sequence[int], ideals: IdealMatrix, fine: Sequence[int]) -> IdealMatrix:
    parents = _parents(blocks, fine)
    return tuple(tuple(ideals[pu][pv] for pv in parents) for pu in parents)


def refine(order: GraduatedOrder, fine: Sequence[int]) -> GraduatedOrder:
    """The same order written in a finer block frame (not in standard form if a block splits)."""
    return make_order(fine, refine_matrix(order.blocks, order.ideals, fine), order.d_omega)


def _merge_adjacent(blocks: List[int], ideals: List[List[FracIdeal]], u: int) -> None:
    if ideals[u][u + 1] != ideals[u][u] or ideals[u + 1][u] != ideals[u][u]:
        raise StandardFormError(f"Cannot merge blocks {u} and {u + 1}: the connecting ideals are not the unit ideal")
    blocks[u] += blocks.pop(u + 1)
    ideals.pop(u + 1)
    for row in ideals:
        row.pop(u + 1)


def intersect_orders(o1: GraduatedOrder, o2: GraduatedOrder) -> GraduatedOrder:
    """
    Intersect two standard-form orders of the same total size.

    Both are refined to the join of their block subdivisions and intersected
    entrywise; adjacent blocks failing properness are merged left to right.
    """
    if o1.total != o2.total:
        raise ShapeMismatchError(f"Orders of total size {o1.total} and {o2.total} cannot be intersected")
    if o1.backend != o2.backend:
        raise BackendMismatchError(f"Cannot intersect a {o1.backend.value} order with a {o2.backend.value} order")
    if o1.d_omega != o2.d_omega:
        raise StandardFormError("Orders over different coefficient rings cannot be intersected")

    fine = common_refinement(o1.blocks, o2.blocks)
    meet = matrix_intersect(refine_matrix(o1.blocks, o1.ideals, fine), refine_matrix(o2.blocks, o2.ideals, fine))
    blocks = list(fine)
    ideals = [list(row) for row in meet]

    while True:
        report = check_standard_form(as_matrix(ideals))
        if report.valid:
            break
        if report.condition != "iii":
            raise StandardFormError(f"Intersection is not an order: {report.message}")
        u, v = report.indices
        if v != u + 1:
            raise StandardFormError(f"Blocks {u} and {v} fail properness but are not adjacent")
        logger.debug("Merging blocks %d and %d after refinement", u, v)
        _merge_adjacent(blocks, ideals, u)

    return make_order(blocks, ideals, o1.d_omega)


def block_index(blocks: Sequence[int]) -> List[int]:
    """The block of every row/column index."""
    index = []
    for block, size in enumerate(blocks):
        index.extend([block] * size)
    return index


def contains_matrix(order: GraduatedOrder, x: Sequence[Sequence[Optional[RingExponent]]]) -> bool:
    """
    Membership of an explicit n x n matrix of monomials in the order.

    Args:
        order: The order
        x: Entries are ring exponents (int for dvr, (a, b) for monomials) or None for zero

    Returns:
        True if every nonzero entry lies in its block's ideal
    """
    n = order.total
    if len(x) != n or any(len(row) != n for row in x):
        raise ShapeMismatchError(f"Matrix must be {n} x {n}")
    index = block_index(order.blocks)
    return all(
        entry is None or element_in(order.ideals[index[r]][index[c]], entry)
        for r, row in enumerate(x) for c, entry in enumerate(row)
    )


# ============================================================================
# Radical covers, extremality and hulls
# ============================================================================

def radically_covers(g: GraduatedOrder, l: GraduatedOrder) -> bool:
    """True iff g ⊇ l and Jac(g) ⊇ Jac(l), compared in the common refinement."""
    if g.total != l.total:
        raise ShapeMismatchError(f"Orders of total size {g.total} and {l.total} cannot be compared")
    if g.backend != l.backend:
        raise BackendMismatchError(f"Cannot compare a {g.backend.value} order with a {l.backend.value} order")
    fine = common_refinement(g.blocks, l.blocks)
    if not matrix_contains(refine_matrix(g.blocks, g.ideals, fine), refine_matrix(l.blocks, l.ideals, fine)):
        return False
    return matrix_contains(
        refine_matrix(g.blocks, jacobson_radical(g), fine),
        refine_matrix(l.blocks, jacobson_radical(l), fine),
    )


def staircase_permutation(order: GraduatedOrder) -> Optional[List[int]]:
    """
    Ranks putting the order into literal staircase shape, or None when it is not a staircase.
    """
    t = order.t
    one, m = unit_ideal(order.backend), maximal_ideal(order.backend)
    for i in range(t):
        for j in range(t):
            if i != j and order.ideals[i][j] not in (one, m):
                return None
    # In a staircase the rank of a block is the number of Ω entries off the diagonal of its row
    ranks = [sum(1 for j in range(t) if j != i and order.ideals[i][j] == one) for i in range(t)]
    if sorted(ranks) != list(range(t)):
        return None
    if staircase_order(order.blocks, order.backend, ranks, order.d_omega).ideals != order.ideals:
        return None
    return ranks


def staircase_conjugation(order: GraduatedOrder) -> Optional[Tuple[List[int], List[FracIdeal]]]:
    """
    Write the order as a diagonal conjugate of a staircase.

    Finds ranks and principal ideals (c_i) with I_ij = c_i S_ij c_j^{-1}, where S is
    the staircase with those ranks. The block of top rank has S_top,j = Ω in its row,
    so taking c_top = Ω forces c_j = I_top,j^{-1}; each block is tried as the top one.

    Returns:
        (ranks, factors), or None when no diagonal conjugate of a staircase equals the order
    """
    t = order.t
    one = unit_ideal(order.backend)
    ranks = staircase_permutation(order)
    if ranks is not None:
        return ranks, [one] * t

    m = maximal_ideal(order.backend)
    for top in range(t):
        row = order.ideals[top]
        if not all(is_invertible(entry) for entry in row):
            continue
        shape = [
            [product(product(row[i], order.ideals[i][j]), inverse(row[j])) for j in range(t)]
            for i in range(t)
        ]
        if any(shape[i][j] not in ((one,) if i == j else (one, m)) for i in range(t) for j in range(t)):
            continue
        # S_ji = m exactly when block j sits below block i
        ranks = [sum(1 for j in range(t) if shape[j][i] == m) for i in range(t)]
        if sorted(ranks) != list(range(t)):
            continue
        if staircase_order(order.blocks, order.backend, ranks, order.d_omega).ideals != as_matrix(shape):
            continue
        return ranks, [inverse(entry) for entry in row]
    return None


def is_extremal(order: GraduatedOrder) -> bool:
    """True iff the order is a staircase up to block permutation and diagonal conjugation."""
    return staircase_conjugation(order) is not None


def graduated_hull(order: GraduatedOrder) -> GraduatedOrder:
    """
    Intersect every staircase (same block frame) that radically covers the order.

    Extremal inputs, conjugated staircases included, are their own hull.

    Raises:
        HullError: If there are too many blocks or no staircase covers the order
    """
    max_blocks = get_settings().hull_max_blocks
    if order.t > max_blocks:
        raise HullError(f"Hull enumeration is limited to {max_blocks} blocks (got {order.t})")
    if is_extremal(order):
        return order

    covers = []
    for ranks in permutations(range(order.t)):
        candidate = staircase_order(order.blocks, order.backend, ranks, order.d_omega)
        if radically_covers(candidate, order):
            covers.append(candidate)
    logger.debug("%d of %d staircases cover the order", len(covers), math.factorial(order.t))
    if not covers:
        raise HullError("No staircase order in this frame radically covers the input")

    hull = covers[0].ideals
    for cover in covers[1:]:
        hull = matrix_intersect(hull, cover.ideals)
    return build_order(order.blocks, hull, order.d_omega)


def hereditary_obstruction(order: GraduatedOrder) -> Tuple[bool, str]:
    """
    Decide whether the order cannot be hereditary.

    A hereditary order is extremal, and an extremal order is hereditary iff its
    radical is invertible, which happens iff m_Ω is principal.

    Returns:
        (obstructed, reason)
    """
    if not is_extremal(order):
        return True, "not extremal"
    m = maximal_ideal(order.backend)
    if not is_invertible(m):
        return True, f"the radical has the non-principal diagonal entry {format_ideal(m)}"
    return False, "extremal with invertible radical"


# ============================================================================
# Principalization, determinants and the conjugate-intersection identity
# ============================================================================

def _principal_choice(ideal: FracIdeal) -> RingExponent:
    elements = generator_elements(ideal)
    if ideal.backend == IdealBackend.dvr:
        return elements[0]
    return min(elements, key=lambda g: (g[0] + g[1], g[0]))


def principalize(order: GraduatedOrder) -> GraduatedOrder:
    """
    Replace every off-diagonal entry by (x) for one monomial x in m ∩ (∩ I_ij).

    The result is a standard form contained in the order whose ideals are all principal.
    """
    entries = [entry for row in order.ideals for entry in row]
    common = intersect(ideal_intersection_all(entries), maximal_ideal(order.backend))
    x = principal_ideal(order.backend, _principal_choice(common))
    one = unit_ideal(order.backend)
    t = order.t
    ideals = [[one if i == j else x for j in range(t)] for i in range(t)]
    return build_order(order.blocks, ideals, order.d_omega)


def _term_exponent(term, backend: IdealBackend) -> RingExponent:
    coefficient, monomial = term.as_coeff_Mul()
    powers = monomial.as_powers_dict() if monomial != 1 else {}
    unknown = set(powers) - {P_SYMBOL, T_SYMBOL}
    if unknown:
        raise EpacError(f"Unknown symbols {sorted(str(s) for s in unknown)} in term {term}")
    a, b = powers.get(P_SYMBOL, 0), powers.get(T_SYMBOL, 0)
    if not (sympy.sympify(a).is_integer and sympy.sympify(b).is_integer):
        raise EpacError(f"Term {term} is not a monomial")
    if backend == IdealBackend.dvr:
        if b != 0:
            raise EpacError(f"Term {term} uses T in the dvr backend")
        return int(a)
    return (int(a), int(b))


def _entry_in_ideal(entry, ideal: FracIdeal) -> bool:
    expanded = sympy.expand(entry)
    if expanded == 0:
        return True
    return all(element_in(ideal, _term_exponent(term, ideal.backend)) for term in sympy.Add.make_args(expanded))


def epac_witness(order: GraduatedOrder, a) -> Tuple[sympy.Matrix, sympy.Expr]:
    """
    Build the diagonal witness diag(det a, 1, ..., 1) for a matrix a in the order.

    Args:
        order: The order
        a: An n x n matrix (sympy Matrix or nested lists of expressions/strings in p and T)

    Returns:
        (witness matrix, determinant)

    Raises:
        EpacError: If a is singular, not in the order, or has a non-integral determinant
    """
    matrix = sympy.Matrix(a).applyfunc(lambda value: sympy.sympify(value, locals={'p': P_SYMBOL, 'T': T_SYMBOL}))
    n = order.total
    if matrix.shape != (n, n):
        raise EpacError(f"Matrix must be {n} x {n} (got {matrix.shape[0]} x {matrix.shape[1]})")

    index = block_index(order.blocks)
    for r in range(n):
        for c in range(n):
            if not _entry_in_ideal(matrix[r, c], order.ideals[index[r]][index[c]]):
                raise EpacError(f"Entry ({r},{c}) = {matrix[r, c]} does not lie in the order")

    det = sympy.expand(matrix.det())
    if det == 0:
        raise EpacError("Matrix is singular")
    one = unit_ideal(order.backend)
    if not _entry_in_ideal(det, one):
        raise EpacError(f"Determinant {det} is not integral")

    witness = sympy.eye(n)
    witness[0, 0] = det
    return witness, det


def conjugate_intersection_identity(d: FracIdeal) -> Tuple[IdealMatrix, IdealMatrix]:
    """
    Both sides of [[Ω,(d)],[Ω,Ω]] = [[Ω,(d)],[(d^-1),Ω]] ∩ M_2(Ω) for an integral principal d.
    """
    if not is_invertible(d):
        raise NonInvertibleIdealError(f"{format_ideal(d)} is not principal")
    one = unit_ideal(d.backend)
    left = ((one, d), (one, one))
    conjugate = ((one, d), (inverse(d), one))
    return left, matrix_intersect(conjugate, ((one, one), (one, one)))
