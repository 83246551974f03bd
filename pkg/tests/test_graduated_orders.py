import itertools

import pytest
import sympy

from gradord.core.config import get_settings
from gradord.core.exceptions import (
    EpacError,
    HullError,
    LatticeError,
    NonInvertibleIdealError,
    ShapeMismatchError,
    StandardFormError,
)
from gradord.core.graduated_orders import (
    P_SYMBOL,
    T_SYMBOL,
    GraduatedOrder,
    as_matrix,
    build_order,
    check_standard_form,
    conductor_into_selfdual,
    conductor_of_direct_sum,
    conjugate_intersection_identity,
    contains_matrix,
    epac_witness,
    fractional_ideal_violation,
    graduated_hull,
    hereditary_obstruction,
    intersect_orders,
    inverse_different,
    is_extremal,
    is_fractional_ideal_matrix,
    is_lattice_shape,
    is_right_lattice_shape,
    jacobson_radical,
    matrix_product,
    lattices_isomorphic,
    matrix_contains,
    maximal_order,
    orders_equal,
    principalize,
    projective_indecomposables,
    radical_quotient,
    radically_covers,
    refine,
    staircase_conjugation,
    staircase_order,
    staircase_permutation,
    trace_dual_oracle,
    transpose_inverse,
    validate_standard_form,
)
from gradord.core.ideal_arith import (
    IdealBackend,
    dvr_ideal,
    maximal_ideal,
    monomial_ideal,
    parse_ideal,
)
from gradord.core.schemas import ViolationReport

DVR = IdealBackend.dvr
MONOMIAL = IdealBackend.monomial


def create_example_matrix(rows, backend=DVR):
    """Ideal matrix from rows of ideal strings"""
    return as_matrix([[parse_ideal(text, backend) for text in row] for row in rows])


def create_example_order(rows, blocks=None, backend=DVR, d_omega="1"):
    """Validated order from rows of ideal strings"""
    blocks = blocks or [1] * len(rows)
    return build_order(blocks, create_example_matrix(rows, backend), parse_ideal(d_omega, backend))


def create_example_shape(entries, backend=DVR):
    return tuple(parse_ideal(text, backend) for text in entries)


# ============================================================================
# Standard form
# ============================================================================

def test_staircase_is_standard_form():
    """Test the basic two-block staircase"""
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert isinstance(order, GraduatedOrder)
    assert order.t == 2
    assert order.total == 2
    assert order.backend == DVR
    assert orders_equal(order, staircase_order((1, 1), DVR))


def test_trivial_subdivision_violates_properness():
    """Test that M_2(Ω) split into two blocks is rejected"""
    report = check_standard_form(create_example_matrix([["1", "1"], ["1", "1"]]))
    assert not report.valid
    assert report.condition == "iii"
    assert report.indices == [0, 1]


def test_multiplicativity_checked_first():
    """Test that condition (i) is reported with its triple"""
    report = check_standard_form(create_example_matrix([["1", "m"], ["m^-2", "1"]]))
    assert not report.valid
    assert report.condition == "i"
    assert report.indices == [0, 1, 0]


def test_diagonal_condition():
    """Test that a non-unit diagonal entry is rejected"""
    report = check_standard_form(create_example_matrix([["m", "m"], ["1", "1"]]))
    assert report.condition == "ii"
    assert report.indices == [0]


def test_validate_returns_report_and_build_raises():
    """Test the two entry points for validation"""
    ideals = create_example_matrix([["1", "1"], ["1", "1"]])
    assert isinstance(validate_standard_form([1, 1], ideals), ViolationReport)
    with pytest.raises(StandardFormError):
        build_order([1, 1], ideals)


def test_shape_errors():
    """Test block and matrix shape checks"""
    ideals = create_example_matrix([["1", "m"], ["1", "1"]])
    with pytest.raises(ShapeMismatchError):
        build_order([1, 1, 1], ideals)
    with pytest.raises(ShapeMismatchError):
        build_order([0, 1], ideals)


def test_orders_equal_uses_frame():
    """Test that the same ring in different frames is not equal"""
    assert not orders_equal(maximal_order((2,), DVR), staircase_order((1, 1), DVR))
    assert orders_equal(staircase_order((2, 1), DVR), create_example_order([["1", "m"], ["1", "1"]], blocks=[2, 1]))


# ============================================================================
# Radical
# ============================================================================

def test_jacobson_radical_of_staircase():
    """Test the radical substitution"""
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert jacobson_radical(order) == create_example_matrix([["m", "m"], ["1", "m"]])


def test_jacobson_radical_of_maximal_block():
    assert jacobson_radical(maximal_order((2,), DVR)) == create_example_matrix([["m"]])


def test_jacobson_radical_monomial():
    """Test the radical over the two-dimensional ring"""
    order = create_example_order([["1", "p*T"], ["1", "1"]], backend=MONOMIAL)
    assert jacobson_radical(order) == create_example_matrix([["(p, T)", "p*T"], ["1", "(p, T)"]], MONOMIAL)


def test_radical_is_two_sided():
    for order in (staircase_order((1, 2, 1), DVR), staircase_order((1, 1), MONOMIAL, ranks=[1, 0])):
        assert is_fractional_ideal_matrix(order, jacobson_radical(order))


def test_radical_quotient_blocks():
    """Test the semisimple quotient description"""
    assert radical_quotient(staircase_order((1, 1), DVR)) == [(1, "M_1(Omega/m)"), (1, "M_1(Omega/m)")]
    assert [size for size, _ in radical_quotient(staircase_order((2, 3), DVR))] == [2, 3]
    assert len(radical_quotient(staircase_order((1, 1, 1), MONOMIAL))) == 3


# ============================================================================
# Lattices
# ============================================================================

def test_lattice_shapes():
    """Test left lattice shapes of the staircase"""
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert is_lattice_shape(order, create_example_shape(["m", "1"]))
    assert not is_lattice_shape(order, create_example_shape(["1", "m"]))


def test_projective_indecomposables_are_lattices():
    """Test that columns are left lattices and rows are right lattices"""
    for order in (staircase_order((1, 1, 1), DVR), staircase_order((1, 2), MONOMIAL),
                  create_example_order([["1", "m^2"], ["1", "1"]])):
        projectives = projective_indecomposables(order)
        assert all(is_lattice_shape(order, column) for column in projectives["left"])
        assert all(is_right_lattice_shape(order, row) for row in projectives["right"])


def test_lattice_shape_length_checked():
    with pytest.raises(LatticeError):
        is_lattice_shape(staircase_order((1, 1), DVR), create_example_shape(["1"]))


def test_lattices_isomorphic_uniform_shift():
    """Test isomorphism by a uniform shift"""
    order = staircase_order((1, 1), DVR, ranks=[1, 0])
    isomorphic, shift = lattices_isomorphic(order, create_example_shape(["m^2", "m^3"]),
                                            create_example_shape(["1", "m"]))
    assert isomorphic
    assert shift == dvr_ideal(2)


def test_lattices_not_isomorphic():
    order = staircase_order((1, 1), DVR, ranks=[1, 0])
    assert lattices_isomorphic(order, create_example_shape(["m^2", "m^2"]),
                               create_example_shape(["1", "m"])) == (False, None)


def test_lattices_isomorphic_monomial():
    """Test isomorphism by a monomial shift"""
    order = staircase_order((1, 1), MONOMIAL, ranks=[1, 0])
    shape = (monomial_ideal([(1, 1)]), monomial_ideal([(2, 1), (1, 2)]))
    other = (parse_ideal("1", MONOMIAL), maximal_ideal(MONOMIAL))
    assert lattices_isomorphic(order, shape, other) == (True, monomial_ideal([(1, 1)]))


def test_lattices_isomorphic_rejects_non_lattices():
    order = create_example_order([["1", "m"], ["1", "1"]])
    with pytest.raises(LatticeError):
        lattices_isomorphic(order, create_example_shape(["1", "m"]), create_example_shape(["m", "1"]))


# ============================================================================
# Fractional ideals, inverse different and conductor
# ============================================================================

def test_fractional_ideal_matrices():
    """Test two-sidedness of ideal matrices"""
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert is_fractional_ideal_matrix(order, order.ideals)
    J = create_example_matrix([["m^-1", "m"], ["1", "1"]])
    assert not is_fractional_ideal_matrix(order, J)
    assert fractional_ideal_violation(order, J) == ("right", 0, 0, 1)


def test_inverse_different_dvr():
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert inverse_different(order) == create_example_matrix([["1", "1"], ["m^-1", "1"]])


def test_inverse_different_monomial():
    """Test the inverse different over the two-dimensional ring"""
    order = create_example_order([["1", "p*T"], ["1", "1"]], backend=MONOMIAL)
    assert inverse_different(order) == create_example_matrix([["1", "1"], ["p^-1*T^-1", "1"]], MONOMIAL)


def test_inverse_different_single_block():
    order = create_example_order([["1"]], blocks=[3], d_omega="m^-2")
    assert inverse_different(order) == create_example_matrix([["m^-2"]])


def test_inverse_different_needs_invertible_entries():
    """Test that a non-principal entry is named"""
    order = staircase_order((1, 1), MONOMIAL)
    with pytest.raises(NonInvertibleIdealError) as error:
        inverse_different(order)
    assert error.value.position == (0, 1)


def test_trace_dual_matches_formula():
    """Test the trace-dual oracle on small examples"""
    staircase = create_example_order([["1", "m"], ["1", "1"]])
    assert trace_dual_oracle(staircase) == create_example_matrix([["1", "1"], ["m^-1", "1"]])
    maximal = maximal_order((3,), DVR, d_omega=dvr_ideal(-1))
    assert trace_dual_oracle(maximal) == create_example_matrix([["m^-1"]])


def test_conductor_equals_inverse_different():
    orders = [create_example_order([["1", "m"], ["1", "1"]]), create_example_order([["1"]], d_omega="m^-1")]
    assert conductor_into_selfdual(orders[0]) == inverse_different(orders[0])
    assert conductor_of_direct_sum(orders) == [inverse_different(order) for order in orders]


def test_transpose_inverse_is_involution():
    """Test that taking the dual twice returns the ideals"""
    order = create_example_order([["1", "m", "m^2"], ["1", "1", "m"], ["m^-1", "1", "1"]])
    assert transpose_inverse(transpose_inverse(order.ideals)) == order.ideals


# ============================================================================
# Intersection and membership
# ============================================================================

def test_intersect_same_frame():
    """Test entrywise intersection"""
    o1 = create_example_order([["1", "m"], ["1", "1"]])
    o2 = create_example_order([["1", "1"], ["m", "1"]])
    meet = intersect_orders(o1, o2)
    assert meet.ideals == create_example_matrix([["1", "m"], ["m", "1"]])
    assert orders_equal(intersect_orders(o1, o1), o1)


def test_intersect_refines_frames():
    """Test intersection of orders written in different frames"""
    meet = intersect_orders(maximal_order((2,), DVR), staircase_order((1, 1), DVR))
    assert orders_equal(meet, staircase_order((1, 1), DVR))
    meet = intersect_orders(staircase_order((1, 2), DVR), staircase_order((2, 1), DVR))
    assert orders_equal(meet, staircase_order((1, 1, 1), DVR))


def test_refine():
    """Test that splitting a block repeats its row and column"""
    order = create_example_order([["1", "m"], ["1", "1"]], blocks=[2, 1])
    fine = refine(order, [1, 1, 1])
    assert fine.blocks == (1, 1, 1)
    assert fine.ideals == create_example_matrix([["1", "1", "m"], ["1", "1", "m"], ["1", "1", "1"]])


def test_matrix_product():
    order = create_example_order([["1", "m"], ["1", "1"]])
    assert matrix_product(order.ideals, order.ideals) == order.ideals
    radical = jacobson_radical(order)
    assert matrix_product(radical, radical) == create_example_matrix([["m", "m^2"], ["m", "m"]])


def test_intersect_rejects_mismatched_sizes():
    with pytest.raises(ShapeMismatchError):
        intersect_orders(maximal_order((2,), DVR), maximal_order((3,), DVR))


def test_contains_matrix():
    """Test membership of explicit matrices"""
    order = staircase_order((1, 1), DVR)
    assert contains_matrix(order, [[0, 1], [0, 0]])
    assert contains_matrix(order, [[5, None], [0, None]])
    assert not contains_matrix(order, [[0, 0], [None, 0]])
    with pytest.raises(ShapeMismatchError):
        contains_matrix(order, [[0]])


# ============================================================================
# Radical covers, extremality and hulls
# ============================================================================

def test_radically_covers():
    """Test radical covering between small orders"""
    staircase = create_example_order([["1", "m"], ["1", "1"]])
    squared = create_example_order([["1", "m^2"], ["1", "1"]])
    assert radically_covers(staircase, staircase)
    assert radically_covers(staircase, squared)
    assert not radically_covers(squared, staircase)
    # Jac(M_2(Ω)) = m E misses the Ω entry of the staircase radical
    assert not radically_covers(maximal_order((2,), DVR), staircase)


def test_is_extremal():
    assert is_extremal(create_example_order([["1", "m"], ["1", "1"]]))
    assert not is_extremal(create_example_order([["1", "m^2"], ["1", "1"]]))
    assert is_extremal(maximal_order((2,), DVR))
    assert staircase_permutation(staircase_order((1, 1, 1), DVR, ranks=[2, 0, 1])) == [2, 0, 1]


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_staircase_permutation_recovers_ranks(t):
    for ranks in itertools.permutations(range(t)):
        order = staircase_order((1,) * t, DVR, ranks=ranks)
        assert staircase_permutation(order) == list(ranks)
        assert is_extremal(order)


def create_example_conjugate(ranks, shifts):
    """diag(m^c) S diag(m^-c) for the dvr staircase S with the given ranks"""
    t = len(ranks)
    ideals = [[dvr_ideal(int(ranks[i] < ranks[j]) + shifts[i] - shifts[j]) for j in range(t)] for i in range(t)]
    return build_order([1] * t, ideals, dvr_ideal(0))


def test_conjugated_staircase_is_extremal():
    """Test diag(1, m^2) S diag(1, m^-2) for S with ranks [1, 0]"""
    order = create_example_order([["1", "m^2"], ["m^-1", "1"]])
    assert staircase_permutation(order) is None
    ranks, factors = staircase_conjugation(order)
    assert ranks == [1, 0]
    assert factors == [dvr_ideal(0), dvr_ideal(-2)]
    assert is_extremal(order)
    assert hereditary_obstruction(order) == (False, "extremal with invertible radical")
    assert graduated_hull(order) is order


@pytest.mark.parametrize("t", [2, 3])
def test_conjugated_staircases(t):
    """Test every staircase conjugated by shifts in [-2, 2]"""
    for ranks in itertools.permutations(range(t)):
        for shifts in itertools.product(range(-2, 3), repeat=t - 1):
            order = create_example_conjugate(ranks, (0,) + shifts)
            assert is_extremal(order)
            assert not hereditary_obstruction(order)[0]
            assert orders_equal(graduated_hull(order), order)


def test_graduated_hull():
    """Test hulls of small orders"""
    staircase = create_example_order([["1", "m"], ["1", "1"]])
    assert orders_equal(graduated_hull(staircase), staircase)
    assert orders_equal(graduated_hull(create_example_order([["1", "m^2"], ["1", "1"]])), staircase)
    diagonal = create_example_order([["1", "m"], ["m", "1"]])
    assert orders_equal(graduated_hull(diagonal), diagonal)


def test_graduated_hull_errors():
    """Test the hull limits"""
    # no staircase of the frame holds the m^-1 entry
    non_extremal = create_example_order([["1", "m^-1"], ["m^3", "1"]])
    assert not is_extremal(non_extremal)
    with pytest.raises(HullError):
        graduated_hull(non_extremal)
    t = get_settings().hull_max_blocks + 1
    with pytest.raises(HullError):
        graduated_hull(staircase_order((1,) * t, DVR))


def _enumerate_valid_orders(t, exponents):
    """Every valid dvr standard form with off-diagonal exponents from the given set."""
    positions = [(i, j) for i in range(t) for j in range(t) if i != j]
    orders = []
    for values in itertools.product(exponents, repeat=len(positions)):
        ideals = [[dvr_ideal(0)] * t for _ in range(t)]
        for (i, j), k in zip(positions, values):
            ideals[i][j] = dvr_ideal(k)
        result = validate_standard_form([1] * t, ideals)
        if isinstance(result, GraduatedOrder):
            orders.append(result)
    return orders


@pytest.mark.parametrize("t", [2, 3])
def test_extremal_means_not_properly_covered(t):
    """Test extremality against exhaustive radical covering"""
    orders = _enumerate_valid_orders(t, [-1, 0, 1])
    assert orders
    for order in orders:
        covered = any(radically_covers(g, order) and not orders_equal(g, order) for g in orders)
        assert is_extremal(order) == (not covered)
        assert radically_covers(graduated_hull(order), order)


# ============================================================================
# Hereditary obstruction, principalization and determinants
# ============================================================================

@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_hereditary_obstruction_staircases(t):
    """Test that dvr staircases are hereditary and monomial ones never are"""
    assert hereditary_obstruction(staircase_order((1,) * t, DVR))[0] is False
    obstructed, reason = hereditary_obstruction(staircase_order((1,) * t, MONOMIAL))
    assert obstructed
    assert "non-principal" in reason


def test_hereditary_obstruction_non_extremal():
    assert hereditary_obstruction(create_example_order([["1", "m^2"], ["1", "1"]])) == (True, "not extremal")
    assert hereditary_obstruction(create_example_order([["1", "p*T"], ["p*T", "1"]], backend=MONOMIAL))[0]


def test_principalize_staircase():
    """Test principalization of the monomial staircase"""
    order = staircase_order((1, 1), MONOMIAL)
    principal = principalize(order)
    T = monomial_ideal([(0, 1)])
    assert principal.ideals[0][1] == T
    assert principal.ideals[1][0] == T
    assert matrix_contains(order.ideals, principal.ideals)


def test_epac_witness_identity():
    witness, det = epac_witness(maximal_order((3,), MONOMIAL), sympy.eye(3))
    assert witness == sympy.eye(3)
    assert det == 1


def test_epac_witness_diagonal():
    """Test the witness for a diagonal matrix"""
    witness, det = epac_witness(maximal_order((2,), MONOMIAL), [["p", 0], [0, "T"]])
    assert det == P_SYMBOL * T_SYMBOL
    assert witness == sympy.Matrix([[P_SYMBOL * T_SYMBOL, 0], [0, 1]])


def test_epac_witness_staircase():
    order = staircase_order((1, 1), MONOMIAL)
    _, det = epac_witness(order, [["1 + p", "T"], ["p**2", 1]])
    assert sympy.expand(det - (1 + P_SYMBOL - P_SYMBOL ** 2 * T_SYMBOL)) == 0


def test_epac_witness_errors():
    """Test singular and non-member matrices"""
    with pytest.raises(EpacError):
        epac_witness(maximal_order((2,), MONOMIAL), [["p", "p"], ["T", "T"]])
    with pytest.raises(EpacError):
        epac_witness(staircase_order((1, 1), MONOMIAL), [[1, 1], [0, 1]])
    with pytest.raises(EpacError):
        epac_witness(maximal_order((2,), MONOMIAL), [[1, 0], [0, 1], [0, 0]])


@pytest.mark.parametrize("generator", [(1, 0), (0, 1), (1, 1), (2, 3)])
def test_conjugate_intersection_identity(generator):
    left, right = conjugate_intersection_identity(monomial_ideal([generator]))
    assert left == right


def test_conjugate_intersection_identity_needs_principal():
    assert conjugate_intersection_identity(dvr_ideal(2))[0] == conjugate_intersection_identity(dvr_ideal(2))[1]
    with pytest.raises(NonInvertibleIdealError):
        conjugate_intersection_identity(maximal_ideal(MONOMIAL))
