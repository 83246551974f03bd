import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradord.core.exceptions import BackendMismatchError, IdealParseError, NonInvertibleIdealError
from gradord.core.ideal_arith import (
    FracIdeal,
    IdealBackend,
    contains,
    dvr_ideal,
    element_in,
    format_ideal,
    ideal_sum,
    intersect,
    inverse,
    is_invertible,
    maximal_ideal,
    monomial_ideal,
    parse_ideal,
    power,
    product,
    reduce_antichain,
    unit_ideal,
)

generator_lists = st.lists(
    st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=6,
)
monomial_ideals = generator_lists.map(monomial_ideal)
integral_ideals = st.lists(
    st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=4,
).map(monomial_ideal)
dvr_ideals = st.integers(-6, 6).map(dvr_ideal)


def create_example_ideal(*generators):
    """Monomial ideal from generator pairs"""
    return monomial_ideal(generators)


def test_dvr_arithmetic():
    """Test exponent arithmetic of the dvr backend"""
    assert product(dvr_ideal(2), dvr_ideal(3)) == dvr_ideal(5)
    assert intersect(dvr_ideal(2), dvr_ideal(5)) == dvr_ideal(5)
    assert ideal_sum(dvr_ideal(2), dvr_ideal(5)) == dvr_ideal(2)
    assert not contains(dvr_ideal(1), dvr_ideal(0))
    assert inverse(dvr_ideal(3)) == dvr_ideal(-3)


def test_monomial_product():
    """Test products of monomial ideals"""
    m = maximal_ideal(IdealBackend.monomial)
    assert product(m, m) == create_example_ideal((2, 0), (1, 1), (0, 2))
    assert product(create_example_ideal((1, 1)), m) == create_example_ideal((2, 1), (1, 2))


def test_monomial_sum_and_intersection():
    """Test lattice operations on monomial ideals"""
    assert intersect(create_example_ideal((1, 0), (0, 4)), create_example_ideal((2, 0), (0, 1))) == \
        create_example_ideal((2, 0), (1, 1), (0, 4))
    assert ideal_sum(create_example_ideal((1, 0), (0, 2)), create_example_ideal((2, 0), (0, 1))) == \
        maximal_ideal(IdealBackend.monomial)


def test_monomial_containment():
    """Test staircase containment"""
    m = maximal_ideal(IdealBackend.monomial)
    assert contains(m, create_example_ideal((1, 0), (0, 2)))
    assert contains(m, create_example_ideal((1, 1)))
    assert not contains(create_example_ideal((1, 1)), m)
    assert m >= create_example_ideal((1, 1))
    assert create_example_ideal((1, 1)) <= m


def test_invertibility():
    """Test that only principal monomial ideals are invertible"""
    m = maximal_ideal(IdealBackend.monomial)
    assert not is_invertible(m)
    with pytest.raises(NonInvertibleIdealError):
        inverse(m)
    assert inverse(create_example_ideal((1, 2))) == create_example_ideal((-1, -2))
    assert power(create_example_ideal((1, 2)), -2) == create_example_ideal((-2, -4))


def test_element_membership():
    """Test membership of single monomials"""
    ideal = create_example_ideal((2, 0), (0, 3))
    assert element_in(ideal, (2, 5))
    assert element_in(ideal, (0, 3))
    assert not element_in(ideal, (1, 2))
    assert element_in(dvr_ideal(-1), 0)
    assert not element_in(dvr_ideal(2), 1)


def test_backend_mismatch():
    """Test that mixing backends is rejected"""
    with pytest.raises(BackendMismatchError):
        product(dvr_ideal(1), maximal_ideal(IdealBackend.monomial))


def test_zero_ideal_rejected():
    """Test that the zero ideal cannot be built"""
    with pytest.raises(ValueError):
        FracIdeal(backend=IdealBackend.monomial, generators=())


def test_validated_and_fast_construction_agree():
    """Test that pydantic validation normalizes like the fast constructor"""
    validated = FracIdeal(backend="monomial", generators=[(0, 2), (1, 0), (2, 3)])
    assert validated == create_example_ideal((1, 0), (0, 2))
    assert hash(validated) == hash(create_example_ideal((1, 0), (0, 2)))


def test_parse_ideal():
    """Test parsing of canonical forms and shorthands"""
    monomial = IdealBackend.monomial
    assert parse_ideal("m^3", IdealBackend.dvr) == dvr_ideal(3)
    assert parse_ideal("m", IdealBackend.dvr) == dvr_ideal(1)
    assert parse_ideal("m^-2", IdealBackend.dvr) == dvr_ideal(-2)
    assert parse_ideal("Ω", IdealBackend.dvr) == unit_ideal(IdealBackend.dvr)
    assert parse_ideal("(p, T)", monomial) == maximal_ideal(monomial)
    assert parse_ideal("m", monomial) == maximal_ideal(monomial)
    assert parse_ideal("1", monomial) == unit_ideal(monomial)
    assert parse_ideal("p*T^2", monomial) == create_example_ideal((1, 2))
    assert parse_ideal("p^2T", monomial) == create_example_ideal((2, 1))
    assert parse_ideal("p^-1*T^-1", monomial) == create_example_ideal((-1, -1))


def test_format_ideal():
    """Test the canonical text form"""
    assert format_ideal(dvr_ideal(-1)) == "m^-1"
    assert format_ideal(maximal_ideal(IdealBackend.monomial)) == "p^0*T^1, p^1*T^0"
    text = format_ideal(create_example_ideal((2, 0), (1, 1), (0, 4)))
    assert parse_ideal(text, IdealBackend.monomial) == create_example_ideal((2, 0), (1, 1), (0, 4))


def test_parse_errors():
    """Test that malformed ideal strings are rejected"""
    with pytest.raises(IdealParseError):
        parse_ideal("q^2", IdealBackend.monomial)
    with pytest.raises(IdealParseError):
        parse_ideal("p^2", IdealBackend.dvr)
    with pytest.raises(IdealParseError):
        parse_ideal("", IdealBackend.dvr)


def test_reduce_antichain():
    """Test that dominated generators are dropped"""
    assert reduce_antichain([(1, 1), (0, 3), (2, 0), (1, 2), (3, 3)]) == ((0, 3), (1, 1), (2, 0))


@settings(max_examples=200, deadline=None)
@given(generator_lists, generator_lists, st.randoms())
def test_canonical_form_ignores_generator_order(first, second, shuffler):
    """Test that products are canonical whatever the generator order"""
    shuffled = list(first)
    shuffler.shuffle(shuffled)
    assert product(monomial_ideal(first), monomial_ideal(second)) == \
        product(monomial_ideal(second), monomial_ideal(shuffled))


@settings(max_examples=200, deadline=None)
@given(monomial_ideals, monomial_ideals)
def test_absorption(I, J):
    """Test the absorption laws"""
    assert ideal_sum(I, intersect(I, J)) == I
    assert intersect(I, ideal_sum(I, J)) == I


@settings(max_examples=200, deadline=None)
@given(monomial_ideals, monomial_ideals, monomial_ideals)
def test_distributivity(I, J, K):
    """Test that the monomial lattice is distributive"""
    assert intersect(I, ideal_sum(J, K)) == ideal_sum(intersect(I, J), intersect(I, K))


@settings(max_examples=200, deadline=None)
@given(monomial_ideals, monomial_ideals, monomial_ideals)
def test_product_laws(I, J, K):
    """Test associativity, commutativity and the unit"""
    one = unit_ideal(IdealBackend.monomial)
    assert product(product(I, J), K) == product(I, product(J, K))
    assert product(I, J) == product(J, I)
    assert product(I, one) == I


@settings(max_examples=200, deadline=None)
@given(monomial_ideals, integral_ideals)
def test_product_shrinks_by_integral_ideals(I, P):
    """Test that multiplying by an integral ideal stays inside I"""
    assert contains(I, product(I, P))


@settings(max_examples=100, deadline=None)
@given(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), dvr_ideals)
def test_inverse_of_invertible(generator, dvr):
    """Test that inverses multiply to the unit ideal"""
    principal = monomial_ideal([generator])
    assert product(principal, inverse(principal)) == unit_ideal(IdealBackend.monomial)
    assert product(dvr, inverse(dvr)) == unit_ideal(IdealBackend.dvr)
