import pytest
from sympy import Rational

from gradord.core.cyclotomic import CyclotomicNumber, parse_cyclotomic
from gradord.core.exceptions import CyclotomicParseError, GroupDataError


def create_example_root(level, k=1):
    return CyclotomicNumber.root_of_unity(level, k)


def test_roots_of_unity():
    """Test basic relations between roots of unity"""
    zeta = create_example_root(3)
    assert zeta * zeta + zeta + 1 == 0
    assert create_example_root(3, 3) == 1
    assert create_example_root(7, 9) == create_example_root(7, 2)
    assert zeta.degree == 2


def test_canonical_coefficients():
    """Test that ζ^k for k ≥ deg Φ_N is reduced"""
    assert create_example_root(3, 2).coefficients == (Rational(-1), Rational(-1))
    assert create_example_root(4, 2).coefficients == (Rational(-1), Rational(0))


def test_lift_between_levels():
    """Test that numbers of different levels compare after lifting"""
    assert create_example_root(3).lift(9) == create_example_root(9, 3)
    assert create_example_root(3) == create_example_root(9, 3)
    total = create_example_root(3) + create_example_root(5)
    assert total.level == 15
    with pytest.raises(GroupDataError):
        create_example_root(3).lift(10)


def test_minimal_level_and_descent():
    assert create_example_root(3).lift(12).minimal_level() == 3
    assert create_example_root(4, 2).minimal_level() == 1
    assert (create_example_root(5) + create_example_root(5, 4)).minimal_level() == 5
    zeta_6 = create_example_root(6)
    assert zeta_6.minimal_level() == 3
    assert zeta_6.descend(3).coefficients == (Rational(1), Rational(1))
    assert zeta_6.descend(3) == -create_example_root(3, 2)
    with pytest.raises(GroupDataError):
        create_example_root(9).descend(3)


def test_equal_numbers_hash_equal_across_levels():
    """Test that hashing agrees with equality after lifting"""
    zeta = create_example_root(3)
    for level in (6, 9, 12, 21):
        assert zeta.lift(level) == zeta
        assert hash(zeta.lift(level)) == hash(zeta)
    assert hash(create_example_root(4, 2)) == hash(-1)
    assert len({zeta, zeta.lift(9), create_example_root(9, 3), create_example_root(6)}) == 2


def test_galois_action():
    zeta = create_example_root(3)
    assert zeta.galois(2) == zeta * zeta
    assert zeta.conjugate() == zeta.galois(2)
    assert (zeta + zeta.conjugate()) == -1
    with pytest.raises(GroupDataError):
        zeta.galois(3)


@pytest.mark.parametrize("prime", [3, 5, 7])
def test_norms(prime):
    """Test norms of units and of 1 - ζ_p"""
    zeta = create_example_root(prime)
    assert zeta.norm() == 1
    assert (1 - zeta).norm() == prime
    assert CyclotomicNumber.rational(prime, 2).norm() == 2 ** (prime - 1)


def test_rationality():
    half = CyclotomicNumber.rational(5, Rational(1, 2))
    assert half.is_rational()
    assert half.to_rational() == Rational(1, 2)
    assert not create_example_root(5).is_rational()
    with pytest.raises(GroupDataError):
        create_example_root(5).to_rational()


def test_literals():
    """Test parsing and printing of cyclotomic literals"""
    assert create_example_root(3).to_literal() == "3:0,1"
    assert parse_cyclotomic("3:0,1") == create_example_root(3)
    assert parse_cyclotomic("-1", level=3) == -1
    assert parse_cyclotomic("3:1/2") == Rational(1, 2)
    assert parse_cyclotomic("3:0,1", level=9).level == 9


@pytest.mark.parametrize("text", ["x:1", "abc", "0:1", "3:a,b"])
def test_literal_errors(text):
    with pytest.raises(CyclotomicParseError):
        parse_cyclotomic(text)
