import pytest
from sympy import Rational

from gradord.core.exceptions import PrecisionExhaustedError
from gradord.core.padic_linalg import (
    annihilator_length,
    elementary_divisor_valuations,
    padic_valuation,
    reduce_matrix,
)


def test_padic_valuation():
    assert padic_valuation(18, 3) == 2
    assert padic_valuation(Rational(1, 9), 3) == -2
    assert padic_valuation(Rational(5, 3), 3) == -1
    assert padic_valuation(7, 3) == 0
    assert padic_valuation(0, 3) is None


def test_reduce_matrix():
    """Test scaling to a p-integral matrix"""
    scale, reduced = reduce_matrix([[Rational(1, 3), 1]], 3, 6)
    assert scale == 1
    assert reduced == [[1, 3]]
    with pytest.raises(PrecisionExhaustedError):
        reduce_matrix([[Rational(1, 3 ** 6)]], 3, 6)


def test_elementary_divisors():
    """Test Smith form valuations modulo p^K"""
    assert elementary_divisor_valuations([[3, 0], [0, 9]], 3, 6) == [1, 2]
    assert elementary_divisor_valuations([[1, 2], [2, 4]], 3, 6) == [0]
    assert elementary_divisor_valuations([[0, 0], [0, 0]], 3, 6) == []
    assert elementary_divisor_valuations([[9, 3], [3, 0]], 3, 6) == [1, 1]


def test_annihilator_length():
    """Test the length of Z_p^r / {a : aM integral}"""
    assert annihilator_length([[Rational(1, 3)]], 3, 6) == 1
    assert annihilator_length([[Rational(1, 9), 0], [0, Rational(1, 3)]], 3, 6) == 3
    assert annihilator_length([[Rational(1, 2), 5]], 3, 6) == 0
