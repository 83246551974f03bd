"""
Linear algebra over Z/p^K: elementary divisors of p-integral rational matrices.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from sympy import Rational

from gradord.core.exceptions import PrecisionExhaustedError

logger = logging.getLogger(__name__)


def padic_valuation(value: Rational, prime: int) -> Optional[int]:
    """v_p of a rational number, None for zero."""
    value = Rational(value)
    if value == 0:
        return None
    v = 0
    num, den = int(value.p), int(value.q)
    while num % prime == 0:
        num //= prime
        v += 1
    while den % prime == 0:
        den //= prime
        v -= 1
    return v


def _int_valuation(x: int, prime: int) -> int:
    v = 0
    while x % prime == 0:
        x //= prime
        v += 1
    return v


def reduce_matrix(rows: Sequence[Sequence[Rational]], prime: int, precision: int) -> Tuple[int, List[List[int]]]:
    """
    Scale a rational matrix by p^s to make it p-integral and reduce it modulo p^precision.

    Returns:
        (s, reduced integer matrix)

    Raises:
        PrecisionExhaustedError: If s does not fit in the precision
    """
    scale = 0
    for row in rows:
        for value in row:
            v = padic_valuation(value, prime)
            if v is not None and -v > scale:
                scale = -v
    if scale >= precision - 1:
        raise PrecisionExhaustedError(f"Denominators p^{scale} exceed precision {precision}")

    modulus = prime ** precision
    reduced = []
    for row in rows:
        out = []
        for value in row:
            value = Rational(value) * prime ** scale
            num, den = int(value.p), int(value.q)
            # den is now a p-adic unit
            out.append(num * pow(den, -1, modulus) % modulus)
        reduced.append(out)
    return scale, reduced


def elementary_divisor_valuations(matrix: Sequence[Sequence[int]], prime: int, precision: int) -> List[int]:
    """
    Valuations of the Smith form diagonal of an integer matrix over Z/p^precision.

    Pivots that vanish modulo p^precision are not reported.

    Args:
        matrix: Integer matrix (modified copy is used)
        prime: The prime p
        precision: Work modulo p^precision

    Returns:
        Pivot valuations in elimination order
    """
    modulus = prime ** precision
    M = [[x % modulus for x in row] for row in matrix]
    n_rows = len(M)
    n_cols = len(M[0]) if M else 0
    pivots = []
    r = 0
    while r < min(n_rows, n_cols):
        # Step 1: pick the entry of least valuation
        best = None
        for i in range(r, n_rows):
            for j in range(r, n_cols):
                if M[i][j]:
                    v = _int_valuation(M[i][j], prime)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best

        # Step 2: move it to (r, r)
        M[r], M[i] = M[i], M[r]
        for row in M:
            row[r], row[j] = row[j], row[r]

        # Step 3: clear the pivot column and row
        power = prime ** v
        unit_inverse = pow(M[r][r] // power, -1, modulus)
        for i in range(r + 1, n_rows):
            if M[i][r]:
                factor = (M[i][r] // power) * unit_inverse % modulus
                M[i] = [(a - factor * b) % modulus for a, b in zip(M[i], M[r])]
        for j in range(r + 1, n_cols):
            if M[r][j]:
                factor = (M[r][j] // power) * unit_inverse % modulus
                for row in M:
                    row[j] = (row[j] - factor * row[r]) % modulus

        pivots.append(v)
        r += 1
    logger.debug("Elementary divisor valuations %s (precision %d)", pivots, precision)
    return pivots


def annihilator_length(rows: Sequence[Sequence[Rational]], prime: int, precision: int) -> int:
    """
    Length of Z_p^r / {a : a·M is p-integral} for a rational r x c matrix M.

    Args:
        rows: The matrix M, one row per basis vector
        prime: The prime p
        precision: Working precision

    Returns:
        The Z_p-length of the quotient
    """
    scale, reduced = reduce_matrix(rows, prime, precision)
    pivots = elementary_divisor_valuations(reduced, prime, precision)
    return sum(max(0, scale - v) for v in pivots)
