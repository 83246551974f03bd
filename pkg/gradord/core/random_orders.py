"""
Deterministic generators of random standard forms, membership matrices and profiles.

The same seed always produces the same sequence, so fuzz runs are reproducible.
"""
import hashlib
import logging
from typing import Any, List, Optional, Tuple

import numpy as np

from gradord.core.config import get_settings
from gradord.core.exceptions import StandardFormError
from gradord.core.graduated_orders import GraduatedOrder, build_order, check_standard_form
from gradord.core.ideal_arith import (
    FracIdeal,
    IdealBackend,
    RingExponent,
    dvr_ideal,
    ideal_sum,
    monomial_ideal,
    product,
    unit_ideal,
)
from gradord.core.schemas import ChiProfile

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000


class DeterministicRandom:
    """
    A deterministic random number generator that produces the same sequence
    of random numbers for the same seed.
    """
    def __init__(self, seed: Optional[str] = None):
        """
        Initialize the generator.

        Args:
            seed: A string seed; defaults to GRADORD_FUZZ_SEED
        """
        seed = get_settings().fuzz_seed if seed is None else seed
        # Create a hash of the seed to get a 32-bit integer
        hash_obj = hashlib.md5(seed.encode())
        seed_int = int(hash_obj.hexdigest(), 16) % (2**32)
        self.rng = np.random.RandomState(seed_int)

    def random(self) -> float:
        return self.rng.random()

    def randint(self, low: int, high: int) -> int:
        """A random integer in [low, high)."""
        return int(self.rng.randint(low, high))

    def choice(self, items: List[Any]) -> Any:
        return items[self.randint(0, len(items))]

    def shuffle(self, items: List[Any]) -> None:
        self.rng.shuffle(items)


# ============================================================================
# Orders
# ============================================================================

def random_composition(random: DeterministicRandom, total: int) -> Tuple[int, ...]:
    """A random composition of total into positive parts."""
    parts, current = [], 1
    for _ in range(total - 1):
        if random.random() < 0.5:
            parts.append(current)
            current = 1
        else:
            current += 1
    parts.append(current)
    return tuple(parts)


def random_blocks(random: DeterministicRandom, t: int, max_size: int = 2) -> Tuple[int, ...]:
    return tuple(random.randint(1, max_size + 1) for _ in range(t))


def random_ideal(random: DeterministicRandom, backend: IdealBackend, max_exponent: int = 3) -> FracIdeal:
    """A random integral ideal: m^k, or a monomial ideal with one or two generators."""
    if backend == IdealBackend.dvr:
        return dvr_ideal(random.randint(0, max_exponent + 1))
    count = random.randint(1, 3)
    return monomial_ideal(
        (random.randint(0, max_exponent + 1), random.randint(0, max_exponent + 1)) for _ in range(count)
    )


def close_ideal_matrix(ideals: List[List[FracIdeal]]) -> List[List[FracIdeal]]:
    """Enlarge I_ik by I_ij I_jk until condition (i) holds."""
    t = len(ideals)
    closed = [list(row) for row in ideals]
    changed = True
    while changed:
        changed = False
        for j in range(t):
            for i in range(t):
                for k in range(t):
                    enlarged = ideal_sum(closed[i][k], product(closed[i][j], closed[j][k]))
                    if enlarged != closed[i][k]:
                        closed[i][k] = enlarged
                        changed = True
    return closed


def random_standard_form(random: DeterministicRandom, t: int, backend: IdealBackend,
                         max_exponent: int = 3, blocks: Optional[Tuple[int, ...]] = None,
                         d_omega: Optional[FracIdeal] = None) -> GraduatedOrder:
    """
    Draw a random standard form with t blocks.

    Off-diagonal entries are random integral ideals, closed under condition (i);
    draws failing properness are rejected.

    Raises:
        StandardFormError: If no valid draw is found within MAX_ATTEMPTS
    """
    backend = IdealBackend(backend)
    blocks = random_blocks(random, t) if blocks is None else tuple(blocks)
    one = unit_ideal(backend)
    for attempt in range(MAX_ATTEMPTS):
        ideals = [[one if i == j else random_ideal(random, backend, max_exponent) for j in range(t)]
                  for i in range(t)]
        ideals = close_ideal_matrix(ideals)
        if check_standard_form(ideals).valid:
            logger.debug("Standard form found after %d attempts", attempt + 1)
            return build_order(blocks, ideals, d_omega)
    raise StandardFormError(f"No {t}-block standard form found in {MAX_ATTEMPTS} attempts")


def random_dvr_order(random: DeterministicRandom, max_blocks: int = 4, max_exponent: int = 3,
                     max_different: int = 2) -> GraduatedOrder:
    """A random dvr standard form over a coefficient ring with inverse different m^{-d}."""
    t = random.randint(1, max_blocks + 1)
    d_omega = dvr_ideal(-random.randint(0, max_different + 1))
    return random_standard_form(random, t, IdealBackend.dvr, max_exponent, d_omega=d_omega)


def random_order_pair(random: DeterministicRandom, backend: IdealBackend, total: int,
                      max_exponent: int = 2) -> Tuple[GraduatedOrder, GraduatedOrder]:
    """Two random standard forms of the same total size in independent block frames."""
    first = random_composition(random, total)
    second = random_composition(random, total)
    return (
        random_standard_form(random, len(first), backend, max_exponent, blocks=first),
        random_standard_form(random, len(second), backend, max_exponent, blocks=second),
    )


def random_membership_matrix(random: DeterministicRandom, n: int, backend: IdealBackend,
                             low: int = -3, high: int = 3,
                             zero_probability: float = 0.2) -> List[List[Optional[RingExponent]]]:
    """An n x n matrix of monomials with exponents in [low, high]; None entries are zero."""
    def entry():
        if random.random() < zero_probability:
            return None
        if backend == IdealBackend.dvr:
            return random.randint(low, high + 1)
        return (random.randint(low, high + 1), random.randint(low, high + 1))

    return [[entry() for _ in range(n)] for _ in range(n)]


# ============================================================================
# Profiles
# ============================================================================

def _random_coprime(random: DeterministicRandom, prime: int, high: int) -> int:
    while True:
        value = random.randint(1, high + 1)
        if value % prime:
            return value


def random_direct_product_profile(random: DeterministicRandom, prime: int = 3) -> ChiProfile:
    """A profile of G = H x Γ: no twisting and no ramification between F(η) and F_χ."""
    eta_degree = random.randint(1, 5)
    s_eta = random.choice([d for d in range(1, eta_degree + 1) if eta_degree % d == 0])
    return ChiProfile(
        name="direct",
        prime=prime,
        eta_degree=eta_degree,
        s_eta=s_eta,
        d_chi_F=random.randint(0, 4),
        ram_F_chi=random.randint(1, 4),
        order_H=eta_degree * random.randint(1, 10),
        is_direct_product=True,
    )


def random_coprime_schur_profile(random: DeterministicRandom, prime: int = 3) -> ChiProfile:
    """
    A profile with p ∤ s_χ.

    Since w_χ/v_χ is a power of p, p ∤ s_χ forces w_χ = v_χ and F(η) = F_χ.
    """
    v = prime ** random.randint(0, 3)
    eta_degree = random.randint(1, 5)
    return ChiProfile(
        name="coprime",
        prime=prime,
        eta_degree=eta_degree,
        s_eta=_random_coprime(random, prime, 6),
        w_chi=v,
        v_chi=v,
        order_H=eta_degree * random.randint(1, 10),
    )


def pro_p_profile(e: int, d: int, prime: int = 3) -> ChiProfile:
    """A profile with s_η = 1 and e(F(η)/F_χ) = w_χ/v_χ = e."""
    return ChiProfile(
        name=f"e{e}d{d}",
        prime=prime,
        eta_degree=1,
        w_chi=e,
        v_chi=1,
        e_eta_chi=e,
        d_eta_chi=d,
        order_H=e,
    )
