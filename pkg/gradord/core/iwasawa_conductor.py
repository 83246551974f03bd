"""
Central conductor exponents for completed group rings of G = H ⋊ Γ.

Profiles carry the numeric invariants of a character χ; the abelian-field
helpers compute the different exponents those profiles need for subfields of
Q_p(ζ_N).
"""
import logging
from typing import List, Optional, Sequence, Set, Tuple

from sympy import Rational, ilcm, totient

from gradord.core.cyclotomic import CyclotomicNumber, cyclotomic_modulus
from gradord.core.exceptions import FieldSpecError, ProfileError, TowerError
from gradord.core.finite_groups import CharacterTable
from gradord.core.group_algebra import (
    DecompositionGroup,
    chi_invariants,
    character_field_subgroup,
    decomposition_group,
    p_adic_orbits,
    split_level,
    subfield_invariants,
    subgroup_generated,
)
from gradord.core.padic_linalg import padic_valuation
from gradord.core.schemas import (
    AbelianFieldSpec,
    ChiProfile,
    ConductorReport,
    ConductorRow,
    OracleOrbit,
    TowerReport,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Profiles
# ============================================================================

def validate_profile(profile: ChiProfile) -> None:
    """
    Check the relations between the invariants of a profile.

    Raises:
        ProfileError: If v_chi ∤ w_chi, e_eta_chi = 0, or a direct-product profile is twisted
    """
    if profile.w_chi % profile.v_chi:
        raise ProfileError(f"{profile.name}: v_chi = {profile.v_chi} does not divide w_chi = {profile.w_chi}")
    if profile.e_eta_chi == 0:
        raise ProfileError(f"{profile.name}: ramification index e(F(η)/F_χ) must be positive")
    if profile.is_direct_product and (profile.w_chi != 1 or profile.v_chi != 1
                                      or profile.e_eta_chi != 1 or profile.d_eta_chi != 0):
        raise ProfileError(f"{profile.name}: a direct-product profile needs w = v = e = 1 and d_eta_chi = 0")


def r_chi(profile: ChiProfile) -> int:
    """
    r_χ = -⌊d / e⌋ with d = v_{F(η)}(𝔇(F(η)/F_χ)) and e = e(F(η)/F_χ).

    The exponent is measured in W, an unramified extension of F(η), so the
    valuation of the different does not change.
    """
    if profile.e_eta_chi == 0:
        raise ProfileError(f"{profile.name}: ramification index e(F(η)/F_χ) must be positive")
    return -(profile.d_eta_chi // profile.e_eta_chi)


def s_chi(profile: ChiProfile) -> int:
    if profile.w_chi % profile.v_chi:
        raise ProfileError(f"{profile.name}: v_chi = {profile.v_chi} does not divide w_chi = {profile.w_chi}")
    return profile.s_eta * profile.w_chi // profile.v_chi


def nickel_r_chi(profile: ChiProfile) -> int:
    """-⌊d / s_χ⌋, the pro-p form of r_χ."""
    return -(profile.d_eta_chi // s_chi(profile))


def central_conductor_component(profile: ChiProfile) -> ConductorRow:
    """
    The χ-component (#H w_χ / χ(1)) 𝖣(O_{F_χ}/O_F) (𝔭'_χ)^{r_χ} of the central conductor.

    𝖣 is the inverse different, so the π_χ-exponent is the coefficient
    valuation minus d_chi_F.
    """
    validate_profile(profile)
    degree = profile.w_chi * profile.eta_degree
    if profile.chi_degree is not None and profile.chi_degree != degree:
        raise ProfileError(f"{profile.name}: χ(1) = {profile.chi_degree} but w_chi·η(1) = {degree}")
    quotient = Rational(profile.order_H * profile.w_chi, degree)
    if quotient.q != 1:
        raise ProfileError(f"{profile.name}: η(1) = {profile.eta_degree} does not divide #H = {profile.order_H}")

    coefficient = profile.ram_F_chi * padic_valuation(quotient, profile.prime)
    exponent = r_chi(profile)
    pi_exponent = coefficient - profile.d_chi_F
    n_chi = None
    if profile.is_direct_product and profile.eta_degree % profile.s_eta == 0:
        n_chi = profile.eta_degree // profile.s_eta

    return ConductorRow(
        name=profile.name,
        r_chi=exponent,
        s_chi=s_chi(profile),
        coefficient_valuation=coefficient,
        d_chi_F=profile.d_chi_F,
        pi_exponent=pi_exponent,
        p_prime_exponent=exponent,
        n_chi=n_chi,
        ideal=f"pi^{pi_exponent} * (p')^{exponent}",
    )


def conductor_report(profiles: Sequence[ChiProfile]) -> ConductorReport:
    return ConductorReport(rows=[central_conductor_component(profile) for profile in profiles])


# ============================================================================
# Abelian subfields of Q_p(ζ_N)
# ============================================================================

def _fixing_group(spec: AbelianFieldSpec) -> Tuple[DecompositionGroup, Set[int]]:
    dec = decomposition_group(spec.level, spec.prime)
    fixing = set(subgroup_generated(spec.fixing, spec.level)) & set(dec.elements)
    return dec, fixing


def field_ramification(spec: AbelianFieldSpec) -> Tuple[int, int]:
    """(e, f) of the field over Q_p."""
    dec, fixing = _fixing_group(spec)
    return subfield_invariants(dec, fixing)


def _congruence_subgroup(dec: DecompositionGroup, j: int) -> Set[int]:
    """U_j = {a ∈ I : a ≡ 1 mod p^j}."""
    modulus = dec.prime ** j
    return {a for a in dec.inertia if a % modulus == 1 % modulus}


def different_exponent_abelian(spec: AbelianFieldSpec) -> int:
    """
    Different exponent of the field over Q_p by the conductor–discriminant formula.

    A character of D/S has conductor exponent n when it is trivial on U_n but
    not on U_{n-1}, so the discriminant exponent is Σ_{n<k} ([D:S] - [D:U_n S]).

    Returns:
        v_K of the different of K/Q_p
    """
    dec, fixing = _fixing_group(spec)
    k, _ = split_level(spec.level, spec.prime)
    size = len(dec.elements)
    degree = size // len(fixing)
    discriminant = 0
    for n in range(k):
        u = _congruence_subgroup(dec, n)
        joined = len(u) * len(fixing) // len(u & fixing)
        discriminant += degree - size // joined
    _, f = subfield_invariants(dec, fixing)
    if discriminant % f:
        raise FieldSpecError(f"Discriminant exponent {discriminant} is not divisible by f = {f}")
    return discriminant // f


def _lower_ramification_groups(dec: DecompositionGroup) -> List[Set[int]]:
    """G_0, G_1, ..., G_{p^k - 1} of Q_p(ζ_N)/Q_p in the lower numbering."""
    k, _ = split_level(dec.level, dec.prime)
    groups = [set(dec.inertia)]
    for u in range(1, dec.prime ** k):
        v = 1
        while dec.prime ** v - 1 < u:
            v += 1
        groups.append(_congruence_subgroup(dec, v))
    return groups


def _hilbert_sum(dec: DecompositionGroup, fixing: Set[int]) -> int:
    """v_Z of the different of Q_p(ζ_N) over the fixed field of `fixing`."""
    return sum(len(group & fixing) - 1 for group in _lower_ramification_groups(dec))


def _lift_fixing(spec: AbelianFieldSpec, level: int) -> Set[int]:
    """Preimage in (Z/L)^× of the fixing subgroup, intersected with the decomposition group at level L."""
    base = set(subgroup_generated(spec.fixing, spec.level))
    dec = decomposition_group(level, spec.prime)
    return {a for a in dec.elements if a % spec.level in base}


def relative_different_exponent(upper: AbelianFieldSpec, lower: AbelianFieldSpec) -> int:
    """
    v_U of the different of U/L by Hilbert's formula in the common cyclotomic field Z.

    d(U/L) = (d(Z/L) - d(Z/U)) / e(Z/U), with d(Z/K) = Σ_u (|G_u ∩ Gal(Z/K)| - 1).
    """
    if upper.prime != lower.prime:
        raise TowerError(f"Fields over Q_{upper.prime} and Q_{lower.prime} do not form a tower")
    level = int(ilcm(upper.level, lower.level))
    dec = decomposition_group(level, upper.prime)
    fix_upper, fix_lower = _lift_fixing(upper, level), _lift_fixing(lower, level)
    if not fix_upper <= fix_lower:
        raise TowerError("The upper field does not contain the lower field")
    tame = len(fix_upper & set(dec.inertia))
    difference = _hilbert_sum(dec, fix_lower) - _hilbert_sum(dec, fix_upper)
    if difference % tame:
        raise TowerError(f"Hilbert different {difference} is not divisible by e(Z/U) = {tame}")
    return difference // tame


def hilbert_different_exponent(spec: AbelianFieldSpec) -> int:
    """Different exponent over Q_p by Hilbert's formula."""
    base = AbelianFieldSpec(level=1, prime=spec.prime, fixing=[])
    return relative_different_exponent(spec, base)


def cyclotomic_different_oracle(level: int, prime: int) -> int:
    """
    v_𝔭(Φ'_N(ζ_N)), the different exponent of Q_p(ζ_N)/Q_p.

    The norm of Φ'_N(ζ_N) spreads the valuation evenly over the f·g primes above p.
    """
    dec = decomposition_group(level, prime)
    derivative = CyclotomicNumber(level, cyclotomic_modulus(level).diff())
    valuation = padic_valuation(derivative.norm(), prime)
    primes_times_f = int(totient(level)) // dec.ramification_index
    if valuation % primes_times_f:
        raise FieldSpecError(f"Norm valuation {valuation} not divisible by f·g = {primes_times_f}")
    return valuation // primes_times_f


def _is_full_cyclotomic(spec: AbelianFieldSpec) -> bool:
    dec, fixing = _fixing_group(spec)
    return fixing == {1 % spec.level}


def tower_additivity_check(lower: AbelianFieldSpec, middle: AbelianFieldSpec,
                           upper: AbelianFieldSpec) -> TowerReport:
    """
    Check d(U/L) = e(U/M)·d(M/L) + d(U/M) and cross-check the absolute differents.

    The left side is d(U) - e(U/L)·d(L) with absolute differents from the
    conductor–discriminant formula. The right side uses relative differents from
    Hilbert's formula. Full cyclotomic layers are also checked against Φ'_N.
    """
    for spec in (middle, upper):
        if spec.prime != lower.prime:
            raise TowerError("All layers must lie over the same Q_p")

    d_ul = relative_different_exponent(upper, lower)
    d_ml = relative_different_exponent(middle, lower)
    d_um = relative_different_exponent(upper, middle)
    e_upper, _ = field_ramification(upper)
    e_middle, _ = field_ramification(middle)
    e_lower, _ = field_ramification(lower)

    absolute = {name: different_exponent_abelian(spec)
                for name, spec in (("lower", lower), ("middle", middle), ("upper", upper))}
    lhs = absolute["upper"] - (e_upper // e_lower) * absolute["lower"]
    rhs = (e_upper // e_middle) * d_ml + d_um
    hilbert_agrees = (
        absolute["upper"] == (e_upper // e_lower) * absolute["lower"] + d_ul
        and absolute["middle"] == (e_middle // e_lower) * absolute["lower"] + d_ml
    )

    oracle_agrees = None
    full_layers = [spec for spec in (lower, middle, upper) if _is_full_cyclotomic(spec)]
    if full_layers:
        oracle_agrees = all(
            cyclotomic_different_oracle(spec.level, spec.prime) == different_exponent_abelian(spec)
            for spec in full_layers
        )

    report = TowerReport(
        lhs=lhs, rhs=rhs, holds=lhs == rhs,
        layer_differents={
            "upper/lower": d_ul, "middle/lower": d_ml, "upper/middle": d_um,
            "lower": absolute["lower"], "middle": absolute["middle"], "upper": absolute["upper"],
        },
        hilbert_agrees=hilbert_agrees,
        cyclotomic_oracle_agrees=oracle_agrees,
    )
    logger.info("Tower check: %d vs %d", report.lhs, report.rhs)
    return report


# ============================================================================
# Profiles from bundled groups
# ============================================================================

def profile_from_group(table: CharacterTable, alpha: Sequence[int], row: int, prime: int,
                       name: Optional[str] = None) -> ChiProfile:
    """
    Compute the profile of χ = ind(η) for G = H ⋊_α Γ from a character table.
    """
    invariants = chi_invariants(table, alpha, row, prime)
    eta_field = AbelianFieldSpec(level=table.level, prime=prime, fixing=invariants.eta_field_subgroup)
    chi_field = AbelianFieldSpec(level=table.level, prime=prime, fixing=invariants.chi_field_subgroup)
    e_eta, _ = field_ramification(eta_field)
    e_chi, _ = field_ramification(chi_field)
    identity = all(alpha[x] == x for x in range(table.group.order))

    return ChiProfile(
        name=name or table.names[row],
        prime=prime,
        eta_degree=table.degree(row),
        s_eta=table.schur_indices[row],
        w_chi=invariants.w_chi,
        v_chi=invariants.v_chi,
        e_eta_chi=e_eta // e_chi,
        d_eta_chi=relative_different_exponent(eta_field, chi_field),
        d_chi_F=different_exponent_abelian(chi_field),
        ram_F_chi=e_chi,
        order_H=table.group.order,
        is_direct_product=identity,
        chi_degree=invariants.w_chi * table.degree(row),
    )


def jacobinski_valuations(table: CharacterTable, prime: int) -> List[OracleOrbit]:
    """
    Per-orbit central conductor valuations e·v_p(#H/η(1)) - d(F(η)/Q_p), normalized in F(η).
    """
    dec = decomposition_group(table.level, prime)
    results = []
    for orbit in p_adic_orbits(table, prime):
        row = orbit[0]
        fixing = character_field_subgroup(table, table.rows[row], prime)
        e, f = subfield_invariants(dec, fixing)
        spec = AbelianFieldSpec(level=table.level, prime=prime, fixing=fixing)
        valuation = e * padic_valuation(Rational(table.group.order, table.degree(row)), prime) \
            - different_exponent_abelian(spec)
        results.append(OracleOrbit(orbit=orbit, valuation=valuation, ramification_index=e, residue_degree=f))
    return results
