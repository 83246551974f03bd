"""
Command-line surface: gradord <group> <action> [flags].

Reports go to stdout (or --out), logs to stderr. Exit status is 0 on
success, 1 on a domain error and 2 on an I/O or parse error.
"""
import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ValidationError, validator
from sympy import isprime

from gradord import __version__
from gradord.core.conductor_oracle import bruteforce_conductor
from gradord.core.config import MAX_PRECISION, MIN_PRECISION, get_settings
from gradord.core.exceptions import ConfigError, DomainError, GroupDataError, InputError
from gradord.core.finite_groups import CharacterTable, table_from_document
from gradord.core.graduated_orders import (
    conductor_into_selfdual,
    graduated_hull,
    hereditary_obstruction,
    intersect_orders,
    inverse_different,
    jacobson_radical,
    principalize,
    radical_quotient,
    staircase_conjugation,
    validate_standard_form,
)
from gradord.core.group_algebra import (
    chi_invariants,
    decomposition_group,
    epsilon_idempotent,
    p_adic_orbits,
)
from gradord.core.ideal_arith import format_ideal
from gradord.core.iwasawa_conductor import (
    conductor_report,
    profile_from_group,
    tower_additivity_check,
)
from gradord.core.schemas import (
    GroupDocument,
    IdempotentEntry,
    IdempotentReport,
    InvariantsReport,
    OracleReport,
    OrbitReport,
    OrderDocument,
    OrderReport,
    ProfileDocument,
    TowerDocument,
    TowerReport,
    ViolationReport,
)
from gradord.core.utils import (
    convert_document_to_order,
    convert_document_to_parts,
    convert_matrix_to_document,
    convert_order_to_document,
    format_ideal_matrix,
    format_order,
    format_table,
)

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, List[str]] = {
    "order": ["validate", "radical", "quotient", "different", "conductor", "intersect",
              "hull", "extremal", "hereditary", "principalize"],
    "group": ["orbits", "idempotents", "invariants", "conductor-oracle"],
    "iwasawa": ["r-chi", "s-chi", "central-conductor", "tower-check"],
}


class JobSpec(BaseModel):
    command: str
    action: str
    in_path: Optional[str] = None
    in2_path: Optional[str] = None
    group_path: Optional[str] = None
    profile_path: Optional[str] = None
    prime: Optional[int] = None
    precision: Optional[int] = None
    out_path: Optional[str] = None
    format: str = "text"

    @validator('action')
    def validate_action(cls, v, values):
        command = values.get('command')
        if command not in COMMANDS or v not in COMMANDS[command]:
            raise ValueError(f"Unknown subcommand '{command} {v}'")
        return v

    @validator('in_path', 'in2_path', 'group_path', 'profile_path')
    def validate_path(cls, v):
        if v is not None and not os.path.isfile(v):
            raise ValueError(f"Input file '{v}' does not exist")
        return v

    @validator('prime')
    def validate_prime(cls, v):
        if v is not None and (v < 3 or not isprime(v)):
            raise ValueError(f"{v} is not an odd prime")
        return v

    @validator('precision')
    def validate_precision(cls, v):
        if v is not None and not MIN_PRECISION <= v <= MAX_PRECISION:
            raise ValueError(f"Precision must be in [{MIN_PRECISION}, {MAX_PRECISION}] (got {v})")
        return v

    @validator('format')
    def validate_format(cls, v):
        if v not in ("text", "json"):
            raise ValueError(f"Unknown output format '{v}'")
        return v


# ============================================================================
# Input helpers
# ============================================================================

def _load(path: Optional[str], model, flag: str):
    if path is None:
        raise InputError(f"{flag} FILE is required for this subcommand")
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"Cannot read {path}: {e}")
    try:
        return model.parse_obj(data)
    except ValidationError as e:
        raise InputError(f"Invalid document {path}: {e}")


def _require_prime(job: JobSpec) -> int:
    if job.prime is None:
        raise InputError("--prime is required for this subcommand")
    return job.prime


def _load_table(job: JobSpec) -> Tuple[GroupDocument, CharacterTable]:
    document = _load(job.group_path, GroupDocument, "--group")
    try:
        table = table_from_document(document)
    except GroupDataError as e:
        raise InputError(f"Invalid group document {job.group_path}: {e}")
    if document.character is not None and document.character >= len(table.rows):
        raise InputError(f"Invalid group document {job.group_path}: character {document.character} "
                         f"is out of range for {len(table.rows)} characters")
    return document, table


# ============================================================================
# Handlers: each returns (report, text rendering)
# ============================================================================

def _order_report(job: JobSpec) -> Tuple[BaseModel, str]:
    document = _load(job.in_path, OrderDocument, "--in")
    action = job.action

    if action == "validate":
        blocks, ideals, d_omega = convert_document_to_parts(document)
        result = validate_standard_form(blocks, ideals, d_omega)
        if isinstance(result, ViolationReport):
            return OrderReport(command=action, validation=result), result.message
        return (OrderReport(command=action, order=convert_order_to_document(result), validation=ViolationReport(valid=True)),
                "valid standard form\n" + format_order(result))

    order = convert_document_to_order(document)
    if action in ("radical", "different", "conductor"):
        compute = {"radical": jacobson_radical, "different": inverse_different,
                   "conductor": conductor_into_selfdual}[action]
        matrix = compute(order)
        return (OrderReport(command=action, matrix=convert_matrix_to_document(order.blocks, matrix)),
                format_ideal_matrix(matrix, order.blocks))
    if action == "quotient":
        blocks = radical_quotient(order)
        detail = " x ".join(name for _, name in blocks)
        return OrderReport(command=action, quotient_blocks=[n for n, _ in blocks], detail=detail), detail
    if action in ("intersect", "hull", "principalize"):
        if action == "intersect":
            other = convert_document_to_order(_load(job.in2_path, OrderDocument, "--in2"))
            result = intersect_orders(order, other)
        else:
            result = graduated_hull(order) if action == "hull" else principalize(order)
        return OrderReport(command=action, order=convert_order_to_document(result)), format_order(result)
    if action == "extremal":
        found = staircase_conjugation(order)
        if found is None:
            return OrderReport(command=action, flag=False), "not extremal"
        ranks, factors = found
        detail = " ".join(str(r) for r in ranks)
        if any(factor != factors[0] for factor in factors):
            detail += " conjugated by diag(" + ", ".join(format_ideal(f) for f in factors) + ")"
        return OrderReport(command=action, flag=True, detail=detail), "extremal, staircase ranks " + detail
    obstructed, reason = hereditary_obstruction(order)
    text = ("obstructed: " if obstructed else "not obstructed: ") + reason
    return OrderReport(command=action, flag=obstructed, detail=reason), text


def _group_report(job: JobSpec) -> Tuple[BaseModel, str]:
    document, table = _load_table(job)
    prime = _require_prime(job)
    action = job.action

    if action == "orbits":
        dec = decomposition_group(table.level, prime)
        orbits = p_adic_orbits(table, prime)
        report = OrbitReport(prime=prime, level=table.level, decomposition_group=dec.elements,
                             inertia=dec.inertia, orbits=orbits)
        rows = [[i, ", ".join(table.names[r] for r in orbit)] for i, orbit in enumerate(orbits)]
        return report, format_table(["orbit", "characters"], rows)
    if action == "idempotents":
        entries = [IdempotentEntry(orbit=orbit, coefficients=epsilon_idempotent(table, orbit).literals())
                   for orbit in p_adic_orbits(table, prime)]
        rows = [[", ".join(table.names[r] for r in e.orbit), " ".join(e.coefficients)] for e in entries]
        return IdempotentReport(prime=prime, idempotents=entries), format_table(["orbit", "coefficients"], rows)
    if action == "invariants":
        if document.automorphism is None or document.character is None:
            raise InputError("The group document needs 'automorphism' and 'character' for invariants")
        invariants = chi_invariants(table, document.automorphism, document.character, prime)
        s = table.schur_indices[document.character] * invariants.w_chi // invariants.v_chi
        report = InvariantsReport(prime=prime, character=document.character, w_chi=invariants.w_chi,
                                  v_chi=invariants.v_chi, s_chi=s, tau=invariants.tau)
        return report, format_table(["w_chi", "v_chi", "s_chi", "tau"],
                                    [[report.w_chi, report.v_chi, report.s_chi, report.tau]])

    precision = job.precision if job.precision is not None else get_settings().precision
    orbits = bruteforce_conductor(table, prime, precision)
    rows = [[", ".join(table.names[r] for r in o.orbit), o.valuation, o.ramification_index, o.residue_degree]
            for o in orbits]
    return (OracleReport(prime=prime, precision=precision, orbits=orbits),
            format_table(["orbit", "valuation", "e", "f"], rows))


def _iwasawa_report(job: JobSpec) -> Tuple[BaseModel, str]:
    if job.action == "tower-check":
        document = _load(job.in_path, TowerDocument, "--in")
        report: TowerReport = tower_additivity_check(*document.layers)
        rows = [[name, value] for name, value in sorted(report.layer_differents.items())]
        text = (f"d(U/L) = {report.lhs}, e(U/M) d(M/L) + d(U/M) = {report.rhs}: "
                f"{'holds' if report.holds else 'FAILS'}\n" + format_table(["layer", "different"], rows))
        return report, text

    if job.profile_path is not None:
        profiles = _load(job.profile_path, ProfileDocument, "--profile").profiles
    else:
        document, table = _load_table(job)
        if document.automorphism is None or document.character is None:
            raise InputError("Give --profile, or a --group document with 'automorphism' and 'character'")
        profiles = [profile_from_group(table, document.automorphism, document.character, _require_prime(job))]

    report = conductor_report(profiles)
    if job.action == "r-chi":
        text = format_table(["chi", "r_chi"], [[r.name, r.r_chi] for r in report.rows])
    elif job.action == "s-chi":
        text = format_table(["chi", "s_chi"], [[r.name, r.s_chi] for r in report.rows])
    else:
        text = format_table(
            ["chi", "r_chi", "s_chi", "pi-exponent", "p'-exponent", "n_chi", "ideal"],
            [[r.name, r.r_chi, r.s_chi, r.pi_exponent, r.p_prime_exponent, r.n_chi, r.ideal] for r in report.rows],
        )
    return report, text


HANDLERS: Dict[str, Callable[[JobSpec], Tuple[BaseModel, str]]] = {
    "order": _order_report,
    "group": _group_report,
    "iwasawa": _iwasawa_report,
}


def run(job: JobSpec) -> Tuple[int, str]:
    """
    Dispatch a job and render its report.

    Returns:
        (exit status, report text or error message)
    """
    try:
        report, text = HANDLERS[job.command](job)
    except DomainError as e:
        logger.info("%s %s failed: %s", job.command, job.action, e)
        return 1, str(e)
    except (InputError, ConfigError) as e:
        return 2, str(e)

    if job.format == "json":
        return 0, report.json(sort_keys=True, indent=2)
    return 0, text


# ============================================================================
# Entry point
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradord", description="Graduated orders and central conductors.")
    parser.add_argument('--version', action='version', version=f"gradord {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)
    for command, actions in COMMANDS.items():
        sub = commands.add_parser(command).add_subparsers(dest='action', required=True)
        for action in actions:
            p = sub.add_parser(action)
            p.add_argument('--in', dest='in_path', help='Input document')
            p.add_argument('--in2', dest='in2_path', help='Second order document (intersect)')
            p.add_argument('--group', dest='group_path', help='Group document')
            p.add_argument('--profile', dest='profile_path', help='Profile document')
            p.add_argument('--prime', type=int, help='Odd prime p')
            p.add_argument('--precision', type=int, help='Oracle precision (overrides GRADORD_PRECISION)')
            p.add_argument('--out', dest='out_path', help='Write the report to this file')
            p.add_argument('--format', default='text', choices=['text', 'json'], help='Output format')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ConfigError as e:
        print(str(e), file=sys.stderr)
        return 2
    logging.basicConfig(level=settings.log_level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        job = JobSpec(**vars(args))
    except ValidationError as e:
        print(str(e), file=sys.stderr)
        return 2

    status, output = run(job)
    if status != 0:
        print(output, file=sys.stderr)
        return status
    if job.out_path is not None:
        try:
            with open(job.out_path, "w", encoding="utf-8") as handle:
                handle.write(output + "\n")
        except OSError as e:
            print(f"Cannot write {job.out_path}: {e}", file=sys.stderr)
            return 2
    else:
        print(output)
    return 0
