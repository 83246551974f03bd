"""
Pydantic models for gradord documents: input files and machine-readable reports.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, validator

from gradord.core.ideal_arith import IdealBackend

# ============================================================================
# Order documents
# ============================================================================

class IdealMatrixDocument(BaseModel):
    blocks: List[int] = Field(..., description="Block sizes n_1..n_t")
    backend: IdealBackend
    ideals: List[List[str]] = Field(..., description="t x t matrix of ideal strings")

    @validator('blocks')
    def validate_blocks(cls, v):
        if not v:
            raise ValueError("At least one block is required")
        for size in v:
            if size < 1:
                raise ValueError(f"Block sizes must be positive (got {size})")
        return v


class OrderDocument(IdealMatrixDocument):
    d_omega: str = Field("1", description="Inverse different of the coefficient ring")


# ============================================================================
# Group documents
# ============================================================================

class CharacterDocument(BaseModel):
    name: str
    degree: int
    values: List[str] = Field(..., description="Cyclotomic literals 'N:c0,c1,...' per class")
    schur_index: int = 1

    @validator('degree', 'schur_index')
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError(f"Degrees and Schur indices must be positive (got {v})")
        return v


class GroupDocument(BaseModel):
    """
    A finite group with its character table.

    Either ``bundled`` names a library group (C<n>, S3, D4, Q8, A4) or the
    multiplication table, classes and characters are given explicitly.
    """
    name: Optional[str] = None
    bundled: Optional[str] = None
    multiplication: Optional[List[List[int]]] = None
    classes: Optional[List[List[int]]] = None
    characters: Optional[List[CharacterDocument]] = None
    automorphism: Optional[List[int]] = None
    character: Optional[int] = Field(None, ge=0, description="Row index of eta for the invariants command")

    @validator('characters', always=True)
    def validate_source(cls, v, values):
        if values.get('bundled') is None:
            if values.get('multiplication') is None or values.get('classes') is None or v is None:
                raise ValueError("Give either 'bundled' or all of 'multiplication', 'classes' and 'characters'")
        return v


# ============================================================================
# Iwasawa documents
# ============================================================================

class ChiProfile(BaseModel):
    name: str = "chi"
    prime: int = 3
    eta_degree: int = Field(..., ge=1)
    s_eta: int = Field(1, ge=1)
    w_chi: int = Field(1, ge=1)
    v_chi: int = Field(1, ge=1)
    e_eta_chi: int = Field(1, ge=0)
    d_eta_chi: int = Field(0, ge=0)
    d_chi_F: int = Field(0, ge=0)
    ram_F_chi: int = Field(1, ge=1)
    order_H: int = Field(..., ge=1)
    is_direct_product: bool = False
    chi_degree: Optional[int] = None

    class Config:
        frozen = True


class ProfileDocument(BaseModel):
    profiles: List[ChiProfile]


class AbelianFieldSpec(BaseModel):
    """
    The fixed field in Q_p(zeta_N) of the subgroup generated by ``fixing``
    (intersected with the decomposition group at p).
    """
    level: int = Field(..., ge=1)
    prime: int
    fixing: List[int] = Field(default_factory=list)

    class Config:
        frozen = True


class TowerDocument(BaseModel):
    layers: List[AbelianFieldSpec]

    @validator('layers')
    def validate_layers(cls, v):
        if len(v) != 3:
            raise ValueError(f"A tower has exactly three layers: lower, middle, upper (got {len(v)})")
        return v


# ============================================================================
# Reports
# ============================================================================

class ViolationReport(BaseModel):
    valid: bool
    condition: Optional[str] = None
    indices: Optional[List[int]] = None
    message: Optional[str] = None


class OrderReport(BaseModel):
    command: str
    order: Optional[OrderDocument] = None
    matrix: Optional[IdealMatrixDocument] = None
    validation: Optional[ViolationReport] = None
    flag: Optional[bool] = None
    detail: Optional[str] = None
    quotient_blocks: Optional[List[int]] = None


class OrbitReport(BaseModel):
    prime: int
    level: int
    decomposition_group: List[int]
    inertia: List[int]
    orbits: List[List[int]]


class IdempotentEntry(BaseModel):
    orbit: List[int]
    coefficients: List[str]


class IdempotentReport(BaseModel):
    prime: int
    idempotents: List[IdempotentEntry]


class InvariantsReport(BaseModel):
    prime: int
    character: int
    w_chi: int
    v_chi: int
    s_chi: int
    tau: int


class OracleOrbit(BaseModel):
    orbit: List[int]
    valuation: int
    ramification_index: int
    residue_degree: int


class OracleReport(BaseModel):
    prime: int
    precision: int
    orbits: List[OracleOrbit]


class ConductorRow(BaseModel):
    name: str
    r_chi: int
    s_chi: int
    coefficient_valuation: int
    d_chi_F: int
    pi_exponent: int
    p_prime_exponent: int
    n_chi: Optional[int] = None
    ideal: str


class ConductorReport(BaseModel):
    rows: List[ConductorRow]


class TowerReport(BaseModel):
    lhs: int
    rhs: int
    holds: bool
    layer_differents: Dict[str, int]
    hilbert_agrees: bool
    cyclotomic_oracle_agrees: Optional[bool] = None
