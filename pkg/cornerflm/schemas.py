from fractions import Fraction
from typing import Dict, List, Optional

import mpmath
from pydantic import BaseModel, Field

from .models import Classification, Geometry, OutputFormat, Target

SCHEMA_VERSION = "1"


def rational(value: Optional[Fraction]) -> Optional[str]:
    if value is None:
        return None
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def decimal(value, digits: int = 20) -> Optional[str]:
    """Decimal string of an mpmath (or plain) number; complex values keep both parts."""
    if value is None:
        return None

    return mpmath.nstr(value, digits)


# Run configuration
class RunConfig(BaseModel):
    model: str = Field(..., min_length=1)
    geometry: Optional[Geometry] = None
    cutoff: Optional[int] = Field(None, ge=2)
    boundary: str = "free"
    target: Target = Target.CORNER
    order: Optional[str] = None
    output_format: OutputFormat = OutputFormat.PRETTY
    cache_dir: str
    use_cache: bool = True
    threads: int = Field(1, ge=1)


# Productize schemas
class ProductFormSchema(BaseModel):
    prefactor: Dict
    g: int
    a: int
    beta: List[str]
    gamma: List[str]


class ProductFormReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    run: RunConfig
    guaranteed_order: str
    period: int
    period_q: str
    repeats: int
    table_period: Optional[int] = None
    product: ProductFormSchema
    display: str
    catalog_agrees: Optional[bool] = None
    catalog_first_discrepancy: Optional[str] = None


class FitFailureReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    run: RunConfig
    guaranteed_order: str
    reason: str
    indices_available: int
    indices_needed: int
    best_period: Optional[int] = None
    residues_fitted: int = 0
    alphas: List[str] = []
    catalog_agrees: Optional[bool] = None
    catalog_first_discrepancy: Optional[str] = None


# Asymptotics schemas
class AsymptoticProfileReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    classification: Classification
    C_over_pi2: str
    zeta3_coeff: str
    a_log: str
    finite_value: Optional[str] = None
    prefactor_A: Optional[str] = None
    numeric_A: Optional[str] = None
    numeric_A_error: Optional[str] = None
    central_charge: Optional[str] = None
    corners: List[str] = []
    xi_coefficient_over_pi2: Optional[str] = None
    xi_prefactor: Optional[str] = None
    xi_by_angle: Dict[str, str] = {}


# Verification schemas
class IdentityReportSchema(BaseModel):
    model: str
    max_order_checked: str
    agree: bool
    first_discrepancy: Optional[str] = None
    phase_note: str = ""


class LimitReportSchema(BaseModel):
    key: str
    expression: str
    closed_value: str
    product_value: str
    agree: bool
    reproduced: bool
    note: str = ""


class VerifyReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    order: str
    reports: List[IdentityReportSchema]
    log_product_identity: Optional[bool] = None
    limits: List[LimitReportSchema] = []


# Cache schemas
class CacheInfo(BaseModel):
    directory: str
    enabled: bool
    entries: int = Field(0, ge=0)
    bytes: int = Field(0, ge=0)
