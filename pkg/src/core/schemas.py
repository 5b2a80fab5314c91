from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.exceptions import ParameterValidationError

Point = Tuple[float, float]


class Family(str, Enum):
    ISOTROPIC = "isotropic_frac_laplacian"
    HEAT = "heat_operator"
    SEPARABLE = "separable"
    PAIR_DIFFERENCE = "pair_difference"
    SYNTHETIC = "synthetic"

    @classmethod
    def parse(cls, text: str) -> "Family":
        """Accept the canonical tags plus the short command-line spellings."""
        key = text.strip().lower().replace("-", "_")
        aliases = {"isotropic": cls.ISOTROPIC, "heat": cls.HEAT}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            valid = [f.value for f in cls] + list(aliases)
            raise ParameterValidationError(f"Unknown family '{text}'. Valid options: {valid}")


class InnovationFamily(str, Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    CENTERED_UNIFORM = "centered_uniform"


class RegionTag(str, Enum):
    R11 = "R11"
    R12 = "R12"
    R21 = "R21"
    R22_PLUS = "R22_plus"
    R22_MINUS = "R22_minus"
    R23 = "R23"
    R32 = "R32"
    R33 = "R33"
    SRD_LIKE = "SRD_like"
    BOUNDARY = "boundary"


class ScaleSymbol(str, Enum):
    SIGMA1 = "sigma1"
    SIGMA2 = "sigma2"
    SIGMA1_TILDE = "sigma1_tilde"
    SIGMA2_TILDE = "sigma2_tilde"
    SIGMA_EDGE1 = "sigma_edge1"
    SIGMA_EDGE2 = "sigma_edge2"
    MIXED_EDGE = "mixed_edge"
    V0_KERNEL = "V0_kernel"
    SRD_SUM = "srd_sum"
    SEPARABLE_PRODUCT = "separable_product"


class KernelKind(str, Enum):
    H0 = "h0"
    H1 = "h1"
    H2 = "h2"
    H1_TILDE = "h1_tilde"
    H2_TILDE = "h2_tilde"


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    BALANCED = "balanced"


class ReportFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


# Model description
class ModelSpec(BaseModel):
    """Serializable description of a coefficient model; `build_grid` turns it into arrays."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Family
    d: Optional[float] = None
    theta: Optional[float] = None
    d1: Optional[float] = None
    d2: Optional[float] = None
    q1: Optional[float] = Field(default=None, gt=0)
    q2: Optional[float] = Field(default=None, gt=0)
    angular_constant: float = Field(default=1.0, description="Constant angular function value for synthetic models.")
    R1: int = Field(default=16, ge=1)
    R2: Optional[int] = Field(default=None, ge=1)
    enforce_zero_sum: bool = False

    @field_validator("family", mode="before")
    @classmethod
    def _parse_family(cls, value):
        return Family.parse(value) if isinstance(value, str) else value

    @model_validator(mode="after")
    def _check_required(self) -> "ModelSpec":
        required = {
            Family.ISOTROPIC: ("d",),
            Family.HEAT: ("d", "theta"),
            Family.SEPARABLE: ("d1", "d2"),
            Family.PAIR_DIFFERENCE: (),
            Family.SYNTHETIC: ("q1", "q2"),
        }[self.family]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"family {self.family.value} requires {missing}")
        return self


class InnovationSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    family: InnovationFamily = InnovationFamily.GAUSSIAN
    base_seed: int = Field(default=0, ge=0, lt=2**64)


# Region atlas records
class ModelExponents(BaseModel):
    model_config = ConfigDict(frozen=True)

    q1: float
    q2: float
    Q: float
    H1: float
    H2: float
    H1_tilde: float
    H2_tilde: float
    gamma0: float
    gamma0_edge1: Optional[float] = Field(default=None, description="Only defined for Q < 1.")
    gamma0_edge2: Optional[float] = Field(default=None, description="Only defined for Q < 1.")
    Q_edge1: float
    Q_edge2: float
    Q_tilde1: float
    Q_tilde2: float


class RegionId(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: RegionTag
    boundary_detail: Optional[str] = None


class LimitComponent(BaseModel):
    hurst_pair: Point
    scale_symbol: ScaleSymbol


class LimitDescriptor(BaseModel):
    hurst_pair: Optional[Point] = Field(default=None, description="None for the V0 kernel limit, which is not a sheet.")
    scale_symbol: ScaleSymbol
    branch: Branch
    components: List[LimitComponent] = Field(default_factory=list)

    @field_validator("hurst_pair")
    @classmethod
    def _unit_square(cls, value):
        if value is not None and not all(0.0 <= h <= 1.0 for h in value):
            raise ValueError(f"Hurst pair {value} outside [0,1]^2")
        return value


class PhaseRow(BaseModel):
    inv_q1: float
    inv_q2: float
    region: RegionTag
    Q: float
    Q_edge1: float
    Q_edge2: float
    Q_tilde1: float
    Q_tilde2: float


# Limit quantities
class FbsParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    H_x: float = Field(ge=0.0, le=1.0)
    H_y: float = Field(ge=0.0, le=1.0)


class EdgeSigmas(BaseModel):
    sigma2_edge1: float = Field(ge=0.0)
    sigma2_edge2: float = Field(ge=0.0)
    truncation_bound: float = Field(ge=0.0)
    converges1: bool = True
    converges2: bool = True


class BoundaryCheck(BaseModel):
    """Residual of the boundary-restricted G^2 sum against x sigma^2_edge,1 + y sigma^2_edge,2."""
    x: float
    y: float
    lam: float
    delta: float
    residual: float


class LimitValue(BaseModel):
    quantity: str
    value: float
    abs_error_bound: float
    config_hash: str


# Experiment records
class VarianceEstimate(BaseModel):
    lam: float
    gamma: float
    x: float
    y: float
    n1: int
    n2: int
    var: float
    stderr: float = 0.0
    reps: int = 0
    seed: Optional[int] = None


class SlopeFit(BaseModel):
    gamma: float
    H_hat: float
    stderr: float
    r_squared: float
    residuals: List[float] = Field(default_factory=list)
    lambdas_used: List[float] = Field(default_factory=list)
    H_theory: Optional[float] = None
    estimates: List[VarianceEstimate] = Field(default_factory=list)


class TransitionPoint(BaseModel):
    gamma: float
    H_hat: float
    stderr: float
    H_theory: Optional[float] = None
    abs_diff: Optional[float] = None
    flagged: bool = False


class TransitionReport(BaseModel):
    points: List[TransitionPoint] = Field(default_factory=list)
    detected_kink: Optional[float] = None
    kink_claimed: bool = False
    gamma0_theory: Optional[float] = None


class CovariancePair(BaseModel):
    point1: Point
    point2: Point
    empirical: float
    stderr: float
    exact: Optional[float] = None
    theory: Optional[float] = None
    passed: Optional[bool] = None


class CovarianceReport(BaseModel):
    gamma: float
    lam: float
    reps: int
    H: float
    descriptor: LimitDescriptor
    pairs: List[CovariancePair] = Field(default_factory=list)


class ScanConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    model: ModelSpec
    innovation: InnovationSpec = Field(default_factory=InnovationSpec)
    gamma_grid: List[float] = Field(default_factory=lambda: [1.0])
    lambda_grid: List[float] = Field(default_factory=lambda: [64.0, 128.0, 256.0, 512.0])
    point: Point = (1.0, 1.0)
    reps: int = Field(default=200, ge=2)
    use_exact_variance: bool = True
    threads: int = Field(default=1, ge=1)

    @field_validator("gamma_grid", "lambda_grid")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        if any(v <= 0 for v in values):
            raise ValueError("grid values must be positive")
        return sorted(values)


class CliConfig(BaseModel):
    """Parameter file accepted by every command; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    threads: Optional[int] = Field(default=None, ge=1)
    memory_mb: Optional[int] = Field(default=None, ge=1)
    out: Optional[str] = None
    format: Optional[ReportFormat] = None
    classify_tol: Optional[float] = Field(default=None, gt=0)
    quad_tol: Optional[float] = Field(default=None, gt=0)
    series_tol: Optional[float] = Field(default=None, gt=0)

    model: Optional[ModelSpec] = None
    innovation: Optional[InnovationFamily] = None
    gammas: Optional[List[float]] = None
    lambdas: Optional[List[float]] = None
    point: Optional[Point] = None
    pairs: Optional[List[Tuple[Point, Point]]] = None
    reps: Optional[int] = Field(default=None, ge=2)
    exact: Optional[bool] = None
    T1: Optional[int] = Field(default=None, ge=1)
    T2: Optional[int] = Field(default=None, ge=1)
    replicate: Optional[int] = Field(default=None, ge=0)
    hurst: Optional[Point] = None
    grid_n: Optional[int] = Field(default=None, ge=1)
    delta: Optional[float] = Field(default=None, gt=0)
