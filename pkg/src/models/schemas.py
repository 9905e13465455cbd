from typing import Annotated, Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.field.field_core import parse_prime_power
from src.models.models import OrthSumDecomposition, SpectrumEntry, TriangleInvariant, UnitSumDecomposition
from src.utils.errors import FieldError

OutputFormat = Literal["json", "csv", "pretty", "xlsx"]


class RunConfig(BaseModel):
    command: str
    q: int
    p: int = 0
    n: int = 0
    d: int = 2
    output_format: OutputFormat = "json"
    out: Optional[str] = None
    jobs: int = Field(default=1, ge=1)
    verbosity: int = 0
    dims: Optional[list[Annotated[int, Field(ge=2)]]] = None
    deep: bool = False

    @field_validator("q")
    @classmethod
    def q_is_odd_prime_power(cls, value: int) -> int:
        try:
            parse_prime_power(value)
        except FieldError as e:
            raise ValueError(str(e)) from e
        return value

    @model_validator(mode="after")
    def fill_characteristic(self):
        self.p, self.n = parse_prime_power(self.q)
        return self


class LedgerRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    theorem: str
    q: int
    d: int
    expected: Any = None
    observed: Any = None
    passed: bool = Field(alias="pass")
    detail: Optional[str] = None


class UnitSumRecord(BaseModel):
    q: int
    target: list
    parts: Optional[list] = None
    count: int
    bound: int
    verified: bool

    @classmethod
    def from_decomposition(cls, decomposition: UnitSumDecomposition, bound: int, emit_parts: bool = True):
        return cls(
            q=decomposition.target.field.q,
            target=decomposition.target.literal(),
            parts=[part.literal() for part in decomposition.parts] if emit_parts else None,
            count=decomposition.count,
            bound=bound,
            verified=decomposition.verify(),
        )


class OrthSumRecord(BaseModel):
    q: int
    d: int
    target: list
    parts: Optional[list] = None
    count: int
    declared_count: int
    verified: bool

    @classmethod
    def from_decomposition(cls, decomposition: OrthSumDecomposition, emit_parts: bool = True):
        return cls(
            q=decomposition.target.field.q,
            d=decomposition.target.dim,
            target=decomposition.target.literal(),
            parts=[part.matrix.literal() for part in decomposition.parts] if emit_parts else None,
            count=decomposition.count,
            declared_count=decomposition.declared_count,
            verified=decomposition.verify(),
        )


class ClassRow(BaseModel):
    q: int
    L1: Any
    L2: Any
    mu: Any

    @classmethod
    def from_invariant(cls, inv: TriangleInvariant):
        L1, L2, mu = inv.literal()
        return cls(q=inv.field.q, L1=L1, L2=L2, mu=mu)


class SpectrumRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    L1: Any
    L2: Any
    mu: Any
    re: float
    im: float
    branch: str
    passed: bool = Field(alias="pass")

    @classmethod
    def from_entry(cls, entry: SpectrumEntry):
        L1, L2, mu = entry.invariant.literal()
        return cls(
            L1=L1,
            L2=L2,
            mu=mu,
            re=round(entry.eigenvalue.real, 9),
            im=round(entry.eigenvalue.imag, 9),
            branch=entry.branch,
            passed=entry.passed,
        )


class OracleRecord(BaseModel):
    q: int
    d: int
    kind: str
    element: Optional[list] = None
    distance: Optional[int] = None
    diameter: Optional[int] = None


class FieldRecord(BaseModel):
    q: int
    p: int
    n: int
    modulus: list[int]
    element: Any = None
    legendre: Optional[int] = None
    sqrt: Optional[list] = None
    trace: Optional[int] = None
    character_re: Optional[float] = None
    character_im: Optional[float] = None
    op: Optional[str] = None
    result: Any = None


class TriangleCountRecord(BaseModel):
    q: int
    count: int
    enumerated: int
    index: int


class TriangleCheckRecord(BaseModel):
    q: int
    check: str
    result: bool
    invariants: Optional[list] = None
    other_invariants: Optional[list] = None


class EigenRow(BaseModel):
    element: list
    re: float
    im: float


class SphereBoundRow(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    m: list
    re: float
    im: float
    bound: float
    passed: bool = Field(alias="pass")
