from pydantic import BaseModel, Field, model_validator
from typing import Any, Dict, List, Optional


class CheckEntry(BaseModel):
    name: str = Field(..., description="Dotted check identifier, e.g. 'eigenbasis_chain.gelbrich_dominates_eigenbasis'.")
    passed: bool = Field(..., description="Exactly lhs <= rhs + tolerance.")
    lhs: float
    rhs: float
    tolerance: float = Field(..., ge=0.0)

    # Pydantic V2 model configuration
    model_config = {
        "from_attributes": True,  # built straight from pipelines.verification.Check
        "allow_inf_nan": False,
    }

    @model_validator(mode="after")
    def passed_matches_comparison(self) -> "CheckEntry":
        if self.passed != (self.lhs <= self.rhs + self.tolerance):
            raise ValueError(f"Check '{self.name}' has passed={self.passed} inconsistent with lhs/rhs/tolerance")
        return self


class EmpiricalSection(BaseModel):
    n: int = Field(..., ge=1, description="Draws per law and trial.")
    seed: int = Field(..., ge=0)
    generator: str = Field(..., examples=["gaussian"])
    df: Optional[float] = Field(None, description="Student-t degrees of freedom; null for Gaussian.")
    target: str = Field("elliptical", description="'elliptical' or 'mixture' for the second law.")
    trials: int = Field(..., ge=1)
    value: float = Field(..., description="Mean empirical W2 over trials.")
    values: List[float] = Field(default_factory=list, description="Per-trial empirical W2.")
    min: float
    max: float
    gelbrich_centered: List[float] = Field(default_factory=list,
                                           description="Per-trial Gelbrich bound of the centered sample covariances.")

    model_config = {"allow_inf_nan": False}


class ReportDocument(BaseModel):
    command: str = Field(..., examples=["bounds"])
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Dims, file paths and flags of the invocation.")
    closed_form: Optional[float] = None
    gelbrich: Optional[float] = None
    eigenbasis_bound: Optional[float] = None
    diag_bound: Optional[float] = None
    rotated_diag: List[float] = Field(default_factory=list)
    minimizer: Optional[List[List[float]]] = None
    empirical: Optional[EmpiricalSection] = None
    checks: List[CheckEntry] = Field(default_factory=list)

    model_config = {"allow_inf_nan": False}

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def verify_report(seed: int, quick: bool, checks: List[Any]) -> ReportDocument:
    """Wrap verification checks; the inputs carry no timestamps so reruns are byte-identical."""
    return ReportDocument(
        command="verify",
        inputs={"seed": int(seed), "quick": bool(quick)},
        checks=[CheckEntry.model_validate(check) for check in checks],
    )
