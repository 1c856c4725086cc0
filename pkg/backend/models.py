"""
Request models for the CLI, validated with pydantic.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from services.core.errors import SizeCapExceededError, ValidationError

OutputKind = Literal["json", "csv", "svg"]


def parse_n_range(text: str) -> Tuple[int, int]:
    """'6..16' -> (6, 16), inclusive"""
    lo, sep, hi = str(text).partition("..")
    if not sep:
        raise ValidationError(f"--n expects a range like 6..16, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError as e:
        raise ValidationError(f"--n bounds must be integers, got {text!r}") from e


def parse_outputs(text: str) -> List[str]:
    return [part.strip() for part in str(text).split(",") if part.strip()]


class AnalysisRequest(BaseModel):
    """One CLI analysis: where the symbol comes from, which n, which outputs"""

    example: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    symbol_file: Optional[str] = None
    n_min: int = 6
    n_max: int = 16
    tol: Optional[float] = None
    outputs: List[OutputKind] = Field(default_factory=lambda: ["json"])
    out_dir: str = "reports"

    @field_validator("tol")
    @classmethod
    def tol_positive(cls, v):
        if v is not None and v <= 0:
            raise ValueError("tolerance must be positive")
        return v

    @model_validator(mode="after")
    def check_source_and_range(self):
        if (self.example is None) == (self.symbol_file is None):
            raise ValueError("give exactly one of --example or --symbol-file")
        if self.n_min < 3:
            raise ValueError(f"n_min must be at least 3, got {self.n_min}")
        if self.n_min >= self.n_max:
            raise ValueError(f"n_min must be below n_max, got {self.n_min}..{self.n_max}")
        return self

    @property
    def n_values(self) -> range:
        return range(self.n_min, self.n_max + 1)

    def check_size_cap(self, block_size: int, size_cap: int) -> None:
        """n_max * N must fit under the dense size cap"""
        if self.n_max * block_size > size_cap:
            raise SizeCapExceededError(
                f"n_max={self.n_max} with block size {block_size} exceeds the size cap {size_cap}",
                {"n_max": self.n_max, "block_size": block_size, "size_cap": size_cap},
            )
