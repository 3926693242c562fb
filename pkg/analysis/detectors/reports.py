import os
from enum import Enum
from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from ingress.expressions.chart_file import render_chart
from kernel.exterior import Chart, DiffForm, ExteriorObject


class Verdict(str, Enum):
    CONSTANT = "CONSTANT"
    NOT_CONSTANT = "NOT_CONSTANT"
    CONFORMAL_CONSTANT = "CONFORMAL_CONSTANT"
    INCONCLUSIVE = "INCONCLUSIVE"

    @property
    def exit_code(self) -> int:
        return {
            Verdict.CONSTANT: 0,
            Verdict.CONFORMAL_CONSTANT: 0,
            Verdict.NOT_CONSTANT: 1,
            Verdict.INCONCLUSIVE: 2,
        }[self]


ReasonKind = Literal["obstruction", "theorem", "witness", "screen", "note"]


class Reason(BaseModel):
    """
    One piece of evidence. `theorem` and `witness` reasons may carry a CONSTANT verdict,
    `obstruction` reasons (with a nonzero witness) a NOT_CONSTANT verdict.
    """
    model_config = ConfigDict(frozen=True)

    rule: str
    kind: ReasonKind
    message: str
    witness: str | None = None


class RankReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    point: tuple[Fraction, ...]
    rank_M: int
    rank_M_aug: int
    consistent: bool

    @field_serializer("point")
    def _serialize_point(self, point: tuple[Fraction, ...]) -> list[str]:
        return [str(c) for c in point]


class DetectionReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    schema_version: int = Field(default=1, alias="schema")
    verdict: Verdict
    reasons: list[Reason] = Field(default_factory=list)
    chart: Chart | None = None
    rank_data: list[RankReport] = Field(default_factory=list)

    @field_serializer("chart")
    def _serialize_chart(self, chart: Chart | None) -> str | None:
        return render_chart(chart) if chart is not None else None

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    def is_auditable(self) -> bool:
        """CONSTANT needs a theorem citation or a verified witness; NOT_CONSTANT a nonzero obstruction."""
        if self.verdict == Verdict.CONSTANT:
            return any(reason.kind in ("theorem", "witness") for reason in self.reasons)
        if self.verdict == Verdict.NOT_CONSTANT:
            return any(reason.kind == "obstruction" and reason.witness for reason in self.reasons)
        return True

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def render(self) -> str:
        lines = [f"verdict: {self.verdict.value}"]
        for reason in self.reasons:
            lines.append(f"- [{reason.rule}] {reason.message}")
            if reason.witness is not None:
                lines.append(f"    witness: {reason.witness}")
        if self.chart is not None:
            lines.append("chart:")
            lines += [f"    {line}" for line in render_chart(self.chart).splitlines()]
        if self.rank_data:
            lines.append("rank data:")
            for report in self.rank_data:
                point = ",".join(str(c) for c in report.point)
                status = "consistent" if report.consistent else "INCONSISTENT"
                lines.append(f"    ({point}): rank M = {report.rank_M}, rank M' = {report.rank_M_aug}, {status}")
        return "\n".join(lines)


class DetectConfig(BaseModel):
    """Detection knobs. Environment defaults come from `from_env`; explicit values win."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples: int = Field(default=5, ge=0)
    seed: int = 0
    coefficient_bound: int = Field(default=10, ge=1)
    point: tuple[Fraction, ...] | None = None
    chart: Chart | None = None
    target: ExteriorObject | None = None
    flat_derivation: DiffForm | None = None

    @classmethod
    def from_env(cls, **overrides) -> 'DetectConfig':
        values = {
            "samples": int(os.getenv("CONSTCOEF_SAMPLES", "5")),
            "seed": int(os.getenv("CONSTCOEF_SEED", "0")),
            "coefficient_bound": int(os.getenv("CONSTCOEF_COEFFICIENT_BOUND", "10")),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def base_point(self, n: int) -> tuple[Fraction, ...]:
        if self.point is None:
            return (Fraction(0),) * n
        if len(self.point) != n:
            raise ValueError(f"Base point has {len(self.point)} coordinates, expected {n}")
        return tuple(Fraction(c) for c in self.point)


class Evidence:
    """Reasons and rank data collected while deciding one object."""

    def __init__(self):
        self.reasons: list[Reason] = []
        self.rank_data: list[RankReport] = []

    def add(self, rule: str, kind: ReasonKind, message: str, witness=None) -> Reason:
        reason = Reason(rule=rule, kind=kind, message=message, witness=str(witness) if witness is not None else None)
        self.reasons.append(reason)
        return reason

    def extend(self, report: DetectionReport):
        self.reasons.extend(report.reasons)
        self.rank_data.extend(report.rank_data)

    def report(self, verdict: Verdict, chart: Chart | None = None) -> DetectionReport:
        return DetectionReport(verdict=verdict, reasons=list(self.reasons), chart=chart, rank_data=list(self.rank_data))
