from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field

from .Config import DEFAULT_TOLERANCES, SCHEMA_VERSION, TOOL_VERSION, Tolerances

Status = Literal["pass", "fail", "not-checkable", "flagged"]


class Verdict(BaseModel):
    """Outcome of one axiom or clause; every fail carries a witness."""

    model_config = ConfigDict(frozen=True)

    name: str
    status: Status
    witness: list[Any] | None = None
    labels: list[str] | None = None
    detail: str | None = None

    @classmethod
    def passed(cls, name: str, detail: str | None = None) -> "Verdict":
        return cls(name=name, status="pass", detail=detail)

    @classmethod
    def failed(
        cls,
        name: str,
        witness: list[Any],
        detail: str,
        labels: list[str] | None = None,
    ) -> "Verdict":
        return cls(name=name, status="fail", witness=witness, detail=detail, labels=labels)

    @classmethod
    def not_checkable(cls, name: str, reason: str) -> "Verdict":
        return cls(name=name, status="not-checkable", detail=reason)

    @classmethod
    def flagged(
        cls, name: str, witness: list[Any], detail: str, labels: list[str] | None = None
    ) -> "Verdict":
        return cls(name=name, status="flagged", witness=witness, detail=detail, labels=labels)

    @property
    def ok(self) -> bool:
        return self.status != "fail"


class Report(BaseModel):
    """Fields every emitted report carries."""

    tool_version: str = TOOL_VERSION
    schema_version: int = SCHEMA_VERSION
    tolerances: Tolerances = Field(default_factory=lambda: DEFAULT_TOLERANCES)

    @property
    def ok(self) -> bool:
        return True

    def summary(self) -> str:
        return f"{type(self).__name__}: {'ok' if self.ok else 'FAILED'}"


class AxiomReport(Report):
    check: str
    space: str
    verdicts: list[Verdict]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def status(self) -> Status:
        statuses = [v.status for v in self.verdicts]
        if "fail" in statuses:
            return "fail"
        if "flagged" in statuses:
            return "flagged"
        if statuses and all(s == "not-checkable" for s in statuses):
            return "not-checkable"
        return "pass"

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def first_failure(self) -> Verdict | None:
        return next((v for v in self.verdicts if v.status == "fail"), None)

    def summary(self) -> str:
        parts = ", ".join(f"{v.name}={v.status}" for v in self.verdicts)
        return f"{self.check} on {self.space}: {self.status} ({parts})"
