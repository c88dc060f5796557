from __future__ import annotations

import enum
from dataclasses import dataclass

from .errreal import ErrReal


class Status(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    INCONCLUSIVE = "Inconclusive"
    SKIPPED = "Skipped"
    ERRORED = "Errored"


@dataclass(frozen=True)
class Verdict:
    """Outcome of an inequality check; ``slack`` >= 0 means the inequality holds."""

    status: Status
    slack: ErrReal | None = None
    detail: str = ""

    @classmethod
    def from_slack(cls, slack: ErrReal, detail: str = "") -> "Verdict":
        if slack.is_positive():
            status = Status.PASS
        elif slack.is_negative():
            status = Status.FAIL
        else:
            status = Status.INCONCLUSIVE
        return cls(status, slack, detail)

    @classmethod
    def vacuous(cls, detail: str = "vacuous") -> "Verdict":
        return cls(Status.PASS, None, detail)

    @classmethod
    def skipped(cls, detail: str = "") -> "Verdict":
        return cls(Status.SKIPPED, None, detail)

    @classmethod
    def errored(cls, exc: BaseException) -> "Verdict":
        return cls(Status.ERRORED, None, f"{type(exc).__name__}: {exc}" if str(exc) else type(exc).__name__)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS
