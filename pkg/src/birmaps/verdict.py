"""Three-valued answers with evidence."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {"yes": 0, "no": 1, "inconclusive": 2}[self.value]


@dataclass
class Verdict:
    answer: Answer
    evidence: dict = field(default_factory=dict)
    budget_spent: dict = field(default_factory=dict)

    @property
    def yes(self) -> bool:
        return self.answer is Answer.YES

    @property
    def no(self) -> bool:
        return self.answer is Answer.NO

    @property
    def inconclusive(self) -> bool:
        return self.answer is Answer.INCONCLUSIVE

    def __bool__(self):
        raise TypeError("a Verdict is three-valued; test .yes / .no / .inconclusive")


def yes(**evidence) -> Verdict:
    return Verdict(Answer.YES, evidence)


def no(**evidence) -> Verdict:
    return Verdict(Answer.NO, evidence)


def inconclusive(reason: str, spent: dict | None = None, **evidence) -> Verdict:
    ev = {"reason": reason}
    ev.update(evidence)
    return Verdict(Answer.INCONCLUSIVE, ev, spent or {})
