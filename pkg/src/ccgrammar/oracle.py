"""Three-valued verdicts and the congruence-oracle interface."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """yes, no (with a witness) or unknown (with the bound that ran out)."""

    value: Answer
    witness: Any = None
    detail: str = ""

    @classmethod
    def yes(cls, detail: str = "") -> "Verdict":
        return cls(Answer.YES, None, detail)

    @classmethod
    def no(cls, witness, detail: str = "") -> "Verdict":
        return cls(Answer.NO, witness, detail)

    @classmethod
    def unknown(cls, detail: str = "") -> "Verdict":
        return cls(Answer.UNKNOWN, None, detail)

    @property
    def is_yes(self) -> bool:
        return self.value is Answer.YES

    @property
    def is_no(self) -> bool:
        return self.value is Answer.NO

    @property
    def is_unknown(self) -> bool:
        return self.value is Answer.UNKNOWN


class CongruenceOracle:
    """Decides (soundly, possibly incompletely) whether two words are congruent.

    Subclasses set ``kind`` and implement :meth:`decide`.  A yes or no
    answer must be correct for the congruence the oracle stands for.
    """

    kind = "abstract"

    def decide(self, w, x) -> Verdict:
        raise NotImplementedError

    def __call__(self, w, x) -> Verdict:
        return self.decide(tuple(w), tuple(x))
