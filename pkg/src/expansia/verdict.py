"""Three-valued outcomes shared by every bounded search."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union


@dataclass(frozen=True)
class Certified:
    """The property holds; ``reason`` says why in replayable form."""

    constant: Fraction | None = None
    depth: int | None = None
    reason: dict[str, Any] = field(default_factory=dict)
    numeric: bool = False

    kind = "certified"
    exit_code = 0


@dataclass(frozen=True)
class Falsified:
    """A concrete witness against the property.

    ``exact`` is False when the witness only survived a bounded search
    (a candidate, not a proof).
    """

    witness: tuple
    depth: int | None = None
    constant: Fraction | None = None
    max_separation: Fraction | None = None
    exact: bool = True
    reason: dict[str, Any] = field(default_factory=dict)

    kind = "falsified"
    exit_code = 1


@dataclass(frozen=True)
class InconclusiveAtDepth:
    depth: int | None
    note: str = ""

    kind = "inconclusive"
    exit_code = 2


Verdict = Union[Certified, Falsified, InconclusiveAtDepth]
