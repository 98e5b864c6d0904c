"""Task load requirements checked against a robot's capability envelope."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from .robot_model import RobotSpec
from .statics import KINDS, UnboundedCapability, WorkspaceError, capability

SCHEMA = "taskreq-v1"


class RequirementFileError(ValueError):
    pass


@dataclass(frozen=True)
class TaskRequirement:
    """A load the robot must sustain. ``location`` is a height for forces and a
    reach for payloads (``None`` means full reach)."""

    name: str
    kind: str
    magnitude: float
    location: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.magnitude >= 0:
            raise ValueError("magnitude must be >= 0")
        if self.kind != "payload" and self.location is None:
            raise ValueError(f"{self.kind} requirement {self.name!r} needs a height")

    @property
    def unit(self) -> str:
        return "kg" if self.kind == "payload" else "N"


@dataclass(frozen=True)
class FeasibilityVerdict:
    requirement: TaskRequirement
    capability: float
    reason: str = ""

    @property
    def margin(self) -> float:
        return self.capability - self.requirement.magnitude

    @property
    def passed(self) -> bool:
        return self.margin >= 0


@dataclass(frozen=True)
class ManifestResult:
    verdicts: tuple[FeasibilityVerdict, ...]

    @property
    def n_pass(self) -> int:
        return sum(v.passed for v in self.verdicts)

    @property
    def n_fail(self) -> int:
        return len(self.verdicts) - self.n_pass

    @property
    def all_passed(self) -> bool:
        return self.n_fail == 0

    def summary(self) -> str:
        return f"{self.n_pass}/{len(self.verdicts)} passed"


def check_task(spec: RobotSpec, req: TaskRequirement) -> FeasibilityVerdict:
    try:
        value = capability(spec, req.kind, req.location)
    except WorkspaceError:
        return FeasibilityVerdict(req, 0.0, "unreachable")
    except UnboundedCapability:
        return FeasibilityVerdict(req, math.inf, "unbounded")
    return FeasibilityVerdict(req, value)


def check_manifest(spec: RobotSpec, reqs: Iterable[TaskRequirement]) -> ManifestResult:
    verdicts = []
    for req in reqs:
        try:
            verdicts.append(check_task(spec, req))
        except (ValueError, ArithmeticError) as exc:
            verdicts.append(FeasibilityVerdict(req, 0.0, f"error: {exc}"))
    return ManifestResult(tuple(verdicts))


def requirement_from_dict(item: Mapping[str, Any], index: int = 0) -> TaskRequirement:
    allowed = {"name", "kind", "magnitude", "height", "reach"}
    unknown = sorted(set(item) - allowed)
    if unknown:
        raise RequirementFileError(f"requirements[{index}]: unknown key(s): {', '.join(unknown)}")
    try:
        kind = item["kind"]
        magnitude = float(item["magnitude"])
    except (KeyError, TypeError, ValueError) as exc:
        raise RequirementFileError(f"requirements[{index}]: bad or missing field {exc}") from None
    location = item.get("reach") if kind == "payload" else item.get("height")
    try:
        return TaskRequirement(str(item.get("name", f"req{index}")), kind, magnitude,
                               None if location is None else float(location))
    except (TypeError, ValueError) as exc:
        raise RequirementFileError(f"requirements[{index}]: {exc}") from None


def load_requirements(path: str | Path) -> list[TaskRequirement]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RequirementFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise RequirementFileError(f"{path}: expected an object with schema {SCHEMA!r}")
    unknown = sorted(set(doc) - {"schema", "requirements", "notes"})
    if unknown:
        raise RequirementFileError(f"{path}: unknown key(s): {', '.join(unknown)}")
    return [requirement_from_dict(item, i) for i, item in enumerate(doc.get("requirements", []))]
