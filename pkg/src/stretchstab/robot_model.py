"""Robot description, joint state, support polygon and center-of-mass aggregation.

Frame convention used throughout the package: origin at the rear (omni) wheel
contact, ``x`` forward along the centerline toward the drive-wheel axle, ``y``
toward the right drive wheel (the side the arm extends to), ``z`` up. Wheel
contacts sit at wheel centers.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

STANDARD_GRAVITY = 9.807
SCHEMA = "robotspec-v1"
MASS_TOLERANCE = 1e-6

JOINT_NAMES = ("q_a", "q_l", "q_m", "wrist_yaw", "wrist_pitch", "wrist_roll")


class SpecError(ValueError):
    """Raised when a robot description is unusable for the requested operation."""


class ConfigurationError(ValueError):
    """Raised when a joint state lies outside the robot's joint limits."""


class Mode(enum.Enum):
    NAVIGATION = "navigation"
    MANIPULATION = "manipulation"


@dataclass(frozen=True)
class Link:
    mass: float
    com: tuple[float, float, float]


@dataclass(frozen=True)
class RobotSpec:
    """Geometric and mass description of a Stretch-style robot.

    ``D`` is the arm reach beyond the right drive-wheel contact and ``t`` the
    setback of the arm's midline behind the drive axle. ``reach_offset`` moves
    the datum from which reach is measured outward from the contact (0 keeps
    the contact-based convention of the closed forms). ``arm_com_coefficient``
    is the fraction of arm extension by which the arm's own COM travels.
    """

    m_r: float
    w: float
    l: float
    c: float
    t: float
    D: float
    H: float
    g: float = STANDARD_GRAVITY
    n_segments: int = 1
    m_arm: float = 0.0
    base_links: tuple[Link, ...] = ()
    joint_limits: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    arm_com_coefficient: float = 0.5
    reach_offset: float = 0.0

    def limits(self, joint: str) -> tuple[float, float]:
        """Joint range with defaults filled in from the workspace geometry."""
        if joint in self.joint_limits:
            lo, hi = self.joint_limits[joint]
            return float(lo), float(hi)
        defaults = {
            "q_a": (0.0, self.D),
            "q_l": (0.0, self.H),
            "q_m": (-math.inf, math.inf),
            "wrist_yaw": (0.0, math.radians(330.0)),
            "wrist_pitch": (-math.pi / 2, math.pi / 2),
            "wrist_roll": (-math.pi, math.pi),
        }
        return defaults[joint]

    @property
    def D_joint(self) -> float:
        return self.limits("q_a")[1]

    @property
    def lumped(self) -> bool:
        return not self.base_links

    def with_values(self, **changes: Any) -> "RobotSpec":
        return replace(self, **changes)

    def check(self) -> None:
        report = validate_spec(self)
        if not report.ok:
            raise SpecError("; ".join(report.messages))


@dataclass(frozen=True)
class Configuration:
    q_a: float = 0.0
    q_l: float = 0.0
    q_m: float = 0.0
    wrist_yaw: float = 0.0
    wrist_pitch: float = 0.0
    wrist_roll: float = 0.0
    mode: Mode = Mode.NAVIGATION


@dataclass(frozen=True)
class Violation:
    field: str
    value: Any
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def messages(self) -> list[str]:
        return [f"{v.message} (got {v.field}={v.value!r})" for v in self.violations]

    def fields(self) -> list[str]:
        return [v.field for v in self.violations]


@dataclass(frozen=True)
class SupportPolygon:
    """Counterclockwise ground-contact polygon in the floor plane."""

    vertices: tuple[tuple[float, float], ...]
    alpha: float | None = None

    @property
    def beta(self) -> float | None:
        return None if self.alpha is None else math.pi / 2 - self.alpha

    @property
    def edges(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def signed_area(self) -> float:
        v = np.asarray(self.vertices, dtype=float)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def is_convex(self) -> bool:
        """True for a strictly convex counterclockwise polygon."""
        n = len(self.vertices)
        if n < 3:
            return False
        v = np.asarray(self.vertices, dtype=float)
        d1 = np.roll(v, -1, axis=0) - v
        d2 = np.roll(d1, -1, axis=0)
        turns = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        return bool(np.all(turns > 0))


@dataclass(frozen=True)
class ComEstimate:
    mass: float
    position: tuple[float, float, float]


def _finite(x: Any) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def validate_spec(spec: RobotSpec) -> ValidationReport:
    """Collect every violated invariant of ``spec``; empty report iff valid."""
    out: list[Violation] = []

    def bad(name: str, message: str) -> None:
        out.append(Violation(name, getattr(spec, name), message))

    for name in ("m_r", "w", "l", "c", "t", "D", "H", "g", "m_arm",
                 "arm_com_coefficient", "reach_offset"):
        if not _finite(getattr(spec, name)):
            bad(name, f"{name} must be a finite number")
    if out:
        return ValidationReport(tuple(out))

    for name in ("m_r", "w", "l", "g", "D", "H"):
        if getattr(spec, name) <= 0:
            bad(name, f"{name} must be > 0")
    if spec.c <= 0:
        bad("c", "c must be > 0")
    if spec.c >= spec.l:
        bad("c", "c must be < l")
    if spec.t < 0:
        bad("t", "t must be >= 0")
    if not isinstance(spec.n_segments, int) or spec.n_segments < 1:
        bad("n_segments", "n_segments must be an integer >= 1")
    if spec.m_arm < 0:
        bad("m_arm", "m_arm must be >= 0")
    elif spec.m_arm > spec.m_r:
        bad("m_arm", "m_arm must be <= m_r")
    if spec.reach_offset < 0:
        bad("reach_offset", "reach_offset must be >= 0")

    if spec.base_links:
        masses = [link.mass for link in spec.base_links]
        if any(not _finite(m) or m < 0 for m in masses):
            bad("base_links", "base link masses must be finite and >= 0")
        elif any(not all(_finite(x) for x in link.com) or len(link.com) != 3
                 for link in spec.base_links):
            bad("base_links", "base link COMs must be finite 3-vectors")
        elif abs(sum(masses) + spec.m_arm - spec.m_r) > MASS_TOLERANCE:
            out.append(Violation("base_links", sum(masses),
                                 "base link masses plus m_arm must equal m_r"))

    for joint, bounds in spec.joint_limits.items():
        if joint not in JOINT_NAMES:
            out.append(Violation("joint_limits", joint, f"unknown joint {joint!r}"))
            continue
        lo, hi = bounds
        if not lo <= hi:
            out.append(Violation("joint_limits", (lo, hi), f"{joint} min must be <= max"))
    return ValidationReport(tuple(out))


# edge indices of the support triangle returned by support_polygon
LEFT_EDGE, FRONT_EDGE, RIGHT_EDGE = 0, 1, 2


def support_polygon(spec: RobotSpec) -> SupportPolygon:
    """Support triangle: rear contact at the origin, drive contacts on the axle line."""
    if not spec.w > 0 or not spec.l > 0:
        raise SpecError(f"degenerate support triangle (w={spec.w}, l={spec.l})")
    half = spec.w / 2
    verts = ((0.0, 0.0), (spec.l, -half), (spec.l, half))
    return SupportPolygon(verts, alpha=math.atan(spec.w / (2 * spec.l)))


def arm_position(spec: RobotSpec, q_a: float, q_l: float) -> tuple[float, float, float]:
    """COM of the moving arm assembly; the arm midline sits ``t`` behind the axle."""
    return (spec.l - spec.t, spec.arm_com_coefficient * q_a, q_l)


def check_configuration(spec: RobotSpec, config: Configuration) -> None:
    for joint in JOINT_NAMES:
        value = getattr(config, joint)
        lo, hi = spec.limits(joint)
        if not _finite(value) or not lo <= value <= hi:
            raise ConfigurationError(f"{joint}={value} outside joint limits [{lo}, {hi}]")


def combine(bodies: Sequence[tuple[float, Sequence[float]]]) -> ComEstimate:
    """Mass-weighted average of point masses."""
    masses = np.array([m for m, _ in bodies], dtype=float)
    total = float(masses.sum())
    if total <= 0:
        raise SpecError("total mass must be > 0")
    pos = np.array([p for _, p in bodies], dtype=float)
    com = masses @ pos / total
    return ComEstimate(total, tuple(float(x) for x in com))


def aggregate_com(spec: RobotSpec, config: Configuration | None = None) -> ComEstimate:
    """Configuration-dependent COM of the whole robot.

    Lumped mode (no base links) places the fixed mass so that the retracted
    arm (``q_a = 0``) reproduces the centerline COM at distance ``c``. With
    ``m_arm = 0`` that is simply ``(c, 0, 0)`` for every configuration.
    """
    config = config or Configuration()
    check_configuration(spec, config)
    arm = arm_position(spec, config.q_a, config.q_l)

    if spec.base_links:
        bodies = [(link.mass, link.com) for link in spec.base_links]
        if spec.m_arm > 0:
            bodies.append((spec.m_arm, arm))
        return combine(bodies)

    if spec.m_arm == 0:
        return ComEstimate(spec.m_r, (spec.c, 0.0, 0.0))
    m_base = spec.m_r - spec.m_arm
    if m_base <= 0:
        return ComEstimate(spec.m_r, arm)
    retracted = arm_position(spec, 0.0, config.q_l)
    base = (
        (spec.m_r * spec.c - spec.m_arm * retracted[0]) / m_base,
        -spec.m_arm * retracted[1] / m_base,
        -spec.m_arm * retracted[2] / m_base,
    )
    com = combine([(m_base, base), (spec.m_arm, arm)])
    # height is not modeled in lumped mode
    return ComEstimate(com.mass, (com.position[0], com.position[1], 0.0))


# -- robotspec-v1 files ----------------------------------------------------

_FLOAT_KEYS = ("m_r", "g", "w", "l", "c", "t", "D", "H", "m_arm",
               "arm_com_coefficient", "reach_offset")
_ALLOWED_KEYS = {"schema", "name", "n_segments", "base_links", "joint_limits", *_FLOAT_KEYS}
_REQUIRED_KEYS = ("m_r", "w", "l", "c", "t", "D", "H")


class SpecFileError(ValueError):
    """Malformed robot spec document (parse or schema error)."""


def spec_from_dict(doc: Mapping[str, Any]) -> RobotSpec:
    if not isinstance(doc, Mapping):
        raise SpecFileError("top level must be an object")
    unknown = sorted(set(doc) - _ALLOWED_KEYS)
    if unknown:
        raise SpecFileError(f"unknown key(s): {', '.join(unknown)}")
    if doc.get("schema", SCHEMA) != SCHEMA:
        raise SpecFileError(f"field 'schema': expected {SCHEMA!r}, got {doc['schema']!r}")
    missing = [k for k in _REQUIRED_KEYS if k not in doc]
    if missing:
        raise SpecFileError(f"missing required field(s): {', '.join(missing)}")

    kwargs: dict[str, Any] = {}
    for key in _FLOAT_KEYS:
        if key in doc:
            value = doc[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SpecFileError(f"field {key!r}: expected a number, got {value!r}")
            kwargs[key] = float(value)
    if "n_segments" in doc:
        n = doc["n_segments"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise SpecFileError(f"field 'n_segments': expected an integer, got {n!r}")
        kwargs["n_segments"] = n
    links = []
    for i, item in enumerate(doc.get("base_links", [])):
        try:
            mass, com = float(item["mass"]), tuple(float(x) for x in item["com"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecFileError(f"field 'base_links[{i}]': {exc}") from None
        if len(com) != 3:
            raise SpecFileError(f"field 'base_links[{i}].com': expected 3 coordinates")
        links.append(Link(mass, com))
    kwargs["base_links"] = tuple(links)
    limits = {}
    for joint, bounds in dict(doc.get("joint_limits", {})).items():
        if joint not in JOINT_NAMES:
            raise SpecFileError(f"field 'joint_limits': unknown joint {joint!r}")
        try:
            lo, hi = (float(b) for b in bounds)
        except (TypeError, ValueError):
            raise SpecFileError(f"field 'joint_limits.{joint}': expected [min, max]") from None
        limits[joint] = (lo, hi)
    kwargs["joint_limits"] = limits
    return RobotSpec(**kwargs)


def spec_to_dict(spec: RobotSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {"schema": SCHEMA}
    for f in fields(spec):
        value = getattr(spec, f.name)
        if f.name == "base_links":
            if value:
                doc[f.name] = [{"mass": k.mass, "com": list(k.com)} for k in value]
        elif f.name == "joint_limits":
            if value:
                doc[f.name] = {k: list(v) for k, v in value.items()}
        else:
            doc[f.name] = value
    return doc


def load_spec(path: str | Path) -> RobotSpec:
    """Read a ``robotspec-v1`` JSON document; raises SpecFileError with location."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return spec_from_dict(doc)
    except SpecFileError as exc:
        raise SpecFileError(f"{path}: {exc}") from None


def stretch_re1() -> RobotSpec:
    """Measured Stretch RE1 parameters (wheel centers, lumped COM)."""
    return RobotSpec(m_r=23.0, g=STANDARD_GRAVITY, w=0.315, l=0.24, c=0.16,
                     t=0.005, D=0.6925, H=1.125, n_segments=4)
