"""Static tipping limits: planar models, support-triangle closed forms and a
general convex-polygon edge-moment engine."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .robot_model import (
    STANDARD_GRAVITY,
    ComEstimate,
    RobotSpec,
    SpecError,
    SupportPolygon,
)

KINDS = ("pull", "push", "backpush", "payload")


class UnboundedCapability(ArithmeticError):
    """The closed form diverges at this location (zero moment arm for the load)."""

    def __init__(self, variable: str, value: float):
        super().__init__(f"unbounded at {variable}={value:g}")
        self.variable = variable
        self.value = value


class WorkspaceError(ValueError):
    """Load location outside the robot's workspace."""


@dataclass(frozen=True)
class PlanarCase:
    """Symbols of the planar free-body diagrams.

    ``d_ra``/``d_rb``: lateral COM distance to the right/left contact,
    ``d_p``: payload arm beyond the right contact, ``d_F``: force height.
    """

    m_r: float
    d_ra: float
    d_rb: float
    d_p: float = 0.0
    d_F: float = 0.0
    g: float = STANDARD_GRAVITY

    @classmethod
    def from_spec(cls, spec: RobotSpec, d_p: float | None = None, d_F: float = 0.0,
                  com_offset: float = 0.0) -> "PlanarCase":
        """Rectangular-base view of ``spec``: COM ``com_offset`` right of center."""
        half = spec.w / 2
        return cls(m_r=spec.m_r, d_ra=half - com_offset, d_rb=half + com_offset,
                   d_p=spec.D if d_p is None else d_p, d_F=d_F, g=spec.g)


@dataclass(frozen=True)
class AppliedLoad:
    force: tuple[float, float, float] = (0.0, 0.0, 0.0)
    point: tuple[float, float, float] = (0.0, 0.0, 0.0)
    mass: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (*self.force, *self.point, self.mass)):
            raise ValueError("load components must be finite")
        if self.mass < 0:
            raise ValueError("attached mass must be >= 0")


@dataclass(frozen=True)
class TipAnalysis:
    edge_moments: tuple[float, ...]
    binding_edge: int

    @property
    def margin(self) -> float:
        return self.edge_moments[self.binding_edge]

    @property
    def stable(self) -> bool:
        return self.margin >= 0


@dataclass(frozen=True)
class CapabilityCurve:
    variable: str
    grid: tuple[float, ...]
    values: tuple[float | None, ...]  # None marks an unbounded point
    model: str

    @property
    def unit(self) -> str:
        return "kg" if self.model == "payload" else "N"

    def header(self) -> str:
        return "reach_m,payload_kg" if self.model == "payload" else "h_m,force_N"


# -- planar (rectangular base) ---------------------------------------------

def planar_max_payload(case: PlanarCase) -> float:
    if case.d_p == 0:
        raise UnboundedCapability("d_p", 0.0)
    return case.m_r * case.d_ra / case.d_p


def planar_max_pull(case: PlanarCase) -> float:
    if case.d_F == 0:
        raise UnboundedCapability("h", 0.0)
    return case.m_r * case.g * case.d_ra / case.d_F


def planar_max_push(case: PlanarCase) -> float:
    if case.d_F == 0:
        raise UnboundedCapability("h", 0.0)
    return case.m_r * case.g * case.d_rb / case.d_F


# -- support triangle ------------------------------------------------------

def _check_height(spec: RobotSpec, h: float) -> None:
    if h > spec.H:
        raise WorkspaceError(f"h={h:g} exceeds H={spec.H:g}")
    if h <= 0:
        if h < 0:
            raise WorkspaceError(f"h={h:g} is below the floor")
        raise UnboundedCapability("h", h)


def tri_max_payload(spec: RobotSpec, d_p: float | None = None) -> float:
    """Largest stable payload at reach ``d_p`` (default: full reach ``D``)."""
    d_p = spec.D if d_p is None else d_p
    if d_p < 0 or d_p > spec.D:
        raise WorkspaceError(f"reach {d_p:g} outside [0, D={spec.D:g}]")
    denom = spec.t + 2 * spec.l * (d_p + spec.reach_offset) / spec.w
    if denom == 0:
        raise UnboundedCapability("d_p", d_p)
    return spec.m_r * spec.c / denom


def _per_height(moment: float, h: float) -> float:
    # tiny heights can underflow the denominator or overflow the quotient
    try:
        value = moment / h
    except ZeroDivisionError:
        raise UnboundedCapability("h", h) from None
    if math.isinf(value):
        raise UnboundedCapability("h", h)
    return value


def tri_max_pull_push(spec: RobotSpec, h: float) -> float:
    """Largest sideways pull (or push) at arm height ``h``."""
    _check_height(spec, h)
    return _per_height(spec.m_r * spec.g * spec.c * spec.w / (2 * spec.l), h)


def tri_backpush(spec: RobotSpec, h: float) -> float:
    """Largest force the base can exert driving backwards, arm at height ``h``."""
    _check_height(spec, h)
    return _per_height(spec.m_r * spec.g * (spec.l - spec.c), h)


def capability(spec: RobotSpec, kind: str, location: float | None = None) -> float:
    if kind == "payload":
        return tri_max_payload(spec, location)
    if location is None:
        raise ValueError(f"{kind} capability needs a height")
    if kind in ("pull", "push"):
        return tri_max_pull_push(spec, location)
    if kind == "backpush":
        return tri_backpush(spec, location)
    raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")


def capability_curve(spec: RobotSpec, kind: str, grid: Iterable[float]) -> CapabilityCurve:
    grid = tuple(float(x) for x in grid)
    if not grid:
        raise ValueError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    values: list[float | None] = []
    for x in grid:
        try:
            values.append(capability(spec, kind, x))
        except UnboundedCapability:
            values.append(None)
    return CapabilityCurve("reach" if kind == "payload" else "h", grid, tuple(values), kind)


def end_of_arm_point(spec: RobotSpec, d_p: float, h: float = 0.0) -> tuple[float, float, float]:
    """Middle of the arm end at reach ``d_p`` beyond the right contact datum."""
    return (spec.l - spec.t, spec.w / 2 + spec.reach_offset + d_p, h)


def triangle_load(spec: RobotSpec, kind: str, magnitude: float,
                  location: float | None = None) -> AppliedLoad:
    """Load of the given kind as seen by the triangle models.

    Pull acts outward along the arm (+y), push inward (-y), back-push is the
    reaction to driving backwards (+x). Payload hangs at reach ``location``.
    """
    if kind == "payload":
        d_p = spec.D if location is None else location
        return AppliedLoad(point=end_of_arm_point(spec, d_p), mass=magnitude)
    h = float(location)
    direction = {"pull": (0.0, 1.0, 0.0), "push": (0.0, -1.0, 0.0),
                 "backpush": (1.0, 0.0, 0.0)}[kind]
    return AppliedLoad(force=tuple(magnitude * x for x in direction),
                       point=end_of_arm_point(spec, spec.D, h))


# -- general convex polygon ------------------------------------------------

def edge_restoring_moments(polygon: SupportPolygon,
                           forces: Sequence[tuple[Sequence[float], Sequence[float]]]
                           ) -> np.ndarray:
    """Restoring moment about every edge for a set of (force, point) pairs.

    For an edge with inward unit normal ``n`` a force ``F`` applied at height
    ``z`` and inward distance ``s`` contributes ``-F_z*s + z*(n . F_xy)``.
    Positive means the edge stays loaded.
    """
    v = np.asarray(polygon.vertices, dtype=float)
    d = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(d[:, 0], d[:, 1])
    if np.any(lengths == 0):
        raise SpecError("support polygon has a zero-length edge")
    inward = np.column_stack([-d[:, 1], d[:, 0]]) / lengths[:, None]
    total = np.zeros(len(v))
    for force, point in forces:
        f = np.asarray(force, dtype=float)
        p = np.asarray(point, dtype=float)
        s = np.einsum("ij,ij->i", inward, p[:2] - v)
        total += -f[2] * s + p[2] * (inward @ f[:2])
    return total


def tip_margin(polygon: SupportPolygon, com: ComEstimate,
               load: AppliedLoad | Sequence[AppliedLoad] | None = None,
               g: float = STANDARD_GRAVITY) -> TipAnalysis:
    """Per-edge restoring moments (N*m) of gravity plus applied loads."""
    if not polygon.is_convex():
        raise SpecError("support polygon must be convex and counterclockwise")
    if load is None:
        loads: Sequence[AppliedLoad] = ()
    elif isinstance(load, AppliedLoad):
        loads = (load,)
    else:
        loads = tuple(load)
    forces = [((0.0, 0.0, -com.mass * g), com.position)]
    for item in loads:
        forces.append((item.force, item.point))
        if item.mass:
            forces.append(((0.0, 0.0, -item.mass * g), item.point))
    moments = edge_restoring_moments(polygon, forces)
    return TipAnalysis(tuple(float(m) for m in moments), int(np.argmin(moments)))
