"""Design-space exploration: parameter sweeps and inverse design.

Every closed-form capability is monotone in each single robot parameter, so
the feasible set of one free variable under a constraint is a half-interval.
Single-variable problems intersect those half-intervals (analytic inversion
where available, bisection otherwise) and pick an end. Two free variables are
handled by coordinate descent in alphabetical order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .robot_model import RobotSpec, SpecFileError, load_spec, spec_from_dict, validate_spec
from .statics import UnboundedCapability, WorkspaceError, capability

SCHEMA = "designproblem-v1"
SWEEPABLE = ("m_r", "w", "l", "c", "t", "D", "H", "g")
FREE_VARIABLES = ("c", "D", "l", "m_r", "t", "w")
METRICS = ("payload", "pull", "push", "backpush")
MINIMIZABLE = ("w", "m_r", "l")
MAXIMIZABLE = ("D", "payload")
REL_TOL = 1e-9
MAX_OUTER_ITERATIONS = 100


class DesignError(ValueError):
    pass


class InfeasibleDesign(DesignError):
    def __init__(self, message: str, binding: "Constraint | None" = None):
        super().__init__(message)
        self.binding = binding


class UnsupportedProblem(DesignError):
    pass


# -- sweeps ------------------------------------------------------------------

@dataclass(frozen=True)
class FieldGrid:
    name: str
    values: tuple[float, ...]

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, steps: int) -> "FieldGrid":
        if steps < 1:
            raise DesignError(f"grid for {name!r} needs at least one step")
        if steps == 1:
            return cls(name, (float(lo),))
        return cls(name, tuple(float(x) for x in np.linspace(lo, hi, steps)))


@dataclass(frozen=True)
class Metric:
    kind: str
    location: float | None = None  # height for forces, reach for payload (None = D)

    def column(self) -> str:
        if self.kind == "payload":
            where = "D" if self.location is None else f"{self.location:g}"
            return f"payload_kg@d={where}"
        return f"{self.kind}_N@h={self.location:g}"


@dataclass(frozen=True)
class SweepRequest:
    spec: RobotSpec
    grids: tuple[FieldGrid, ...]
    metrics: tuple[Metric, ...]

    def __post_init__(self):
        if not 1 <= len(self.grids) <= 2:
            raise DesignError("a sweep takes one or two fields")
        if len({g.name for g in self.grids}) != len(self.grids):
            raise DesignError("swept fields must be distinct")
        for grid in self.grids:
            if grid.name not in SWEEPABLE:
                raise DesignError(f"cannot sweep {grid.name!r}; choose from {SWEEPABLE}")
            if not grid.values:
                raise DesignError(f"empty grid for {grid.name!r}")
        if not self.metrics:
            raise DesignError("no metrics requested")
        for m in self.metrics:
            if m.kind not in METRICS:
                raise DesignError(f"unknown metric {m.kind!r}")
            if m.kind != "payload" and m.location is None:
                raise DesignError(f"metric {m.kind!r} needs a height")


@dataclass(frozen=True)
class SweepRow:
    params: tuple[float, ...]
    values: tuple[float | None, ...]  # None: unbounded
    valid: bool
    note: str = ""


@dataclass(frozen=True)
class SweepTable:
    fields: tuple[str, ...]
    metrics: tuple[Metric, ...]
    rows: tuple[SweepRow, ...]

    def header(self) -> list[str]:
        return [*self.fields, *(m.column() for m in self.metrics), "valid", "note"]


def _evaluate_row(spec: RobotSpec, names: Sequence[str], point: Sequence[float],
                  metrics: Sequence[Metric]) -> SweepRow:
    candidate = spec.with_values(**dict(zip(names, point)))
    report = validate_spec(candidate)
    if not report.ok:
        return SweepRow(tuple(point), (None,) * len(metrics), False, "; ".join(report.messages))
    values: list[float | None] = []
    notes = []
    valid = True
    for m in metrics:
        try:
            values.append(capability(candidate, m.kind, m.location))
        except UnboundedCapability as exc:
            values.append(None)
            notes.append(str(exc))
        except WorkspaceError as exc:
            values.append(None)
            valid = False
            notes.append(str(exc))
    return SweepRow(tuple(point), tuple(values), valid, "; ".join(notes))


def run_sweep(req: SweepRequest) -> SweepTable:
    """Evaluate every metric at every grid point (rows in lexicographic grid order)."""
    names = tuple(g.name for g in req.grids)
    rows = tuple(_evaluate_row(req.spec, names, point, req.metrics)
                 for point in itertools.product(*(g.values for g in req.grids)))
    return SweepTable(names, req.metrics, rows)


def widen_base_extension_gain(i: float, n_segments: int) -> float:
    """Extra full extension gained by widening the base by ``i`` (same units)."""
    if i < 0:
        raise ValueError("width increase must be >= 0")
    if n_segments < 1:
        raise ValueError("n_segments must be >= 1")
    return n_segments * i


# -- inverse design ----------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    metric: str
    comparator: str
    value: float
    location: float | None = None  # height for forces; reach for payload (None = D)

    def __post_init__(self):
        if self.metric not in METRICS:
            raise DesignError(f"unknown metric {self.metric!r}")
        if self.comparator not in (">=", "<="):
            raise DesignError(f"comparator must be '>=' or '<=', got {self.comparator!r}")
        if self.metric != "payload" and self.location is None:
            raise DesignError(f"{self.metric} constraint needs a height")

    def metric_value(self, spec: RobotSpec) -> float:
        try:
            return capability(spec, self.metric, self.location)
        except UnboundedCapability:
            return math.inf

    def slack(self, spec: RobotSpec) -> float:
        """Signed satisfaction in the metric's unit; >= 0 means satisfied."""
        v = self.metric_value(spec)
        return v - self.value if self.comparator == ">=" else self.value - v

    def describe(self) -> str:
        where = ""
        if self.location is not None:
            where = f" at {'d' if self.metric == 'payload' else 'h'}={self.location:g}"
        return f"{self.metric} {self.comparator} {self.value:g}{where}"


@dataclass(frozen=True)
class DesignProblem:
    """Optimize one robot parameter (or the payload) under capability constraints.

    ``free`` defaults to the objective field. Search bounds default to
    ``[0.1x, 10x]`` of the template value.
    """

    spec: RobotSpec
    sense: str
    target: str
    constraints: tuple[Constraint, ...] = ()
    free: tuple[str, ...] = ()
    frozen: tuple[str, ...] = ()
    bounds: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.sense == "minimize" and self.target not in MINIMIZABLE:
            raise DesignError(f"can only minimize one of {MINIMIZABLE}")
        if self.sense == "maximize" and self.target not in MAXIMIZABLE:
            raise DesignError(f"can only maximize one of {MAXIMIZABLE}")
        if self.sense not in ("minimize", "maximize"):
            raise DesignError(f"sense must be minimize or maximize, got {self.sense!r}")
        if self.target in self.frozen:
            raise DesignError(f"objective field {self.target!r} is frozen")
        if not self.free and self.target == "payload":
            raise DesignError("maximizing payload needs explicit free variables")
        clash = set(self.free_variables) & set(self.frozen)
        if clash:
            raise DesignError(f"field(s) both free and frozen: {sorted(clash)}")

    @property
    def free_variables(self) -> tuple[str, ...]:
        return tuple(sorted(self.free or (self.target,)))

    def objective(self, spec: RobotSpec) -> float:
        if self.target == "payload":
            return capability(spec, "payload", None)
        return getattr(spec, self.target)

    def search_interval(self, var: str, spec: RobotSpec) -> tuple[float, float]:
        if var in self.bounds:
            lo, hi = self.bounds[var]
        else:
            ref = getattr(self.spec, var)
            lo, hi = 0.1 * ref, 10.0 * ref
        return _clip_to_validity(var, spec, float(lo), float(hi))


@dataclass(frozen=True)
class DesignResult:
    spec: RobotSpec
    objective: float
    margins: tuple[tuple[Constraint, float], ...]
    iterations: int = 1


def _nudge_up(x: float) -> float:
    return x + max(abs(x), 1e-12) * 1e-9


def _clip_to_validity(var: str, spec: RobotSpec, lo: float, hi: float) -> tuple[float, float]:
    if var == "l":
        lo = max(lo, _nudge_up(spec.c))
    elif var == "c":
        hi = min(hi, spec.l - spec.l * 1e-9)
        lo = max(lo, 1e-12)
    elif var == "m_r":
        lo = max(lo, spec.m_arm, 1e-12)
    elif var == "t":
        lo = max(lo, 0.0)
    else:
        lo = max(lo, 1e-12)
    return lo, hi


def invert_closed_form(spec: RobotSpec, c: Constraint, var: str) -> float | None:
    """Value of ``var`` at which the constraint's metric equals its bound.

    Returns None when ``var`` does not enter the metric or the inversion has
    no positive solution.
    """
    s, v = spec, c.value
    if v <= 0:
        return None
    try:
        if c.metric == "payload":
            d = (s.D if c.location is None else c.location) + s.reach_offset
            k = s.m_r * s.c / v  # required t + 2*l*d/w
            solutions = {
                "m_r": v * (s.t + 2 * s.l * d / s.w) / s.c,
                "c": v * (s.t + 2 * s.l * d / s.w) / s.m_r,
                "w": 2 * s.l * d / (k - s.t) if k > s.t else None,
                "l": (k - s.t) * s.w / (2 * d) if d > 0 else None,
                "t": k - 2 * s.l * d / s.w,
                "D": ((k - s.t) * s.w / (2 * s.l) - s.reach_offset
                      if c.location is None else None),
            }
        elif c.metric in ("pull", "push"):
            h = c.location
            solutions = {
                "m_r": 2 * v * h * s.l / (s.g * s.c * s.w),
                "c": 2 * v * h * s.l / (s.m_r * s.g * s.w),
                "w": 2 * v * h * s.l / (s.m_r * s.g * s.c),
                "l": s.m_r * s.g * s.c * s.w / (2 * v * h),
            }
        else:
            h = c.location
            solutions = {
                "m_r": v * h / (s.g * (s.l - s.c)) if s.l > s.c else None,
                "l": s.c + v * h / (s.m_r * s.g),
                "c": s.l - v * h / (s.m_r * s.g),
            }
    except ZeroDivisionError:
        return None
    x = solutions.get(var)
    if x is None or not math.isfinite(x):
        return None
    return x


def bisect_monotone(fn: Callable[[float], float], lo: float, hi: float,
                    rel_tol: float = REL_TOL, max_iter: int = 200) -> tuple[float, float]:
    """Bracket the sign change of a monotone ``fn`` on ``[lo, hi]``.

    Returns ``(a, b)`` with ``fn(a)`` and ``fn(b)`` of opposite sign and
    ``b - a <= rel_tol * max(|a|, |b|)``.
    """
    f_lo = fn(lo)
    if f_lo == 0:
        return lo, lo
    for _ in range(max_iter):
        if hi - lo <= rel_tol * max(abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def _slack_fn(spec: RobotSpec, c: Constraint, var: str) -> Callable[[float], float]:
    def fn(x: float) -> float:
        try:
            return c.slack(spec.with_values(**{var: x}))
        except WorkspaceError:
            return -math.inf
    return fn


def constraint_interval(spec: RobotSpec, c: Constraint, var: str, lo: float, hi: float,
                        method: str = "auto") -> tuple[float, float] | None:
    """Sub-interval of ``[lo, hi]`` where the constraint holds, or None."""
    fn = _slack_fn(spec, c, var)
    s_lo, s_hi = fn(lo), fn(hi)
    if s_lo >= 0 and s_hi >= 0:
        return lo, hi
    if s_lo < 0 and s_hi < 0:
        return None
    increasing = s_hi >= 0
    root = invert_closed_form(spec, c, var) if method == "auto" else None
    if root is not None and lo <= root <= hi and fn(root) >= -1e-9 * max(1.0, abs(c.value)):
        # analytic root may sit one ulp on the wrong side; step inward if so
        if fn(root) < 0:
            root = math.nextafter(root, hi if increasing else lo)
        return (root, hi) if increasing else (lo, root)
    a, b = bisect_monotone(fn, lo, hi)
    return (b, hi) if increasing else (lo, a)


def feasible_interval(problem: DesignProblem, spec: RobotSpec, var: str,
                      method: str = "auto") -> tuple[float, float]:
    lo, hi = problem.search_interval(var, spec)
    if lo > hi:
        raise InfeasibleDesign(f"empty search interval for {var!r}")
    for c in problem.constraints:
        piece = constraint_interval(spec, c, var, lo, hi, method)
        if piece is None or piece[0] > piece[1]:
            raise InfeasibleDesign(
                f"infeasible: binding constraint {c.describe()} cannot hold for "
                f"{var} in [{lo:g}, {hi:g}]", binding=c)
        lo, hi = piece
    return lo, hi


def _rank_key(problem: DesignProblem, spec: RobotSpec, value: float) -> tuple:
    score = -value if problem.sense == "maximize" else value
    # ties resolve toward smaller w, then smaller m_r
    return (round(score, 12), spec.w, spec.m_r)


def _best_endpoint(problem: DesignProblem, spec: RobotSpec, var: str,
                   method: str) -> RobotSpec:
    a, b = feasible_interval(problem, spec, var, method)
    cands = [spec.with_values(**{var: x}) for x in (a, b)]
    return min(cands, key=lambda s: _rank_key(problem, s, problem.objective(s)))


def _solve_single(problem: DesignProblem, spec: RobotSpec, var: str,
                  method: str = "auto") -> RobotSpec:
    return _best_endpoint(problem, spec, var, method)


def _solve_pair(problem: DesignProblem, method: str) -> tuple[RobotSpec, int]:
    variables = problem.free_variables
    current = problem.spec
    iterations = 0

    def reoptimize(s: RobotSpec, fixed: str) -> RobotSpec | None:
        other = next(v for v in variables if v != fixed)
        try:
            return _solve_single(problem, s, other, method)
        except InfeasibleDesign:
            return None

    for iterations in range(1, MAX_OUTER_ITERATIONS + 1):
        previous = current
        for var in variables:
            lo, hi = problem.search_interval(var, current)
            points = {lo, hi}
            try:
                points.update(feasible_interval(problem, current, var, method))
            except InfeasibleDesign:
                pass
            scored = []
            for x in sorted(points):
                follow = reoptimize(current.with_values(**{var: x}), var)
                if follow is not None:
                    scored.append((_rank_key(problem, follow, problem.objective(follow)), x))
            if not scored:
                raise InfeasibleDesign(f"no feasible {var} in [{lo:g}, {hi:g}]",
                                       binding=problem.constraints[0] if problem.constraints else None)
            current = current.with_values(**{var: min(scored)[1]})
        if current == previous:
            break
    # final pass leaves the last variable at its own optimum given the other
    current = _solve_single(problem, current, variables[-1], method)
    return current, iterations


def solve_design(problem: DesignProblem, method: str = "auto") -> DesignResult:
    """Optimal spec for ``problem`` plus every constraint's achieved slack.

    ``method="bisect"`` disables the analytic inversions.
    """
    variables = problem.free_variables
    for var in variables:
        if var not in FREE_VARIABLES:
            raise UnsupportedProblem(f"{var!r} cannot be a free variable; choose from {FREE_VARIABLES}")
    if len(variables) > 2:
        raise UnsupportedProblem("at most two free variables are supported")
    if problem.spec.base_links and "m_r" in variables:
        raise UnsupportedProblem("m_r cannot vary when base links fix the mass breakdown")
    if problem.target not in variables and problem.target != "payload":
        raise UnsupportedProblem(f"objective {problem.target!r} must be a free variable")
    base_report = validate_spec(problem.spec)
    if not base_report.ok:
        raise DesignError("template spec invalid: " + "; ".join(base_report.messages))

    if len(variables) == 1:
        best = _solve_single(problem, problem.spec, variables[0], method)
        iterations = 1
    else:
        best, iterations = _solve_pair(problem, method)
    report = validate_spec(best)
    if not report.ok:
        raise InfeasibleDesign("optimum violates spec invariants: " + "; ".join(report.messages))
    margins = tuple((c, c.slack(best)) for c in problem.constraints)
    return DesignResult(best, problem.objective(best), margins, iterations)


# -- designproblem-v1 files --------------------------------------------------

class ProblemFileError(ValueError):
    pass


def _constraint_from_dict(item: Mapping[str, Any], index: int) -> Constraint:
    allowed = {"metric", "comparator", "value", "height", "reach"}
    unknown = sorted(set(item) - allowed)
    if unknown:
        raise ProblemFileError(f"constraints[{index}]: unknown key(s): {', '.join(unknown)}")
    try:
        metric = item["metric"]
        loc = item.get("reach") if metric == "payload" else item.get("height")
        return Constraint(metric, item.get("comparator", ">="), float(item["value"]),
                          None if loc is None else float(loc))
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFileError(f"constraints[{index}]: {exc}") from None


def problem_from_dict(doc: Mapping[str, Any], base_dir: Path | None = None) -> DesignProblem:
    allowed = {"schema", "spec", "objective", "constraints", "free", "frozen", "bounds", "notes"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ProblemFileError(f"unknown key(s): {', '.join(unknown)}")
    if doc.get("schema") != SCHEMA:
        raise ProblemFileError(f"field 'schema': expected {SCHEMA!r}")
    raw_spec = doc.get("spec")
    try:
        if isinstance(raw_spec, str):
            path = Path(raw_spec)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            spec = load_spec(path)
        elif isinstance(raw_spec, Mapping):
            spec = spec_from_dict(raw_spec)
        else:
            raise ProblemFileError("field 'spec': expected a path or an inline robot spec")
    except SpecFileError as exc:
        raise ProblemFileError(f"field 'spec': {exc}") from None
    objective = doc.get("objective")
    if not isinstance(objective, Mapping) or "target" not in objective:
        raise ProblemFileError("field 'objective': expected {\"sense\": ..., \"target\": ...}")
    constraints = tuple(_constraint_from_dict(c, i) for i, c in enumerate(doc.get("constraints", [])))
    bounds = {k: (float(v[0]), float(v[1])) for k, v in dict(doc.get("bounds", {})).items()}
    try:
        return DesignProblem(spec, objective.get("sense", "minimize"), objective["target"],
                             constraints, tuple(doc.get("free", ())), tuple(doc.get("frozen", ())),
                             bounds)
    except DesignError as exc:
        raise ProblemFileError(str(exc)) from None


def load_problem(path: str | Path) -> DesignProblem:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ProblemFileError(f"{path}: top level must be an object")
    return problem_from_dict(doc, path.parent)
