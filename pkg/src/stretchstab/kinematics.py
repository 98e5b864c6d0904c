"""Cartesian kinematics of the arm/lift/base joints and mode-switch sequencing.

With the base restricted to forward/backward travel, the end of the arm moves
as ``(x_e, y_e, z_e) = (q_a, q_m, q_l)``. Base rotation is not part of this
map; it only shows up in mode transitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .robot_model import (
    Configuration,
    ConfigurationError,
    Mode,
    RobotSpec,
    check_configuration,
)


class WorkspaceLimitError(ValueError):
    """Pose outside the Cartesian workspace box."""


@dataclass(frozen=True)
class EndEffectorPose:
    x_e: float
    y_e: float
    z_e: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x_e, self.y_e, self.z_e])


@dataclass(frozen=True)
class WorkspaceBox:
    H: float
    D: float
    W: float = math.inf

    @property
    def unbounded_width(self) -> bool:
        return math.isinf(self.W)


@dataclass(frozen=True)
class Action:
    name: str
    target: float


@dataclass(frozen=True)
class TransitionPlan:
    actions: tuple[Action, ...]
    final: Configuration

    def names(self) -> list[str]:
        return [a.name for a in self.actions]

    def __len__(self) -> int:
        return len(self.actions)


def forward_kinematics(config: Configuration, spec: RobotSpec | None = None) -> EndEffectorPose:
    if spec is not None:
        check_configuration(spec, config)
    return EndEffectorPose(config.q_a, config.q_m, config.q_l)


def jacobian(config: Configuration | None = None) -> np.ndarray:
    return np.eye(3)


def inverse_kinematics(pose: EndEffectorPose, spec: RobotSpec | None = None) -> Configuration:
    """Joint values for ``pose``; raises naming the axis that leaves the box."""
    if spec is not None:
        for axis, joint, value, label in (
            ("x", "q_a", pose.x_e, "D_joint"),
            ("y", "q_m", pose.y_e, "base travel limit"),
            ("z", "q_l", pose.z_e, "H"),
        ):
            lo, hi = spec.limits(joint)
            if not math.isfinite(value):
                raise WorkspaceLimitError(f"{axis} is not finite")
            if value > hi:
                raise WorkspaceLimitError(f"{axis} exceeds {label} ({value:g} > {hi:g})")
            if value < lo:
                raise WorkspaceLimitError(f"{axis} below minimum ({value:g} < {lo:g})")
    return Configuration(q_a=pose.x_e, q_m=pose.y_e, q_l=pose.z_e, mode=Mode.MANIPULATION)


def workspace_box(spec: RobotSpec) -> WorkspaceBox:
    return WorkspaceBox(H=spec.H, D=spec.D)


def stow_angle(spec: RobotSpec) -> float:
    return spec.limits("wrist_yaw")[1]


def deploy_angle(spec: RobotSpec) -> float:
    lo, hi = spec.limits("wrist_yaw")
    return min(max(0.0, lo), hi)


def plan_mode_transition(config: Configuration, target: Mode, spec: RobotSpec, *,
                         base_rotation: float = math.pi / 2,
                         lift: float | None = None,
                         extend: float | None = None,
                         head_pan: float = -math.pi / 2,
                         lower_arm: bool = False) -> TransitionPlan:
    """Ordered atomic actions that move ``config`` into ``target`` mode.

    Into manipulation: rotate the base so the arm faces the work, swing the
    tool out, then lift, extend and look at the tool. Into navigation: pull
    the arm in, stow the tool inside the footprint and look ahead.
    """
    check_configuration(spec, config)
    if target == config.mode:
        return TransitionPlan((), config)

    if target is Mode.MANIPULATION:
        lift = config.q_l if lift is None else lift
        extend = config.q_a if extend is None else extend
        final = replace(config, q_l=lift, q_a=extend, wrist_yaw=deploy_angle(spec),
                        mode=Mode.MANIPULATION)
        check_configuration(spec, final)
        actions = (
            Action("rotate_base", base_rotation),
            Action("deploy_tool", final.wrist_yaw),
            Action("lift_arm", lift),
            Action("extend_arm", extend),
            Action("pan_head", head_pan),
        )
        return TransitionPlan(actions, final)

    actions = [
        Action("retract_arm", 0.0),
        Action("stow_tool", stow_angle(spec)),
        Action("pan_head", 0.0),
    ]
    q_l = config.q_l
    if lower_arm:
        q_l = spec.limits("q_l")[0]
        actions.append(Action("lower_arm", q_l))
    final = replace(config, q_a=0.0, q_l=q_l, wrist_yaw=stow_angle(spec),
                    mode=Mode.NAVIGATION)
    try:
        check_configuration(spec, final)
    except ConfigurationError as exc:
        raise ConfigurationError(f"cannot stow: {exc}") from None
    return TransitionPlan(tuple(actions), final)
