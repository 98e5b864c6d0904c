import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stretchstab.feasibility import (
    RequirementFileError,
    TaskRequirement,
    check_manifest,
    check_task,
    load_requirements,
)
from stretchstab.robot_model import stretch_re1

SPEC = stretch_re1()


def test_drawer_pull(stretch):
    v = check_task(stretch, TaskRequirement("drawer", "pull", 20.0, 0.7))
    # m_r g c w / (2 l) / 0.7 with exact rationals
    assert v.capability == pytest.approx(33.83415, abs=1e-5)
    assert v.passed
    assert v.margin == pytest.approx(13.83415, abs=1e-5)


def test_payload_at_full_reach(stretch):
    v = check_task(stretch, TaskRequirement("object", "payload", 1.2))
    assert v.capability == pytest.approx(3.47, abs=0.005)
    assert v.passed


def test_unreachable_height(stretch):
    v = check_task(stretch, TaskRequirement("high", "pull", 20.0, 1.2))
    assert not v.passed
    assert v.reason == "unreachable"
    assert v.capability == 0.0


def test_zero_height_is_unbounded(stretch):
    v = check_task(stretch, TaskRequirement("floor", "push", 500.0, 0.0))
    assert v.passed and v.reason == "unbounded" and math.isinf(v.capability)


def test_shipped_manifest(data_dir, stretch):
    reqs = load_requirements(data_dir / "assistive_tasks.req.json")
    assert [(r.kind, r.magnitude, r.location) for r in reqs] == [
        ("pull", 20.0, 0.7), ("push", 10.0, 0.7), ("payload", 1.2, None)]
    result = check_manifest(stretch, reqs)
    assert result.n_pass == 3 and result.all_passed


def test_empty_manifest(stretch):
    result = check_manifest(stretch, [])
    assert result.verdicts == ()
    assert result.summary() == "0/0 passed"


def test_manifest_with_failure(stretch):
    result = check_manifest(stretch, [TaskRequirement("heavy", "pull", 100.0, 1.0)])
    assert result.n_fail == 1
    assert result.verdicts[0].capability == pytest.approx(23.683905, rel=1e-9)


def test_requirement_needs_height():
    with pytest.raises(ValueError):
        TaskRequirement("x", "pull", 5.0)
    with pytest.raises(ValueError):
        TaskRequirement("x", "payload", -1.0)


def test_bad_manifest(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"schema": "taskreq-v1",
                                "requirements": [{"kind": "pull", "magnitude": 5, "h": 0.7}]}))
    with pytest.raises(RequirementFileError, match="unknown key"):
        load_requirements(path)
    path.write_text(json.dumps({"schema": "other"}))
    with pytest.raises(RequirementFileError):
        load_requirements(path)


requirements = st.builds(
    TaskRequirement,
    name=st.just("r"),
    kind=st.sampled_from(["pull", "push", "backpush"]),
    magnitude=st.floats(0, 200),
    location=st.floats(0.0, 1.5),
)


@given(requirements, st.floats(1.0, 3.0))
def test_more_demanding_never_passes_more(req, factor):
    harder = TaskRequirement(req.name, req.kind, req.magnitude * factor, req.location)
    if not check_task(SPEC, req).passed:
        assert not check_task(SPEC, harder).passed


@given(requirements, st.floats(0.0, 1.0))
def test_lower_height_never_fails_more(req, frac):
    lower = TaskRequirement(req.name, req.kind, req.magnitude, req.location * frac)
    if check_task(SPEC, req).passed:
        assert check_task(SPEC, lower).passed


@given(requirements)
def test_manifest_of_one(req):
    assert check_manifest(SPEC, [req]).verdicts == (check_task(SPEC, req),)
