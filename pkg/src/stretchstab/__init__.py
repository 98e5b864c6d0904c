"""Static stability and design tradeoffs for Stretch-style mobile manipulators."""

__version__ = "0.1.0"

from .robot_model import (  # noqa: E402
    ComEstimate,
    Configuration,
    Link,
    Mode,
    RobotSpec,
    SupportPolygon,
    aggregate_com,
    load_spec,
    stretch_re1,
    support_polygon,
    validate_spec,
)
from .statics import (  # noqa: E402
    AppliedLoad,
    CapabilityCurve,
    PlanarCase,
    TipAnalysis,
    UnboundedCapability,
    capability_curve,
    planar_max_payload,
    planar_max_pull,
    planar_max_push,
    tip_margin,
    tri_backpush,
    tri_max_payload,
    tri_max_pull_push,
)

__all__ = [
    "AppliedLoad", "CapabilityCurve", "ComEstimate", "Configuration", "Link", "Mode",
    "PlanarCase", "RobotSpec", "SupportPolygon", "TipAnalysis", "UnboundedCapability",
    "aggregate_com", "capability_curve", "load_spec", "planar_max_payload",
    "planar_max_pull", "planar_max_push", "stretch_re1", "support_polygon", "tip_margin",
    "tri_backpush", "tri_max_payload", "tri_max_pull_push", "validate_spec",
]
