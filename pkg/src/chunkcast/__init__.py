"""Delay analysis for chunk-based live streaming over heterogeneous upload capacities."""

from .model import (
    BandwidthProfile,
    ClassSpec,
    DiffusionModel,
    DomainError,
    InfeasibleError,
    InjectionConfig,
    ManyToOne,
    OneToOne,
    OneToSome,
    StreamConfig,
    cumulative_bandwidth,
    expand_classes,
    generate_adversarial,
    random_profile,
)
from .oracle import exhaustive_min_delay
from .single_chunk import (
    BoundReport,
    DelayCurve,
    approx_classes_dm,
    approx_dominant_class,
    approx_free_riders,
    approx_homogeneous_dm,
    delay_curve,
    delay_many_to_one,
    delay_one_to_c,
    delay_one_to_one,
    evaluate_bounds,
)
from .stream import (
    GroupPlan,
    Schedule,
    SimulationResult,
    TransferEvent,
    adversarial_lower_bound,
    feasibility_check,
    find_group_period,
    measured_stream_delay,
    plan_intra_then_inter,
    responsibility_delay_bound,
    stream_delay_floor,
    verify_schedule,
)

__all__ = [
    "BandwidthProfile",
    "BoundReport",
    "ClassSpec",
    "DelayCurve",
    "DiffusionModel",
    "DomainError",
    "GroupPlan",
    "InfeasibleError",
    "InjectionConfig",
    "ManyToOne",
    "OneToOne",
    "OneToSome",
    "Schedule",
    "SimulationResult",
    "StreamConfig",
    "TransferEvent",
    "adversarial_lower_bound",
    "approx_classes_dm",
    "approx_dominant_class",
    "approx_free_riders",
    "approx_homogeneous_dm",
    "cumulative_bandwidth",
    "delay_curve",
    "delay_many_to_one",
    "delay_one_to_c",
    "delay_one_to_one",
    "evaluate_bounds",
    "exhaustive_min_delay",
    "expand_classes",
    "feasibility_check",
    "find_group_period",
    "generate_adversarial",
    "measured_stream_delay",
    "plan_intra_then_inter",
    "random_profile",
    "responsibility_delay_bound",
    "stream_delay_floor",
    "verify_schedule",
]

__version__ = "0.1.0"
