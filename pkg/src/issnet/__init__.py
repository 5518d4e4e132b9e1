"""Input-to-state stability tooling for infinite networks of discrete-time
subsystems: comparison-function algebra, set distances, portable simulation,
certificate checks, well-posedness probes, and finite truncations.
"""

from .comparison import (
    STRICT_TOL,
    Compose,
    Exponential,
    KLBound,
    Linear,
    MaxOf,
    PiecewiseLinear,
    Power,
    ProductBound,
    ScalarGain,
    SumOf,
    Zero,
    compose,
    invert,
    is_less_than_identity,
    iterate_gain,
)
from .distance import BallSet, BoxSet, PointSet, UnionSet, dist, dist_product, nearest_point
from .errors import (
    CertificateRefused,
    DimensionMismatch,
    GainDomainError,
    InputBoundExceeded,
    MissingInitialState,
    SpecError,
)
from .network import (
    InputSignal,
    NetworkSpec,
    StateWindow,
    SubsystemClass,
    make_affine_dynamics,
    spec_from_json,
    subsystem_step,
    validate_spec,
)
from .report import CertificateReport, Tolerances
from .sim import Trajectory, dependency_cone, iterate_M, simulate, write_trajectory_csv
from .certify import (
    ClassStorage,
    EissConstants,
    GainTable,
    StateGridSpec,
    StorageFamily,
    check_M_step_decrease,
    check_iss_estimate,
    check_overall_decay,
    check_storage_bounds,
    converse_M,
    necessity_construct,
    overall_V,
    small_gain_check,
)
from .wellposed import KBoundEstimate, SamplePlan, check_growth_bound, falsify_uniformity
from .truncate import (
    ConsistencyResult,
    InterfaceRecording,
    TruncatedNetwork,
    build_truncation,
    check_truncated_decay,
    consistency_check,
    record_interface_signal,
    simulate_truncated,
)
from .traffic import TrafficParams, build_traffic_network, run_scaling_experiment, traffic_certificate

__version__ = "0.1.0"

__all__ = [
    "STRICT_TOL",
    "BallSet",
    "BoxSet",
    "CertificateRefused",
    "CertificateReport",
    "ClassStorage",
    "Compose",
    "ConsistencyResult",
    "DimensionMismatch",
    "EissConstants",
    "Exponential",
    "GainDomainError",
    "GainTable",
    "InputBoundExceeded",
    "InputSignal",
    "InterfaceRecording",
    "KBoundEstimate",
    "KLBound",
    "Linear",
    "MaxOf",
    "MissingInitialState",
    "NetworkSpec",
    "PiecewiseLinear",
    "PointSet",
    "Power",
    "ProductBound",
    "SamplePlan",
    "ScalarGain",
    "SpecError",
    "StateGridSpec",
    "StateWindow",
    "StorageFamily",
    "SubsystemClass",
    "SumOf",
    "Tolerances",
    "TrafficParams",
    "Trajectory",
    "TruncatedNetwork",
    "UnionSet",
    "Zero",
    "build_traffic_network",
    "build_truncation",
    "check_M_step_decrease",
    "check_growth_bound",
    "check_iss_estimate",
    "check_overall_decay",
    "check_storage_bounds",
    "check_truncated_decay",
    "compose",
    "consistency_check",
    "converse_M",
    "dependency_cone",
    "dist",
    "dist_product",
    "falsify_uniformity",
    "invert",
    "is_less_than_identity",
    "iterate_M",
    "iterate_gain",
    "make_affine_dynamics",
    "nearest_point",
    "necessity_construct",
    "overall_V",
    "record_interface_signal",
    "run_scaling_experiment",
    "simulate",
    "simulate_truncated",
    "small_gain_check",
    "spec_from_json",
    "subsystem_step",
    "traffic_certificate",
    "validate_spec",
    "write_trajectory_csv",
]
