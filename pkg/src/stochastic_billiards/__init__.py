"""Uniform sampling on the boundary of curvature-bounded convex bodies via
the stochastic billiard chain, with spectral and mixing diagnostics."""

from ._core import COMPILED
from .chain import (
    ChainConfig,
    ChainState,
    StepRecord,
    Trajectory,
    cosine_kernel_constant,
    first_passage_time,
    kernel_density,
    run,
    sample_steps,
    step,
    write_trajectory_csv,
)
from .diagnostics import (
    ArcPartition,
    BallFractionRadius,
    CapsuleReport,
    CoordinatePartition,
    Histogram,
    MixingCurve,
    QuantileEstimate,
    boundary_fraction,
    capsule_experiment,
    capsule_start,
    empirical_tv,
    estimate_F,
    histogram,
    mixing_curve,
    overlap_tv,
    s_gamma,
    var_z1_quadrature,
)
from .geometry import (
    Ball,
    BoundaryPoint,
    Capsule,
    ConvexBody,
    DirectionError,
    DomainError,
    Ellipsoid,
    GeometryError,
    InputError,
    RoundedPolytope,
    boundary_point_from_direction,
    default_start,
    load_body,
    make_body,
    tangent_basis,
)
from .sampler import (
    DirectionLaw,
    RngStream,
    normal_component_cdf,
    sample_direction,
    sample_unit_ball,
)
from .spectral2d import (
    SpectralSummary,
    TransitionMatrix,
    boundary_curve,
    build_transition_matrix,
    spectral_summary,
    stationary_distribution,
    sweep_conductance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
