"""Numerical laboratory for codimension-one flows on foliated circle
bundles over a genus-2 hyperbolic surface.

The package builds the boundary action of the octagon surface group and
its fiberwise covers, runs the geodesic-type flow on the associated
bundle, and certifies the quantitative hyperbolicity properties of the
construction: Busemann and visual-measure identities, transverse
holonomy contraction and expansion, orbit separation and asymptoticity,
mollified perturbations with cone-field checks, and the periodic-orbit
census whose per-class counts multiply with the cover index.
"""

from .circle_action import CircleAction, CirclePoint, EquivariantMap
from .census import (
    CensusEntry,
    census_scaling,
    homotopic_inverse_pairs,
    orbit_census,
)
from .config import RunConfig, load_config
from .diagnostics import (
    horizontal_asymptoticity,
    leafwise_stable_contraction,
    vertical_separation_times,
)
from .flow import (
    BundlePoint,
    FoliatedBundle,
    HolonomyRecord,
    OrbitSegment,
    first_return,
    flow_phi,
    holonomy_derivative,
    orbit_closure_gap,
    periodic_orbit,
)
from .geometry import (
    BoundaryPoint,
    Geodesic,
    HyperbolicPoint,
    Isometry,
    apply_boundary,
    apply_isometry,
    busemann,
    classify_and_fixed_points,
    flow_toward,
    hyperbolic_distance,
    visual_density_ratio,
)
from .measure import ChartAtlas, FiberMetric, PullbackMeasure
from .smoothing import (
    ConeField,
    GeodesicField,
    MollifiedField,
    Mollifier,
    PerturbedField,
    cone_check,
    cone_sweep,
    flow_psi,
    mollify,
    quasigeodesic_radius,
)
from .surface_group import (
    FundamentalDomain,
    SurfaceGroup,
    Word,
    conjugacy_key,
    group_preset,
    standard_genus2,
    surface_conjugacy_key,
)
from .verify import CertificationReport, certify

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint",
    "BundlePoint",
    "CensusEntry",
    "CertificationReport",
    "ChartAtlas",
    "CircleAction",
    "CirclePoint",
    "ConeField",
    "EquivariantMap",
    "FiberMetric",
    "FoliatedBundle",
    "FundamentalDomain",
    "Geodesic",
    "GeodesicField",
    "HolonomyRecord",
    "HyperbolicPoint",
    "Isometry",
    "MollifiedField",
    "Mollifier",
    "OrbitSegment",
    "PerturbedField",
    "PullbackMeasure",
    "RunConfig",
    "SurfaceGroup",
    "Word",
    "apply_boundary",
    "apply_isometry",
    "busemann",
    "census_scaling",
    "certify",
    "classify_and_fixed_points",
    "cone_check",
    "cone_sweep",
    "conjugacy_key",
    "first_return",
    "flow_phi",
    "flow_psi",
    "flow_toward",
    "group_preset",
    "holonomy_derivative",
    "homotopic_inverse_pairs",
    "horizontal_asymptoticity",
    "hyperbolic_distance",
    "leafwise_stable_contraction",
    "load_config",
    "mollify",
    "orbit_census",
    "orbit_closure_gap",
    "periodic_orbit",
    "quasigeodesic_radius",
    "standard_genus2",
    "surface_conjugacy_key",
    "vertical_separation_times",
    "visual_density_ratio",
]
