"""Invariant metrics on hyperbolic planar domains.

Distances of the unit-disk metric and the Kobayashi / Caratheodory
pseudodistances on a small domain catalog and on raster grid domains,
plus the topology of their metric balls and classical rigidity checks
for conformal self-maps.
"""

from .caratheodory import (
    BallComponentReport,
    MapDictionary,
    SubharmonicityReport,
    car_ball_components,
    car_interval,
    car_lower,
    default_dictionary,
    subharmonicity_check,
)
from .conformal import (
    AutomorphismGroupDesc,
    HoloSelfMap,
    IsotropyReport,
    annulus_automorphisms,
    blaschke_product,
    cartan_check,
    isotropy_group,
    maskit_demo,
    two_fixed_point_check,
    watt_check,
)
from .domains import (
    Annulus,
    CoveringAtlas,
    Disk,
    GridDomain,
    HalfPlane,
    PuncturedDisk,
    contains,
    covering_atlas,
    density,
    grid_annulus,
    grid_from_predicate,
    grid_load,
    grid_save,
    rasterize,
)
from .kobayashi import (
    DistanceInterval,
    MetricBall,
    PolyPath,
    ball_load,
    ball_save,
    curve_length,
    geodesic,
    inner_distance,
    kob_ball_raster,
    kob_distance,
    lift_infimum,
)
from .modulus import canonical_annulus_radius, conformal_modulus
from .topology import (
    LabeledRaster,
    NerveGraph,
    SimplePolygon,
    connectivity_number,
    flood_components,
    injectivity_lower_bound,
    nerve_cover,
    separating_cycle,
    winding_number,
)
from .mobius import (
    INFINITY,
    FixedKind,
    FixedPointSet,
    MapClass,
    MobiusMap,
    disk_automorphism,
    mobius_is_identity_given_three_fixed,
)
from .poincare import (
    poincare_ball_euclidean,
    poincare_distance,
    poincare_geodesic,
)

__all__ = [
    "Annulus",
    "AutomorphismGroupDesc",
    "BallComponentReport",
    "CoveringAtlas",
    "Disk",
    "DistanceInterval",
    "FixedKind",
    "FixedPointSet",
    "GridDomain",
    "HalfPlane",
    "HoloSelfMap",
    "INFINITY",
    "IsotropyReport",
    "LabeledRaster",
    "MapClass",
    "MapDictionary",
    "MetricBall",
    "MobiusMap",
    "NerveGraph",
    "PolyPath",
    "PuncturedDisk",
    "SimplePolygon",
    "SubharmonicityReport",
    "annulus_automorphisms",
    "ball_load",
    "ball_save",
    "blaschke_product",
    "canonical_annulus_radius",
    "car_ball_components",
    "car_interval",
    "car_lower",
    "cartan_check",
    "conformal_modulus",
    "connectivity_number",
    "contains",
    "covering_atlas",
    "curve_length",
    "default_dictionary",
    "density",
    "disk_automorphism",
    "flood_components",
    "geodesic",
    "grid_annulus",
    "grid_from_predicate",
    "grid_load",
    "grid_save",
    "injectivity_lower_bound",
    "inner_distance",
    "isotropy_group",
    "kob_ball_raster",
    "kob_distance",
    "lift_infimum",
    "maskit_demo",
    "mobius_is_identity_given_three_fixed",
    "nerve_cover",
    "poincare_ball_euclidean",
    "poincare_distance",
    "poincare_geodesic",
    "rasterize",
    "separating_cycle",
    "subharmonicity_check",
    "two_fixed_point_check",
    "watt_check",
    "winding_number",
]
