"""Affine deformations of Fuchsian groups: flat bundles, Margulis invariants,
holomorphic differentials and the opposite-sign properness test."""

__version__ = "0.1.0"

from .halfplane import (  # noqa: F401
    MoebiusElement,
    UnitTangent,
    axis_data,
    distance,
    frame_cocycle,
    geodesic,
    moebius_act,
)
from .fuchsian import (  # noqa: F401
    GroupPresentation,
    enumerate_conjugacy_classes,
    evaluate,
    genus2_group,
    schottky_group,
)
from .symrep import InvariantForm, character, invariant_form, sym_power_rep  # noqa: F401
from .flatbundle import (  # noqa: F401
    SectionCoords,
    bundle_metric,
    circle_weights,
    flatness_residual,
    holonomy_rep,
    metric_weights,
    parallel_transport,
)
from .margulis import (  # noqa: F401
    AffineIsometry,
    HolonomyModel,
    ObstructionCertificate,
    SymPowerModel,
    cocycle_extend,
    general_position,
    loxodromic_data,
    margulis_invariant,
    neutral_vector,
    properness_obstruction,
)
from .cocycle import (  # noqa: F401
    GeodesicLoopReport,
    QDifferential,
    affine_holonomy,
    f_observable,
    geodesic_sign_survey,
    margulis_via_integral,
    neutral_section,
    phi_map,
    poincare_qdiff,
)
