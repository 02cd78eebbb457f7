"""Translating solitons of the fourth-root Gauss curvature flow with screw symmetry.

Surfaces whose Gaussian curvature equals the fourth power of the angle
function n3 = n . (0, 0, 1).  Profiles come from closed forms or quadrature;
the ``verify`` module certifies every identity by residual checks.
"""

from .bour import (
    BourChart,
    DeformedDatum,
    HelicoidalSeed,
    WarpingFunction,
    align_about_z,
    build_bour_chart,
    family_angle_sq,
    family_patch,
    recover_datum,
)
from .errors import (
    DegeneracyError,
    DomainError,
    DomainViolationError,
    EmptyDomainError,
    SingularityError,
)
from .surface import (
    FundamentalForms,
    Jet,
    MetricSample,
    ParametricPatch,
    evaluate,
    first_fundamental_form,
    fundamental_forms,
    gauss_curvature,
    numeric_jet,
    unit_normal_and_angle,
    warped_metric_curvature,
)
from .translators import (
    FamilyParams,
    TranslatorSurface,
    UDomain,
    build_helicoidal,
    cylinder_translator,
    deformation_path,
    domain_bounds,
    first_integral_chart,
    ode_residual,
    rotational_patch,
    rotational_profile,
    screw_motion,
)
from .verify import (
    GridSpec,
    VerificationReport,
    check_angle,
    check_bour_identity,
    check_isometry,
    check_metric,
    check_monge_ampere,
    check_screw_invariance,
    check_translator,
    verify_suite,
)

__version__ = "0.1.0"
