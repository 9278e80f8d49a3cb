"""Energy, pressure, and minimality checks for incompressible planar maps on
the unit disk."""

from .geometry import Frame, PolarGrid, cofactor, det2, make_grid
from .integrand import (
    CartesianTensor,
    QuadraticIntegrand,
    assemble_cartesian,
    coercivity_floor,
    eval_f,
    grad_xi_f,
    sobolev_seminorm_M,
)
from .maps import (
    BoundaryCurve,
    NCoverMap,
    VectorField,
    bump_test_fields,
    field_from_map,
    gradient_u,
    ncover,
    sample_field,
)
from .pressure import (
    Certificate,
    ClosedFormPressure,
    PressureGradient,
    admissible_a_range,
    assemble_h_general,
    assemble_h_ncover,
    certify,
    closed_form_st_ncover,
    pressure_gradient_ncover,
    reconstruct_lambda,
    sobolev_norm_pressure,
    solve_pointwise,
)
from .fourier import (
    FourierDecomposition,
    buckling_check,
    decompose,
    identity_v_check,
    identity_vi_check,
    parseval_gradient,
    zero_mode_det,
)
from .energy import (
    EnergyReport,
    dirichlet,
    energy,
    expansion_check,
    gap_identity_check,
    min_energy_report,
    stationarity_residual,
)
from .competitors import (
    ProbeReport,
    TwistMap,
    compose,
    make_twist,
    probe_minimality,
    strict_gap_scaling,
)

__version__ = "0.1.0"
