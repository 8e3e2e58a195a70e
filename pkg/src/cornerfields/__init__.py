"""Corner singularities of the Laplace and Stokes operators in plane sectors.

Exponents, closed-form corner solutions, cut-off right-hand sides, dual
pairing defects and a small P1 finite element harness on the L-shape.
"""

from .angles import Angle
from .config import RunConfig, emit_config, emit_table, parse_config
from .cutoff import CutoffProfile, Smoothness, laplace_rhs, stokes_rhs
from .errors import (
    CornerFieldsError,
    EmptyBall,
    EpsOutsidePlateau,
    NonConvergence,
    NonConvergent,
    NoPositiveRoot,
    NotARoot,
    NotInL2,
    NumericalError,
    ParseError,
    PoleAtVertex,
    RegionBoundaryHitsRoot,
    SolverStall,
    StepTooLarge,
    SupportTouchesBoundary,
    ValidationError,
)
from .exponents import (
    BcKind,
    Branch,
    ExponentRoot,
    SearchRegion,
    find_stokes_exponents,
    laplace_exponent,
    refine_stokes_exponent,
    smallest_positive_exponent,
    stokes_determinant,
    stokes_determinant_factored,
)
from .fem import (
    DiscreteField,
    ManufacturedProblem,
    convergence_study,
    corner_pole_indicator,
    h1_error,
    limit_case_study,
    solve_dirichlet,
)
from .laplace import CornerFrame, Edge, LaplaceField, SolutionClass, classify, limit_case_field, preset
from .mesh import PolygonDomain, TriMesh, build_lshape_mesh, refine
from .pairing import (
    CompactTestPair,
    TestFunctionV,
    arc_limit_defect,
    area_pairing,
    edge_integrability,
    stokes_very_weak_defect,
)
from .stokes import StokesField, basis_cartesian, basis_polar, dirichlet_coefficients, dirichlet_field

__version__ = "0.1.0"
