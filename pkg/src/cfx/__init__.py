"""Piecewise homographic continued-fraction systems and their planar
invariant sets.

The package models interval maps whose branches are Mobius transformations
with unit determinant, lifts them to an area-preserving planar skew map,
and computes the compact planar invariant set as the fixed point of a
contracting map on fiber grids.  Invariant densities fall out as fiber
lengths; orbit statistics, transfer-operator residuals, and structural
diagnostics cross-check them.

Quick start::

    import cfx
    system, sheet = cfx.gauss()
    grid, report = cfx.fixed_point(system, n_cells=1024, tol=1e-3)
    profile = cfx.density_profile(grid)

The compiled kernel backend is used when available; set CFX_BACKEND=python
to force the pure numpy fallback and CFX_THREADS to cap worker threads.
"""

from ._backend import BACKEND
from .catalog import (
    BUILTIN_NAMES,
    HurwitzMap,
    RawMap,
    ReferenceSheet,
    binary_gcd,
    chan_additive,
    chan_multiplicative,
    farey,
    farey_conjugated,
    farey_plus,
    gauss,
    hurwitz,
    make_system,
    nakada,
    ralston,
    rosen,
    symmetrized_gauss,
)
from .engine import (
    AttractorGrid,
    ConvergenceReport,
    PullbackTable,
    fixed_point,
    image_overlap,
    invariance_residual,
    reference_grid,
    reference_residual,
    sup_distance,
    surjectivity_defect,
    theta_step,
    truncation_level,
)
from .errors import (
    BadCSV,
    BadInput,
    BadParameter,
    CfxError,
    EmptyFiber,
    EmptySet,
    GridMismatch,
    NoBranch,
    NoConvergence,
    NoTailBound,
    NotExpanding,
    OrbitEscapes,
    OutOfDomain,
    OutOfRange,
    PoleInDomain,
    PoleInDual,
    Singular,
    StraddlesBranchBoundary,
    StructuralRefusal,
    UnboundedShift,
    ZeroDeterminant,
    ZeroInput,
    ZeroMass,
)
from .fibers import FiberSet, fatten, hausdorff_distance, one_sided_gap
from .measure import (
    DensityProfile,
    EmpiricalCDF,
    PointCloud,
    birkhoff_average,
    density_profile,
    fiber_measure,
    gauss_kuzmin_experiment,
    marginal_histogram,
    orbit_cloud,
    ruelle_residual,
    sample_attractor,
)
from .mobius import (
    BranchFamily,
    MobiusBranch,
    PiecewiseSystem,
    expansion_bound,
    normalize_branch,
    shift_bound,
    validate,
)
from .serialize import load_attractor, save_attractor
from .skew import (
    dual_density,
    dual_step,
    from_dual,
    gaussian_round,
    hurwitz_step,
    jacobian_determinant,
    skew_step,
    to_dual,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "CfxError",
    "BadCSV",
    "BadInput",
    "BadParameter",
    "EmptyFiber",
    "EmptySet",
    "GridMismatch",
    "NoBranch",
    "NoConvergence",
    "NoTailBound",
    "NotExpanding",
    "OrbitEscapes",
    "OutOfDomain",
    "OutOfRange",
    "PoleInDomain",
    "PoleInDual",
    "Singular",
    "StraddlesBranchBoundary",
    "StructuralRefusal",
    "UnboundedShift",
    "ZeroDeterminant",
    "ZeroInput",
    "ZeroMass",
    "FiberSet",
    "fatten",
    "hausdorff_distance",
    "one_sided_gap",
    "MobiusBranch",
    "BranchFamily",
    "PiecewiseSystem",
    "normalize_branch",
    "expansion_bound",
    "shift_bound",
    "validate",
    "skew_step",
    "dual_step",
    "to_dual",
    "from_dual",
    "dual_density",
    "jacobian_determinant",
    "gaussian_round",
    "hurwitz_step",
    "ReferenceSheet",
    "RawMap",
    "HurwitzMap",
    "BUILTIN_NAMES",
    "make_system",
    "gauss",
    "symmetrized_gauss",
    "farey",
    "farey_plus",
    "farey_conjugated",
    "ralston",
    "nakada",
    "rosen",
    "chan_additive",
    "chan_multiplicative",
    "hurwitz",
    "binary_gcd",
    "AttractorGrid",
    "PullbackTable",
    "ConvergenceReport",
    "fixed_point",
    "theta_step",
    "sup_distance",
    "truncation_level",
    "invariance_residual",
    "reference_grid",
    "reference_residual",
    "image_overlap",
    "surjectivity_defect",
    "DensityProfile",
    "PointCloud",
    "EmpiricalCDF",
    "fiber_measure",
    "density_profile",
    "ruelle_residual",
    "orbit_cloud",
    "marginal_histogram",
    "birkhoff_average",
    "gauss_kuzmin_experiment",
    "sample_attractor",
    "save_attractor",
    "load_attractor",
]
