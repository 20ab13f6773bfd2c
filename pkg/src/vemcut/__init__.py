"""Lowest-order virtual element solver for the 2-D Poisson problem on
general polygonal meshes, with cut-cell mesh generation, element shape
diagnostics, convergence studies, and a numerical inequality lab."""

from .analysis import (
    ErrorReport,
    ManufacturedSolution,
    RateTable,
    SOLUTIONS,
    convergence_study,
    energy_norm,
    error_equation_check,
    pi_errors,
)
from .core import backend_name
from .errors import (
    DegenerateElement,
    ParseError,
    SolverStalled,
    ValidationError,
    VemcutError,
)
from .geometry import (
    EdgeGeometry,
    ElementReport,
    Point2,
    Polygon,
    check_assumptions,
    convex_hull,
    edge_heights,
    mesh_conv_counts,
    polygon_measures,
)
from .meshgen import CutLine, Mesh, cut_grid, read_mesh, short_edge_grid, square_grid, write_mesh
from .system import DofMap, MeshKernels, SolveReport, SparseSystem, assemble, solve, solve_poisson
from .vem import (
    LocalSystem,
    Projector,
    StabKind,
    build_projector,
    half_seminorm_edge,
    local_system,
    stabilization_matrix,
)

__version__ = "0.1.0"
