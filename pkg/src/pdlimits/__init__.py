"""Persistence diagrams of kappa-filtrations over point processes and
Monte Carlo checks of their large-window limit theorems."""

from .betti import BettiQuery, multi_add_bound, persistent_betti, persistent_betti_oracle
from .diagstats import (
    DiagramMeasure,
    Rect,
    RectClass,
    anderson_darling,
    bottleneck_distance,
    box_rect,
    grid_rect_class,
    normalize,
    rectangle_mass,
    rectangle_mass_from_betti,
)
from .estimators import KappaPersistence, PersistentBettiNumbers, RectangleMasses
from .exceptions import BudgetExceededError, InputError, PDLimitsError, QueryError
from .experiments import (
    CLTConfig,
    ExperimentReport,
    LLNConfig,
    StabilityConfig,
    clt_experiment,
    lln_experiment,
    stability_experiment,
)
from .filtration import FilteredComplex, Simplex, build_complex, neighborhood_graph, validate_complex
from .geometry import (
    CECH,
    RIPS,
    KappaKind,
    PointCloud,
    custom_kappa,
    euclid_dist,
    hausdorff_dist,
    kappa_value,
    miniball_radius,
)
from .persistence import (
    PersistenceDiagram,
    PersistencePair,
    boundary_matrix,
    compute_diagram,
    diagram_from_cloud,
    diagram_from_explicit_filtration,
    extract_diagram,
    reduce,
)
from .pointprocess import ProcessKind, ProcessSpec, load_points, sample

__version__ = "0.1.0"
