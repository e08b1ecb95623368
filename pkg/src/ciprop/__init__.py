"""Conditional independence on exact probability grids.

The package answers three connected questions about a discretized joint
density: does the intersection property of conditional independence hold
for it, what counterexample variable witnesses a failure, and do the
support-side conditions securing identifiability of an additive-noise
structural model apply.

Layers, bottom up:

- :mod:`ciprop.grids` — immutable pmf grids over named axes with exact
  marginalization, conditioning, and total-variation CI residuals;
- :mod:`ciprop.topology` — support masks, path-connected components, and
  coordinate-wise equivalence classes with the derived class variable;
- :mod:`ciprop.intersection` — the one-class decision criterion, direct
  implication checks, the class-conditional weak form, and the
  counterexample construction;
- :mod:`ciprop.sem` — additive-noise structural models, exact pushforward
  to grids, benchmark models, and identifiability diagnostics;
- :mod:`ciprop.cli` — the ``ciprop`` command.
"""

from .errors import (
    BinOverflow,
    BudgetExceeded,
    CipropError,
    CycleDetected,
    IndexOutOfRange,
    NegativeMass,
    NotAParent,
    NotNormalized,
    OverlappingRoles,
    PremiseViolated,
    ShapeMismatch,
    SingleClass,
    UnknownAxis,
    UnknownNode,
    ZeroMassCondition,
)
from .grids import (
    DEFAULT_TOL,
    ZERO_TOL,
    Axis,
    CiReport,
    DensityGrid,
    ci_deviation,
    condition,
    flatten_axes,
    grid_from_json,
    grid_to_json,
    is_ci,
    pointwise_deviation,
    load_grid,
    marginalize,
    save_grid,
    validate,
)
from .intersection import (
    IntersectionReport,
    IntersectionVerdict,
    WeakIntersectionReport,
    attach_class_variable,
    classes_per_c,
    construct_adversary,
    intersection_condition,
    verify_intersection,
    verify_weak_intersection,
)
from .sem import (
    AffineMechanism,
    Dag,
    NoiseSpec,
    NonConstancyReport,
    PiecewiseMechanism,
    PiecewisePiece,
    SemSpec,
    TableMechanism,
    dependence_conclusion,
    example1,
    example1_alternative,
    joint_support_components,
    load_sem,
    noise_support_path_connected,
    non_constancy_check,
    non_descendants,
    propagate,
    save_sem,
    sem_from_json,
    sem_to_json,
    topological_order,
)
from .topology import (
    ComponentLabeling,
    SupportMask,
    UcAssignment,
    coordinatewise_classes,
    label_support_nd,
    path_components,
    render_labels,
    render_mask,
    support_mask,
    uc_of_cell,
)

__version__ = "0.1.0"
