"""Search for compositions of parameterized primitives that best approximate a sampled target."""

from .core import (
    BoundSequence,
    BudgetExceeded,
    Carrier,
    ConfigError,
    ContractViolation,
    FAError,
    Metric,
    Primitive,
    SampleSet,
    UnsupportedCarrier,
    approximation_error,
    eval_primitive,
    eval_sequence,
    metric_eval,
)
from .spaces import (
    SearchSpace,
    SequenceSkeleton,
    closure,
    closure_fixpoint,
    count_expanded,
    elementary_catalog,
    enumerate_assignments,
    enumerate_structures,
)
from .io import load_space, load_target
from .solvers import BuilderSpec, SolveResult, a_asp_solve, asp_solve, builder_step, ml_solve, pac_solve
from .capacity import information_capacity, information_potential, potential_growth, vc_dimension, vc_report

__version__ = "0.1.0"
