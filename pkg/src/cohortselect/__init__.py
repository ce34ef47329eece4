"""Cohort selection against per-attribute target fractions.

Given a pool of candidates, a set of binary indicator columns with target
fractions and weights, and a cohort size k, the package greedily maximizes a
saturating-coverage objective and reports how far pool and cohort sit from
the targets.  Raw attribute tables are encoded into indicator columns by the
``encode`` module; ``select`` runs seeded best-of-N optimization; ``metrics``
scores the outcome; ``experiments`` reproduces the planted-solution recovery
studies; ``cli`` and ``service`` expose the same engine on the command line
and over HTTP.
"""

from .core import (
    BinaryColumn,
    BinaryMatrix,
    InfeasibleError,
    ObjectiveScore,
    SchemaError,
    SelectionParams,
    ValidationError,
    marginal_gain,
    objective,
)
from .encode import AttributeSpec, CandidateTable, build_matrix
from .metrics import DistanceReport, SelectionReport, distance, report
from .select import (
    SelectionResult,
    greedy_select,
    monte_carlo_select,
    randomized_select,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSpec",
    "BinaryColumn",
    "BinaryMatrix",
    "CandidateTable",
    "DistanceReport",
    "InfeasibleError",
    "ObjectiveScore",
    "SchemaError",
    "SelectionParams",
    "SelectionReport",
    "SelectionResult",
    "ValidationError",
    "build_matrix",
    "distance",
    "greedy_select",
    "marginal_gain",
    "monte_carlo_select",
    "objective",
    "randomized_select",
    "report",
    "__version__",
]
