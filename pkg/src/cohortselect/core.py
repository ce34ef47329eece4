"""Domain types and the saturating-coverage objective.

The objective for a selected set X of target size k is

    f(X) = sum_i  w_i * min(k * p_i, count_i(X)) ** alpha

where count_i(X) is the number of selected candidates whose i-th binary
indicator is set, p_i is the target fraction for indicator column i, w_i is a
non-negative per-column weight, and alpha in (0, 1] is a concave transform
exponent.  Each column counts selected members carrying its attribute value
but stops counting once k * p_i are found; the concave transform makes
under-served columns yield larger marginal gains.

All functions here are pure and operate on immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np


class ValidationError(ValueError):
    """Inputs violate a documented contract (bad schema, unknown id, ...)."""


class SchemaError(ValidationError):
    """Attribute schema and candidate data disagree."""


class InfeasibleError(ValueError):
    """Selection parameters cannot be satisfied by the pool (e.g. k > pool)."""


@dataclass(eq=False)
class BinaryColumn:
    """One binary indicator column of the candidate pool.

    Parameters
    ----------
    column_id : str
        Opaque identifier, unique within a matrix.
    source_attribute : str
        Name of the raw attribute this column was derived from.  All columns
        sharing a source attribute carry the same weight.
    value_label : str
        The categorical value or bin label this column indicates.
    target : float
        Desired fraction of the selected set carrying this value, in [0, 1].
    weight : float
        Non-negative importance weight.
    indicator : np.ndarray
        Per-candidate 0/1 vector, aligned with the matrix candidate order.
    """

    column_id: str
    source_attribute: str
    value_label: str
    target: float
    weight: float
    indicator: np.ndarray

    def __post_init__(self):
        self.indicator = np.asarray(self.indicator, dtype=np.uint8)
        if not 0.0 <= self.target <= 1.0:
            raise ValidationError(
                f"column {self.column_id!r}: target {self.target} not in [0, 1]"
            )
        if self.weight < 0:
            raise ValidationError(
                f"column {self.column_id!r}: weight {self.weight} is negative"
            )
        bad = (self.indicator != 0) & (self.indicator != 1)
        if bad.any():
            raise ValidationError(
                f"column {self.column_id!r}: indicator entries must be 0 or 1"
            )


@dataclass(eq=False)
class BinaryMatrix:
    """Candidate pool as an ordered id list plus binary indicator columns."""

    candidate_ids: list[str]
    columns: list[BinaryColumn]

    def __post_init__(self):
        n = len(self.candidate_ids)
        if len(set(self.candidate_ids)) != n:
            seen: set[str] = set()
            for cid in self.candidate_ids:
                if cid in seen:
                    raise ValidationError(f"duplicate candidate id {cid!r}")
                seen.add(cid)
        ids = [c.column_id for c in self.columns]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate column ids in matrix")
        for col in self.columns:
            if len(col.indicator) != n:
                raise ValidationError(
                    f"column {col.column_id!r}: indicator length "
                    f"{len(col.indicator)} != pool size {n}"
                )
        self._validate_source_groups()

    def _validate_source_groups(self):
        by_source: dict[str, list[BinaryColumn]] = {}
        for col in self.columns:
            by_source.setdefault(col.source_attribute, []).append(col)
        for source, cols in by_source.items():
            weights = {c.weight for c in cols}
            if len(weights) > 1:
                raise ValidationError(
                    f"attribute {source!r}: columns carry unequal weights {sorted(weights)}"
                )
            if len(cols) > 1:
                stacked = np.stack([c.indicator for c in cols])
                per_candidate = stacked.sum(axis=0)
                if (per_candidate > 1).any():
                    idx = int(np.argmax(per_candidate > 1))
                    raise ValidationError(
                        f"attribute {source!r}: candidate "
                        f"{self.candidate_ids[idx]!r} is indicated in more than one column"
                    )

    @property
    def n_candidates(self) -> int:
        return len(self.candidate_ids)

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @cached_property
    def indicators(self) -> np.ndarray:
        """Dense (n_candidates, n_columns) float64 indicator matrix."""
        if not self.columns:
            return np.zeros((self.n_candidates, 0))
        return np.stack([c.indicator for c in self.columns], axis=1).astype(np.float64)

    @cached_property
    def targets(self) -> np.ndarray:
        return np.array([c.target for c in self.columns], dtype=np.float64)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.columns], dtype=np.float64)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {cid: i for i, cid in enumerate(self.candidate_ids)}

    def rows_for(self, ids: Iterable[str]) -> np.ndarray:
        """Row indices for the given candidate ids, in the given order."""
        index = self._index
        rows = []
        for cid in ids:
            try:
                rows.append(index[cid])
            except KeyError:
                raise ValidationError(f"unknown candidate id {cid!r}") from None
        return np.array(rows, dtype=np.intp)

    def counts_for(self, ids: Iterable[str]) -> np.ndarray:
        """Per-column selected counts for a set of candidate ids."""
        rows = self.rows_for(ids)
        if rows.size == 0:
            return np.zeros(self.n_columns)
        return self.indicators[rows].sum(axis=0)


@dataclass(frozen=True)
class SelectionParams:
    """Parameters of one selection run.

    k is the target set size; alpha the concave transform exponent in (0, 1];
    q the tie-breaking quantile in (0, 1] (q=1.0 is strict greedy with random
    ties); n_trials the number of restarts for the best-of selection; seed
    the 64-bit master seed; pre_selected the ids fixed into the solution
    before optimization starts.
    """

    k: int
    seed: int
    alpha: float = 0.5
    q: float = 1.0
    n_trials: int = 1
    pre_selected: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be a positive integer, got {self.k}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.q <= 1.0:
            raise ValidationError(f"q must be in (0, 1], got {self.q}")
        if self.n_trials < 1:
            raise ValidationError(f"n_trials must be >= 1, got {self.n_trials}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "pre_selected", frozenset(self.pre_selected))
        if len(self.pre_selected) > self.k:
            raise ValidationError(
                f"{len(self.pre_selected)} pre-selected candidates exceed k={self.k}"
            )


@dataclass(eq=False)
class ObjectiveScore:
    """Objective value together with its per-column decomposition.

    value reconstructs as sum(weights * per_column_saturation ** alpha);
    per_column_saturation[i] = min(k * target_i, per_column_counts[i]).
    """

    value: float
    per_column_counts: np.ndarray
    per_column_saturation: np.ndarray


def _saturations(matrix: BinaryMatrix, counts: np.ndarray, k: int) -> np.ndarray:
    # The cap k * p_i is used as a real-valued bound, never rounded.
    return np.minimum(k * matrix.targets, counts)


def objective(matrix: BinaryMatrix, selected: Iterable[str],
              params: SelectionParams) -> ObjectiveScore:
    """Evaluate the saturating-coverage objective on a selected id set.

    Returns an ObjectiveScore; does not mutate inputs.  Raises
    ValidationError for ids not in the pool or negative weights.
    """
    if (matrix.weights < 0).any():
        raise ValidationError("matrix contains a negative column weight")
    counts = matrix.counts_for(selected)
    sat = _saturations(matrix, counts, params.k)
    value = float(matrix.weights @ sat**params.alpha)
    return ObjectiveScore(value=value, per_column_counts=counts,
                          per_column_saturation=sat)


def marginal_gain(matrix: BinaryMatrix, selected: Iterable[str], candidate: str,
                  params: SelectionParams) -> float:
    """Objective increase from adding ``candidate`` to the set ``selected``.

    Always >= 0; zero when every column containing the candidate is already
    saturated.  Raises ValidationError if the candidate is already selected
    (a caller logic bug, not a no-op).
    """
    selected = list(selected)
    if candidate in selected:
        raise ValidationError(f"candidate {candidate!r} is already selected")
    row = matrix.rows_for([candidate])[0]
    counts = matrix.counts_for(selected)
    base = _saturations(matrix, counts, params.k)
    bumped = _saturations(matrix, counts + matrix.indicators[row], params.k)
    gain = float(matrix.weights @ (bumped**params.alpha - base**params.alpha))
    return max(gain, 0.0)
