"""Selection diagnostics.

The headline number is the target distance d(X): the average over source
attributes of the mean absolute deviation between achieved label fractions
and their targets,

    d(X) = (1/N) sum_i (1/n_i) sum_j |count_ij(X) / |X| - p_ij|

with N attributes and n_i labels in attribute i.  Attributes count equally
regardless of column weights, and labels with no stated target count as
target 0.  ``report`` wraps the same numbers in a per-column table that
serializes identically for every consumer, so command-line and HTTP output
stay byte-for-byte comparable.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import BinaryMatrix, ValidationError

REPORT_FIELDS = (
    "column_id",
    "source_attribute",
    "value_label",
    "target",
    "pool_fraction",
    "selected_fraction",
    "deviation",
)


@dataclass(eq=False)
class DistanceReport:
    """d(X) with its decomposition.

    overall is the attribute-averaged distance; per_attribute holds each
    attribute's inner mean; per_column maps column_id to (achieved fraction,
    target, absolute deviation); set_size is |X|.
    """

    overall: float
    per_attribute: dict[str, float]
    per_column: dict[str, tuple[float, float, float]]
    set_size: int

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "per_attribute": dict(self.per_attribute),
            "per_column": {
                cid: {"achieved": a, "target": t, "deviation": d}
                for cid, (a, t, d) in self.per_column.items()
            },
            "set_size": self.set_size,
        }


@dataclass(eq=False)
class ColumnReport:
    """One report row: how one indicator column fared."""

    column_id: str
    source_attribute: str
    value_label: str
    target: float
    pool_fraction: float
    selected_fraction: float
    deviation: float


@dataclass(eq=False)
class SelectionReport:
    """Per-column achieved-vs-target table plus distances for X and S."""

    rows: list[ColumnReport]
    selected_distance: DistanceReport
    pool_distance: DistanceReport

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(REPORT_FIELDS)
        for row in self.rows:
            writer.writerow([
                row.column_id,
                row.source_attribute,
                row.value_label,
                repr(row.target),
                repr(row.pool_fraction),
                repr(row.selected_fraction),
                repr(row.deviation),
            ])
        return buffer.getvalue()

    def to_dict(self) -> dict:
        return {
            "rows": [
                {field: getattr(row, field) for field in REPORT_FIELDS}
                for row in self.rows
            ],
            "selected_distance": self.selected_distance.to_dict(),
            "pool_distance": self.pool_distance.to_dict(),
        }


def _achieved_fractions(matrix: BinaryMatrix, selected) -> tuple[list[str], np.ndarray]:
    ids = list(dict.fromkeys(selected))
    if not ids:
        raise ValidationError("cannot evaluate an empty selection")
    return ids, matrix.counts_for(ids) / len(ids)


def distance(matrix: BinaryMatrix, selected) -> DistanceReport:
    """Target distance of a candidate id set; X = S measures the raw pool.

    Raises ValidationError on an empty set or ids outside the pool.  A
    matrix with no columns has distance 0 by convention.
    """
    ids, achieved = _achieved_fractions(matrix, selected)
    deviations = np.abs(achieved - matrix.targets)
    per_column: dict[str, tuple[float, float, float]] = {}
    attribute_columns: dict[str, list[int]] = {}
    for j, col in enumerate(matrix.columns):
        per_column[col.column_id] = (
            float(achieved[j]), float(col.target), float(deviations[j]),
        )
        attribute_columns.setdefault(col.source_attribute, []).append(j)
    per_attribute = {
        attr: float(np.mean(deviations[idx]))
        for attr, idx in attribute_columns.items()
    }
    overall = (float(np.mean(list(per_attribute.values())))
               if per_attribute else 0.0)
    return DistanceReport(overall=overall, per_attribute=per_attribute,
                          per_column=per_column, set_size=len(ids))


def report(matrix: BinaryMatrix, selected) -> SelectionReport:
    """Per-column summary of a selection against targets and the raw pool.

    Row order matches the matrix column order.  Zero-weight columns appear
    like any other; they are part of the audit record even though they
    cannot influence selection.
    """
    selected_distance = distance(matrix, selected)
    pool_distance = distance(matrix, matrix.candidate_ids)
    rows = []
    for col in matrix.columns:
        achieved, target, deviation = selected_distance.per_column[col.column_id]
        pool_fraction = pool_distance.per_column[col.column_id][0]
        rows.append(ColumnReport(
            column_id=col.column_id,
            source_attribute=col.source_attribute,
            value_label=col.value_label,
            target=target,
            pool_fraction=pool_fraction,
            selected_fraction=achieved,
            deviation=deviation,
        ))
    return SelectionReport(rows=rows, selected_distance=selected_distance,
                           pool_distance=pool_distance)
