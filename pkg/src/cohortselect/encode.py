"""Turn raw candidate attributes into binary indicator columns.

Categorical attributes become one-hot column groups, ordinal attributes are
binned into equal-width intervals (or user-supplied edges) and then one-hot
encoded, and joint attributes take the product of two encoded components so
targets can be set on value combinations.  Missing values encode as all-zero
indicators for that attribute: the candidate can never help satisfy its
targets, but is not excluded from the pool.

Encoding is deterministic: identical table and specs yield a bit-identical
matrix, with columns ordered by spec order and then by declared label order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BinaryColumn, BinaryMatrix, SchemaError

_TARGET_SUM_TOL = 1e-9


def is_missing(value) -> bool:
    if value is None:
        return True
    if isinstance(value, float) and math.isnan(value):
        return True
    if isinstance(value, str) and value.strip() == "":
        return True
    return False


@dataclass(eq=False)
class CandidateTable:
    """Raw applicant rows: (candidate_id, attribute-name -> raw value)."""

    rows: list[tuple[str, dict]]

    def __post_init__(self):
        seen: set[str] = set()
        for cid, _ in self.rows:
            if not cid:
                raise SchemaError("empty candidate id")
            if cid in seen:
                raise SchemaError(f"duplicate candidate id {cid!r}")
            seen.add(cid)

    @property
    def ids(self) -> list[str]:
        return [cid for cid, _ in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def has_attribute(self, name: str) -> bool:
        return any(name in values for _, values in self.rows)


@dataclass(eq=False)
class AttributeSpec:
    """Schema entry for one raw attribute.

    kind is one of 'categorical', 'ordinal' or 'joint'.  Categorical specs
    declare an ordered ``categories`` list; ordinal specs declare ``bins``
    (equal-width between observed min and max) and/or explicit ``edges``;
    joint specs name two ``components`` that must resolve to other specs.
    ``targets`` maps value labels to desired fractions; labels without a
    target get 0.  Ordinal targets may be keyed by interval label or by bin
    index ("0", "1", ...), since auto-computed edges are data dependent.
    """

    name: str
    kind: str
    weight: float = 1.0
    categories: list[str] | None = None
    bins: int | None = None
    edges: list[float] | None = None
    components: list[str] | None = None
    targets: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("categorical", "ordinal", "joint"):
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.weight < 0:
            raise SchemaError(f"attribute {self.name!r}: negative weight")
        if self.kind == "categorical":
            if not self.categories:
                raise SchemaError(f"attribute {self.name!r}: no categories declared")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"attribute {self.name!r}: duplicate categories")
            unknown = set(self.targets) - set(self.categories)
            if unknown:
                raise SchemaError(
                    f"attribute {self.name!r}: targets for unknown labels "
                    f"{sorted(unknown)}"
                )
        elif self.kind == "ordinal":
            if self.bins is None and self.edges is None:
                raise SchemaError(
                    f"attribute {self.name!r}: ordinal needs bins or edges"
                )
            if self.edges is not None:
                if len(self.edges) < 2:
                    raise SchemaError(f"attribute {self.name!r}: need >= 2 edges")
                if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
                    raise SchemaError(
                        f"attribute {self.name!r}: edges must be strictly increasing"
                    )
                if self.bins is not None and len(self.edges) != self.bins + 1:
                    raise SchemaError(
                        f"attribute {self.name!r}: {len(self.edges)} edges "
                        f"inconsistent with {self.bins} bins"
                    )
                self.bins = len(self.edges) - 1
            if self.bins is not None and self.bins < 1:
                raise SchemaError(f"attribute {self.name!r}: bins must be >= 1")
        elif self.kind == "joint":
            if not self.components or len(self.components) != 2:
                raise SchemaError(
                    f"attribute {self.name!r}: joint needs exactly two components"
                )
        for label, fraction in self.targets.items():
            if not 0.0 <= fraction <= 1.0:
                raise SchemaError(
                    f"attribute {self.name!r}: target for {label!r} not in [0, 1]"
                )
        total = sum(self.targets.values())
        if total > 1.0 + _TARGET_SUM_TOL:
            raise SchemaError(
                f"attribute {self.name!r}: targets sum to {total:g} > 1"
            )


def _column(spec, label, indicator, target):
    return BinaryColumn(
        column_id=f"{spec.name}={label}",
        source_attribute=spec.name,
        value_label=label,
        target=target,
        weight=spec.weight,
        indicator=np.asarray(indicator, dtype=np.uint8),
    )


def encode_categorical(table: CandidateTable, spec: AttributeSpec) -> list[BinaryColumn]:
    """One column per declared category; missing values leave all columns 0."""
    if spec.kind != "categorical":
        raise SchemaError(f"attribute {spec.name!r}: expected categorical spec")
    index = {label: j for j, label in enumerate(spec.categories)}
    indicators = np.zeros((len(table), len(spec.categories)), dtype=np.uint8)
    for i, (cid, values) in enumerate(table.rows):
        value = values.get(spec.name)
        if is_missing(value):
            continue
        value = str(value)
        if value not in index:
            raise SchemaError(
                f"attribute {spec.name!r}: candidate {cid!r} has unknown "
                f"value {value!r}"
            )
        indicators[i, index[value]] = 1
    return [
        _column(spec, label, indicators[:, j], spec.targets.get(label, 0.0))
        for j, label in enumerate(spec.categories)
    ]


def bin_label(lo: float, hi: float, last: bool) -> str:
    return f"[{lo:g}, {hi:g}{']' if last else ')'}"


def _ordinal_edges(table, spec):
    if spec.edges is not None:
        return [float(e) for e in spec.edges]
    observed = []
    for cid, values in table.rows:
        value = values.get(spec.name)
        if is_missing(value):
            continue
        try:
            observed.append(float(value))
        except (TypeError, ValueError):
            raise SchemaError(
                f"attribute {spec.name!r}: candidate {cid!r} has non-numeric "
                f"value {value!r}"
            ) from None
    if not observed:
        raise SchemaError(f"attribute {spec.name!r}: all values missing")
    lo, hi = min(observed), max(observed)
    if lo == hi and spec.bins > 1:
        raise SchemaError(
            f"attribute {spec.name!r}: single observed value {lo:g}; "
            f"consider treating it as categorical"
        )
    return np.linspace(lo, hi, spec.bins + 1).tolist()


def ordinal_target(spec: AttributeSpec, label: str, bin_index: int) -> float:
    if label in spec.targets:
        return spec.targets[label]
    return spec.targets.get(str(bin_index), 0.0)


def encode_ordinal(table: CandidateTable, spec: AttributeSpec) -> list[BinaryColumn]:
    """Equal-width bins between observed min and max, or explicit edges.

    Bins are half-open [e_j, e_{j+1}) except the last, which is closed so the
    observed maximum stays representable.
    """
    if spec.kind != "ordinal":
        raise SchemaError(f"attribute {spec.name!r}: expected ordinal spec")
    edges = _ordinal_edges(table, spec)
    m = len(edges) - 1
    indicators = np.zeros((len(table), m), dtype=np.uint8)
    for i, (cid, values) in enumerate(table.rows):
        value = values.get(spec.name)
        if is_missing(value):
            continue
        try:
            x = float(value)
        except (TypeError, ValueError):
            raise SchemaError(
                f"attribute {spec.name!r}: candidate {cid!r} has non-numeric "
                f"value {value!r}"
            ) from None
        if x == edges[-1]:
            j = m - 1
        else:
            j = int(np.searchsorted(edges, x, side="right")) - 1
            if j < 0 or j >= m:
                raise SchemaError(
                    f"attribute {spec.name!r}: candidate {cid!r} value {x:g} "
                    f"outside bin range [{edges[0]:g}, {edges[-1]:g}]"
                )
        indicators[i, j] = 1
    columns = []
    for j in range(m):
        label = bin_label(edges[j], edges[j + 1], last=(j == m - 1))
        columns.append(
            _column(spec, label, indicators[:, j], ordinal_target(spec, label, j))
        )
    return columns


def encode_joint(table: CandidateTable, spec: AttributeSpec,
                 component_specs: tuple[AttributeSpec, AttributeSpec]) -> list[BinaryColumn]:
    """Product encoding of two components; targets keyed by "left×right"."""
    if spec.kind != "joint":
        raise SchemaError(f"attribute {spec.name!r}: expected joint spec")
    encoded = []
    for comp in component_specs:
        if not table.has_attribute(comp.name):
            raise SchemaError(
                f"attribute {spec.name!r}: component {comp.name!r} absent from table"
            )
        if comp.kind == "categorical":
            encoded.append(encode_categorical(table, comp))
        elif comp.kind == "ordinal":
            encoded.append(encode_ordinal(table, comp))
        else:
            raise SchemaError(
                f"attribute {spec.name!r}: component {comp.name!r} must be "
                f"categorical or ordinal"
            )
    left, right = encoded
    labels = [f"{a.value_label}×{b.value_label}" for a in left for b in right]
    unknown = set(spec.targets) - set(labels)
    if unknown:
        raise SchemaError(
            f"attribute {spec.name!r}: targets for unknown combinations "
            f"{sorted(unknown)}"
        )
    columns = []
    for a in left:
        for b in right:
            label = f"{a.value_label}×{b.value_label}"
            indicator = a.indicator * b.indicator
            columns.append(
                _column(spec, label, indicator, spec.targets.get(label, 0.0))
            )
    return columns


def build_matrix(table: CandidateTable, specs: list[AttributeSpec]) -> BinaryMatrix:
    """Encode every spec in order and assemble the validated matrix.

    Per-spec failures are aggregated into one SchemaError naming every
    offending attribute, so a bad schema surfaces all problems at once.
    """
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise SchemaError(f"duplicate attribute names in schema: {names}")
    by_name = {s.name: s for s in specs}
    columns: list[BinaryColumn] = []
    errors: list[str] = []
    for spec in specs:
        try:
            if spec.kind == "categorical":
                columns.extend(encode_categorical(table, spec))
            elif spec.kind == "ordinal":
                columns.extend(encode_ordinal(table, spec))
            else:
                comps = []
                for comp_name in spec.components:
                    if comp_name not in by_name:
                        raise SchemaError(
                            f"attribute {spec.name!r}: component {comp_name!r} "
                            f"not found in schema"
                        )
                    comps.append(by_name[comp_name])
                columns.extend(encode_joint(table, spec, (comps[0], comps[1])))
        except SchemaError as exc:
            errors.append(str(exc))
    if errors:
        raise SchemaError("; ".join(errors))
    return BinaryMatrix(candidate_ids=table.ids, columns=columns)
