"""File formats shared by the CLI and the HTTP service.

Candidate pools arrive as RFC 4180 CSV with a header row; run configuration
is a single JSON document carrying the attribute schema and selection
parameters.  All emitted JSON is rendered with sorted keys and shortest-repr
floats so repeated runs are byte-identical, and every artifact write goes
through a temp-file-then-rename step.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .core import ObjectiveScore, SchemaError, SelectionParams, ValidationError
from .encode import AttributeSpec, CandidateTable
from .select import SelectionResult

_SPEC_KEYS = {"name", "kind", "weight", "categories", "bins", "edges",
              "components", "targets"}
_PARAM_KEYS = {"k", "alpha", "quantile", "trials", "seed", "pre_selected"}


def read_candidates_csv(text: str, id_column: str | None = None) -> CandidateTable:
    """Parse a candidate pool from CSV text.

    The first row is the header; ``id_column`` names the unique-id column
    (default: the first header field).  Empty cells are treated as missing
    values downstream.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("input CSV is empty") from None
    header = [h.strip() for h in header]
    if any(h == "" for h in header):
        raise SchemaError("input CSV header contains an empty column name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError(f"duplicate column names in CSV header: {dupes}")
    if id_column is None:
        id_column = header[0]
    if id_column not in header:
        raise SchemaError(f"id column {id_column!r} not found in CSV header")
    id_pos = header.index(id_column)

    rows = []
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise SchemaError(
                f"CSV line {line_no}: expected {len(header)} fields, "
                f"got {len(record)}")
        values = {name: record[i] for i, name in enumerate(header)
                  if i != id_pos}
        rows.append((record[id_pos], values))
    return CandidateTable(rows=rows)


def read_candidates_file(path: str | Path,
                         id_column: str | None = None) -> CandidateTable:
    return read_candidates_csv(Path(path).read_text(encoding="utf-8"),
                               id_column=id_column)


def spec_from_dict(entry: dict) -> AttributeSpec:
    if not isinstance(entry, dict):
        raise SchemaError(f"attribute entry must be an object, got {entry!r}")
    unknown = set(entry) - _SPEC_KEYS
    if unknown:
        raise SchemaError(
            f"attribute {entry.get('name', '?')!r}: unknown keys {sorted(unknown)}")
    for key in ("name", "kind"):
        if key not in entry:
            raise SchemaError(f"attribute entry missing required key {key!r}")
    return AttributeSpec(
        name=entry["name"],
        kind=entry["kind"],
        weight=float(entry.get("weight", 1.0)),
        categories=entry.get("categories"),
        bins=entry.get("bins"),
        edges=entry.get("edges"),
        components=entry.get("components"),
        targets={str(k): float(v) for k, v in entry.get("targets", {}).items()},
    )


def parse_config(text: str) -> dict:
    """Parse and structurally validate a run-config JSON document.

    Returns a dict with keys ``id_column`` (str or None), ``specs``
    (list of AttributeSpec) and ``params`` (raw dict of selection
    parameters, still unresolved against CLI flags).
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError("config root must be a JSON object")
    unknown = set(raw) - {"id_column", "attributes", "params"}
    if unknown:
        raise SchemaError(f"config: unknown top-level keys {sorted(unknown)}")
    attributes = raw.get("attributes")
    if not isinstance(attributes, list) or not attributes:
        raise SchemaError("config must declare a non-empty 'attributes' list")
    specs = [spec_from_dict(entry) for entry in attributes]
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("config 'params' must be a JSON object")
    unknown = set(params) - _PARAM_KEYS
    if unknown:
        raise SchemaError(f"config params: unknown keys {sorted(unknown)}")
    id_column = raw.get("id_column")
    if id_column is not None and not isinstance(id_column, str):
        raise SchemaError("config 'id_column' must be a string")
    return {"id_column": id_column, "specs": specs, "params": params,
            "raw": raw}


def resolve_params(config_params: dict, *, k=None, alpha=None, quantile=None,
                   trials=None, seed=None, pre_selected=None) -> SelectionParams:
    """Merge explicit overrides over config values over defaults.

    ``seed`` must already be resolved by the caller (the CLI records where
    it came from); everything else falls back to alpha=0.5, quantile=1.0,
    trials=15.
    """

    def pick(override, key, default):
        if override is not None:
            return override
        if key in config_params:
            return config_params[key]
        return default

    k = pick(k, "k", None)
    if k is None:
        raise ValidationError("k is required (flag --k or config params.k)")
    if pre_selected is None:
        pre_selected = config_params.get("pre_selected", ())
    return SelectionParams(
        k=int(k),
        seed=int(seed),
        alpha=float(pick(alpha, "alpha", 0.5)),
        q=float(pick(quantile, "quantile", 1.0)),
        n_trials=int(pick(trials, "trials", 15)),
        pre_selected=frozenset(str(c) for c in pre_selected),
    )


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and sets for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def params_to_dict(params: SelectionParams) -> dict:
    return {
        "k": params.k,
        "seed": params.seed,
        "alpha": params.alpha,
        "quantile": params.q,
        "trials": params.n_trials,
        "pre_selected": sorted(params.pre_selected),
    }


def score_to_dict(score: ObjectiveScore, column_ids: list[str]) -> dict:
    return {
        "value": score.value,
        "per_column": [
            {"column_id": cid,
             "count": float(score.per_column_counts[i]),
             "saturation": float(score.per_column_saturation[i])}
            for i, cid in enumerate(column_ids)
        ],
    }


def result_to_dict(result: SelectionResult, column_ids: list[str]) -> dict:
    return {
        "selected": list(result.selected),
        "score": score_to_dict(result.score, column_ids),
        "trial_index": result.trial_index,
        "per_trial_scores": list(result.per_trial_scores),
        "seed_used": result.seed_used,
        "params": params_to_dict(result.params_echo),
    }


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
