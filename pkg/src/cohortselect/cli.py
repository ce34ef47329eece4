"""Command-line interface.

Subcommands:

* ``select``     run a seeded best-of-N selection over a CSV pool
* ``experiment`` run the planted-solution failure-rate studies
* ``validate``   check a pool + config pair and print pool fractions
* ``serve``      start the HTTP service

Exit codes: 0 success, 2 validation problem (bad schema, unknown labels,
malformed flags), 3 infeasible parameters (k larger than the pool).
Artifact writes are atomic; input files are never modified.
"""

from __future__ import annotations

import argparse
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import InfeasibleError, ValidationError
from .dataio import (
    atomic_write_text,
    dumps_json,
    params_to_dict,
    parse_config,
    read_candidates_csv,
    resolve_params,
    result_to_dict,
    sha256_text,
)
from .encode import build_matrix
from .experiments import (
    DEFAULT_GRID,
    DEFAULT_TRIALS_LIST,
    TIE_QUANTILE,
    ExperimentGrid,
    outcomes_to_csv,
    run_experiment1,
    run_experiment2,
)
from .metrics import report
from .select import monte_carlo_select

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _versions() -> dict:
    return {
        "cohortselect": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def _resolve_seed(flag_seed, config_params: dict) -> tuple[int, str]:
    if flag_seed is not None:
        return int(flag_seed), "flag"
    if "seed" in config_params:
        return int(config_params["seed"]), "config"
    return int.from_bytes(os.urandom(8), "big"), "entropy"


def _read_pre_selected(path: str) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def cmd_select(args) -> int:
    try:
        config = parse_config(Path(args.config).read_text(encoding="utf-8"))
        csv_text = Path(args.input).read_text(encoding="utf-8")
        table = read_candidates_csv(csv_text, id_column=config["id_column"])
        matrix = build_matrix(table, config["specs"])
        seed, seed_source = _resolve_seed(args.seed, config["params"])
        pre_selected = None
        if args.pre_selected is not None:
            pre_selected = _read_pre_selected(args.pre_selected)
        params = resolve_params(
            config["params"], k=args.k, alpha=args.alpha,
            quantile=args.quantile, trials=args.trials, seed=seed,
            pre_selected=pre_selected)
    except OSError as exc:
        return _fail(str(exc), EXIT_INVALID)
    except ValidationError as exc:
        return _fail(str(exc), EXIT_INVALID)

    try:
        result = monte_carlo_select(matrix, params, workers=args.workers)
    except InfeasibleError as exc:
        return _fail(str(exc), EXIT_INFEASIBLE)
    except ValidationError as exc:
        return _fail(str(exc), EXIT_INVALID)

    rep = report(matrix, result.selected)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = ["selected.txt", "result.json", "report.csv", "manifest.json"]
    manifest = {
        "command": "select",
        "input": str(args.input),
        "input_sha256": sha256_text(csv_text),
        "config": config["raw"],
        "params": params_to_dict(params),
        "seed_source": seed_source,
        "workers": args.workers,
        "outputs": outputs,
        "versions": _versions(),
    }
    column_ids = [c.column_id for c in matrix.columns]
    atomic_write_text(out_dir / "selected.txt",
                      "".join(f"{cid}\n" for cid in result.selected))
    atomic_write_text(out_dir / "result.json",
                      dumps_json(result_to_dict(result, column_ids)))
    atomic_write_text(out_dir / "report.csv", rep.to_csv())
    atomic_write_text(out_dir / "manifest.json", dumps_json(manifest))

    print(f"selected {len(result.selected)} of {matrix.n_candidates} "
          f"candidates (k={params.k}, trials={params.n_trials}, "
          f"alpha={params.alpha}, q={params.q}, seed={params.seed})")
    print(f"score: {result.score.value!r} (winning trial "
          f"{result.trial_index} of {params.n_trials})")
    print(f"d(S) = {rep.pool_distance.overall!r} (input pool)")
    print(f"d(X) = {rep.selected_distance.overall!r} (selected set)")
    print(f"wrote {', '.join(outputs)} to {out_dir}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.name not in ("exp1", "exp2"):
        return _fail(f"unknown experiment {args.name!r}; expected exp1 or exp2",
                     EXIT_INVALID)
    seed, seed_source = (int(args.seed), "flag") if args.seed is not None \
        else (int.from_bytes(os.urandom(8), "big"), "entropy")
    q = args.quantile if args.quantile is not None else TIE_QUANTILE

    try:
        if args.name == "exp1":
            grid = ExperimentGrid(
                n_out=_int_list(args.n_out) if args.n_out else DEFAULT_GRID.n_out,
                n_random=(_int_list(args.n_random) if args.n_random
                          else DEFAULT_GRID.n_random),
                target=(_float_list(args.targets) if args.targets
                        else DEFAULT_GRID.target),
                noise=(_float_list(args.noises) if args.noises
                       else DEFAULT_GRID.noise),
                alpha=(_float_list(args.alphas) if args.alphas
                       else DEFAULT_GRID.alpha),
            )
            sims = args.sims if args.sims is not None else 50
            outcomes = run_experiment1(grid, sims_per_cell=sims,
                                       master_seed=seed, q=q)
            setup = {"grid": {
                "n_out": list(grid.n_out), "n_random": list(grid.n_random),
                "target": list(grid.target), "noise": list(grid.noise),
                "alpha": list(grid.alpha)}}
        else:
            trials_list = (_int_list(args.trials_list) if args.trials_list
                           else DEFAULT_TRIALS_LIST)
            sims = args.sims if args.sims is not None else 100
            outcomes = run_experiment2(n_trials_list=trials_list, sims=sims,
                                       master_seed=seed, q=q)
            setup = {"trials_list": list(trials_list)}
    except ValidationError as exc:
        return _fail(str(exc), EXIT_INVALID)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = f"{args.name}.csv"
    manifest_name = f"{args.name}_manifest.json"
    manifest = {
        "command": "experiment",
        "name": args.name,
        "master_seed": seed,
        "seed_source": seed_source,
        "sims": sims,
        "quantile": q,
        "outputs": [csv_name, manifest_name],
        "versions": _versions(),
        **setup,
    }
    atomic_write_text(out_dir / csv_name, outcomes_to_csv(outcomes))
    atomic_write_text(out_dir / manifest_name, dumps_json(manifest))
    print(f"{args.name}: {len(outcomes)} cells, seed {seed}")
    print(f"wrote {csv_name}, {manifest_name} to {out_dir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        config = parse_config(Path(args.config).read_text(encoding="utf-8"))
        csv_text = Path(args.input).read_text(encoding="utf-8")
        table = read_candidates_csv(csv_text, id_column=config["id_column"])
    except (OSError, ValidationError) as exc:
        return _fail(str(exc), EXIT_INVALID)

    try:
        matrix = build_matrix(table, config["specs"])
    except ValidationError as exc:
        # build_matrix joins per-attribute failures with "; "
        for violation in str(exc).split("; "):
            print(f"error: {violation}", file=sys.stderr)
        return EXIT_INVALID

    print(f"{matrix.n_candidates} candidates, {matrix.n_columns} columns, "
          f"no schema violations")
    print(f"{'column':<32} {'target':>8} {'pool':>8} {'gap':>8}")
    for col in matrix.columns:
        pool_frac = float(col.indicator.mean())
        gap = pool_frac - col.target
        print(f"{col.column_id:<32} {col.target:>8.4f} {pool_frac:>8.4f} "
              f"{gap:>+8.4f}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohortselect",
        description="Target-driven cohort selection over candidate pools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sel = sub.add_parser("select", help="run a selection over a CSV pool")
    p_sel.add_argument("--input", required=True, help="candidate pool CSV")
    p_sel.add_argument("--config", required=True,
                       help="JSON config (schema + params)")
    p_sel.add_argument("--k", type=int, help="cohort size")
    p_sel.add_argument("--alpha", type=float,
                       help="concavity exponent (default 0.5)")
    p_sel.add_argument("--quantile", type=float,
                       help="tie-breaking quantile (default 1.0)")
    p_sel.add_argument("--trials", type=int,
                       help="number of restarts (default 15)")
    p_sel.add_argument("--seed", type=int, help="master seed")
    p_sel.add_argument("--pre-selected",
                       help="file with one pre-selected id per line")
    p_sel.add_argument("--out-dir", default=".", help="artifact directory")
    p_sel.add_argument("--workers", type=int, default=1,
                       help="parallel trial workers (results unaffected)")
    p_sel.set_defaults(func=cmd_select)

    p_exp = sub.add_parser("experiment",
                           help="run a planted-solution failure-rate study")
    p_exp.add_argument("name", help="exp1 or exp2")
    p_exp.add_argument("--out-dir", default=".", help="artifact directory")
    p_exp.add_argument("--seed", type=int, help="master seed")
    p_exp.add_argument("--sims", type=int,
                       help="simulations per cell (default 50/100)")
    p_exp.add_argument("--quantile", type=float,
                       help="tie-breaking quantile used by the harness")
    p_exp.add_argument("--n-out", help="comma list of cohort sizes (exp1)")
    p_exp.add_argument("--n-random", help="comma list of distractor counts (exp1)")
    p_exp.add_argument("--targets", help="comma list of target fractions (exp1)")
    p_exp.add_argument("--noises", help="comma list of noise fractions (exp1)")
    p_exp.add_argument("--alphas", help="comma list of alpha values (exp1)")
    p_exp.add_argument("--trials-list", help="comma list of restart counts (exp2)")
    p_exp.set_defaults(func=cmd_experiment)

    p_val = sub.add_parser("validate",
                           help="check a pool + config pair without selecting")
    p_val.add_argument("--input", required=True, help="candidate pool CSV")
    p_val.add_argument("--config", required=True,
                       help="JSON config (schema + params)")
    p_val.set_defaults(func=cmd_validate)

    p_srv = sub.add_parser("serve", help="start the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.add_argument("--data-dir", default="./cohortselect-data")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches our validation code
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
