"""Cohort selection algorithms.

Three entry points share one selection loop: ``greedy_select`` adds a
maximum-marginal-gain candidate at every step (exact ties broken uniformly at
random), ``randomized_select`` widens each step's candidate pool to the top-q
quantile of marginal gains and picks uniformly from it, and
``monte_carlo_select`` runs independent randomized restarts and keeps the best
scoring one.  All three are deterministic functions of (matrix, params): the
seed drives every random draw, and restart trials use child seeds derived from
the master seed so results do not depend on execution order or parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    BinaryMatrix,
    InfeasibleError,
    ObjectiveScore,
    SelectionParams,
    objective,
)

# Guard against summation-order noise flipping quantile membership.
_TIE_TOL = 1e-12


@dataclass(eq=False)
class SelectionResult:
    """Outcome of one selection run.

    selected preserves pick order (pre-selected ids first, in sorted order);
    score is the objective of the winning set; trial_index says which restart
    won; per_trial_scores has one objective value per restart; seed_used
    echoes the master seed.
    """

    selected: list[str]
    score: ObjectiveScore
    trial_index: int
    per_trial_scores: list[float]
    seed_used: int
    params_echo: SelectionParams


def trial_seed(master_seed: int, trial: int) -> int:
    """Deterministic 64-bit child seed for restart number ``trial``."""
    seq = np.random.SeedSequence([master_seed, trial])
    return int(seq.generate_state(1, np.uint64)[0])


def quantile_threshold(gains: np.ndarray, q: float) -> float:
    """Nearest-rank q-quantile: ascending sort, index ceil(q*M) - 1."""
    m = gains.size
    if m == 0:
        raise ValueError("no gains to take a quantile of")
    idx = int(math.ceil(q * m - 1e-12)) - 1
    idx = min(max(idx, 0), m - 1)
    return float(np.sort(gains, kind="stable")[idx])


def _check_feasible(matrix: BinaryMatrix, params: SelectionParams) -> None:
    if params.k > matrix.n_candidates:
        raise InfeasibleError(
            f"k={params.k} exceeds pool size {matrix.n_candidates}"
        )
    matrix.rows_for(sorted(params.pre_selected))


def _run_trial(matrix: BinaryMatrix, params: SelectionParams, q: float,
               rng: np.random.Generator) -> list[str]:
    """One pass of the selection loop; returns ids in pick order."""
    indicators = matrix.indicators
    caps = params.k * matrix.targets
    weights = matrix.weights
    order = list(matrix.rows_for(sorted(params.pre_selected)))
    counts = (indicators[order].sum(axis=0) if order
              else np.zeros(matrix.n_columns))
    remaining = np.ones(matrix.n_candidates, dtype=bool)
    remaining[order] = False
    while len(order) < params.k:
        idx = np.flatnonzero(remaining)
        sat_now = np.minimum(caps, counts) ** params.alpha
        sat_next = np.minimum(caps, counts[None, :] + indicators[idx])
        gains = (sat_next**params.alpha - sat_now) @ weights
        np.maximum(gains, 0.0, out=gains)
        threshold = quantile_threshold(gains, q)
        pool = idx[gains >= threshold - _TIE_TOL]
        pick = int(pool[rng.integers(pool.size)])
        order.append(pick)
        counts += indicators[pick]
        remaining[pick] = False
    return [matrix.candidate_ids[i] for i in order]


def _result(matrix, params, order, trial_index, per_trial, seed):
    score = objective(matrix, order, params)
    return SelectionResult(
        selected=order,
        score=score,
        trial_index=trial_index,
        per_trial_scores=per_trial if per_trial is not None else [score.value],
        seed_used=seed,
        params_echo=params,
    )


def greedy_select(matrix: BinaryMatrix, params: SelectionParams) -> SelectionResult:
    """Pick an argmax of marginal gain at every step until |X| = k.

    Exact ties among argmaxima are broken uniformly at random from the
    seeded generator.  Raises InfeasibleError when k exceeds the pool size.
    """
    _check_feasible(matrix, params)
    rng = np.random.default_rng(params.seed)
    order = _run_trial(matrix, params, q=1.0, rng=rng)
    return _result(matrix, params, order, 0, None, params.seed)


def randomized_select(matrix: BinaryMatrix, params: SelectionParams) -> SelectionResult:
    """Each step picks uniformly from the top-q quantile of marginal gains.

    The quantile threshold is nearest-rank over all remaining candidates'
    gains (zero gains included), so q=1.0 reduces exactly to greedy_select.
    """
    _check_feasible(matrix, params)
    rng = np.random.default_rng(params.seed)
    order = _run_trial(matrix, params, q=params.q, rng=rng)
    return _result(matrix, params, order, 0, None, params.seed)


def monte_carlo_select(matrix: BinaryMatrix, params: SelectionParams,
                       workers: int = 1) -> SelectionResult:
    """Best of params.n_trials randomized restarts.

    Trial j runs randomized_select with a child seed derived from
    (params.seed, j); the highest-scoring trial wins, ties going to the
    lowest trial index.  Results are identical for any ``workers`` value;
    the thread pool only shortens the wall clock.
    """
    _check_feasible(matrix, params)
    seeds = [trial_seed(params.seed, j) for j in range(params.n_trials)]

    def one_trial(child_seed: int) -> tuple[list[str], float]:
        rng = np.random.default_rng(child_seed)
        order = _run_trial(matrix, params, q=params.q, rng=rng)
        return order, objective(matrix, order, params).value

    if workers > 1 and params.n_trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one_trial, seeds))
    else:
        outcomes = [one_trial(s) for s in seeds]
    per_trial = [value for _, value in outcomes]
    best = max(range(len(per_trial)), key=lambda j: (per_trial[j], -j))
    return _result(matrix, params, outcomes[best][0], best, per_trial,
                   params.seed)
