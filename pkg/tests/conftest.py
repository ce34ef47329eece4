import numpy as np
import pytest

from cohortselect.core import BinaryColumn, BinaryMatrix, SelectionParams


def random_matrix(rng, n_candidates=None, n_columns=None, max_candidates=30,
                  max_columns=6):
    """Random pool with independent 0/1 columns, random weights and targets.

    Columns use distinct source attributes so mutual exclusivity never
    constrains the draw.
    """
    n = n_candidates or int(rng.integers(2, max_candidates + 1))
    m = n_columns or int(rng.integers(1, max_columns + 1))
    ids = [f"c{i}" for i in range(n)]
    cols = []
    for j in range(m):
        cols.append(BinaryColumn(
            column_id=f"a{j}=yes",
            source_attribute=f"a{j}",
            value_label="yes",
            target=float(rng.uniform(0.0, 1.0)),
            weight=float(rng.uniform(0.0, 3.0)),
            indicator=rng.integers(0, 2, size=n).astype(np.uint8),
        ))
    return BinaryMatrix(candidate_ids=ids, columns=cols)


def four_candidate_matrix(targets=(0.5, 0.5)):
    """Pool A(g=1,s=0), B(1,1), C(0,1), D(0,0) with 0.5/0.5 targets."""
    return BinaryMatrix(
        candidate_ids=["A", "B", "C", "D"],
        columns=[
            BinaryColumn("g=yes", "g", "yes", targets[0], 1.0,
                         np.array([1, 1, 0, 0])),
            BinaryColumn("s=yes", "s", "yes", targets[1], 1.0,
                         np.array([0, 1, 1, 0])),
        ],
    )


@pytest.fixture
def abcd():
    return four_candidate_matrix()


@pytest.fixture
def abcd_params():
    return SelectionParams(k=2, seed=7, alpha=1.0)
