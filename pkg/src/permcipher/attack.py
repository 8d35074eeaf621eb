"""Maximum-knowledge record linkage.

The attacker holds the original dataset and the full anonymized release but
not the record correspondence: the release is row-shuffled by an unknown
permutation ``B`` and relabelled.  Linkage assigns each released record to
an original one; the hidden truth is used only for scoring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Literal, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .dataset import Dataset
from .errors import DegenerateInputError, DimensionError, ParameterError
from .ranks import ranks

Strategy = Literal["greedy", "optimal-assignment"]


@dataclass(frozen=True)
class LinkageResult:
    assignment: dict
    correct_rate: float
    method: Literal["rank", "distance"]
    strategy: Strategy
    total_cost: float


def shuffle_records(
    Y: Dataset, seed: int | np.random.Generator, identity: bool = False
) -> tuple[Dataset, dict[Hashable, Hashable]]:
    """Row-shuffle ``Y`` and give it fresh opaque IDs.

    Returns the shuffled release and the hidden truth, a mapping from each
    new ID to the original record ID it came from.  ``identity=True`` forces
    ``B`` to the identity (IDs are still replaced).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = np.arange(Y.n) if identity else rng.permutation(Y.n)
    new_ids = tuple(f"anon-{i + 1}" for i in range(Y.n))
    shuffled = Dataset(Y.values[order], record_ids=new_ids, column_names=Y.column_names)
    truth = {new_ids[i]: Y.record_ids[int(order[i])] for i in range(Y.n)}
    return shuffled, truth


def unshuffle(shuffled: Dataset, truth: Mapping[Hashable, Hashable], original_ids) -> Dataset:
    """Undo :func:`shuffle_records` using its truth mapping."""
    pos = {rid: i for i, rid in enumerate(shuffled.record_ids)}
    back = {orig: new for new, orig in truth.items()}
    rows = [pos[back[rid]] for rid in original_ids]
    return Dataset(shuffled.values[rows], record_ids=tuple(original_ids), column_names=shuffled.column_names)


def _check_shapes(X: Dataset, Y: Dataset) -> None:
    if X.shape != Y.shape:
        raise DimensionError(f"datasets have shapes {X.shape} and {Y.shape}")


def rank_cost(X: Dataset, Y: Dataset) -> np.ndarray:
    """``cost[i, r] = sum_j |rank_Xj(i) - rank_Yj(r)|`` (ascending ranks)."""
    _check_shapes(X, Y)
    rx = np.column_stack([ranks(X.column(j), "ascending").ranks for j in range(X.p)])
    ry = np.column_stack([ranks(Y.column(j), "ascending").ranks for j in range(Y.p)])
    return cdist(rx.astype(float), ry.astype(float), metric="cityblock")


def distance_cost(X: Dataset, Y: Dataset) -> np.ndarray:
    """Euclidean distance between attribute tuples, each dataset z-scored on its own."""
    _check_shapes(X, Y)

    def zscore(D: Dataset) -> np.ndarray:
        sd = D.values.std(axis=0, ddof=1)
        if np.any(sd == 0):
            j = int(np.flatnonzero(sd == 0)[0])
            raise DegenerateInputError(f"attribute {D.column_names[j]!r} has zero variance")
        return (D.values - D.values.mean(axis=0)) / sd

    return cdist(zscore(X), zscore(Y), metric="euclidean")


def link(cost: np.ndarray, strategy: Strategy = "greedy") -> np.ndarray:
    """Original-record index claimed for each released record (column of ``cost``).

    Greedy takes each column's minimum (ties to the lowest original index)
    and may claim an original twice; optimal assignment is injective and
    minimizes the total cost.
    """
    if strategy == "greedy":
        return np.argmin(cost, axis=0)
    if strategy == "optimal-assignment":
        rows, cols = linear_sum_assignment(cost)
        claim = np.empty(cost.shape[1], dtype=np.int64)
        claim[cols] = rows
        return claim
    raise ParameterError(f"unknown linkage strategy {strategy!r}")


def _score(X, Y, cost, truth, method, strategy) -> LinkageResult:
    claim = link(cost, strategy)
    assignment = {Y.record_ids[r]: X.record_ids[int(i)] for r, i in enumerate(claim)}
    if truth is None:
        rate = float("nan")
    else:
        hits = sum(assignment[rid] == truth[rid] for rid in Y.record_ids)
        rate = hits / Y.n
    total = float(cost[claim, np.arange(Y.n)].sum())
    return LinkageResult(assignment, rate, method, strategy, total)


def rank_linkage(
    X: Dataset, Y_shuffled: Dataset, strategy: Strategy = "greedy", truth: Mapping | None = None
) -> LinkageResult:
    """Link on summed absolute rank differences.

    ``truth`` is the mapping returned by :func:`shuffle_records`; without it
    ``correct_rate`` is NaN.
    """
    return _score(X, Y_shuffled, rank_cost(X, Y_shuffled), truth, "rank", strategy)


def distance_linkage(
    X: Dataset, Y_shuffled: Dataset, strategy: Strategy = "greedy", truth: Mapping | None = None
) -> LinkageResult:
    return _score(X, Y_shuffled, distance_cost(X, Y_shuffled), truth, "distance", strategy)
