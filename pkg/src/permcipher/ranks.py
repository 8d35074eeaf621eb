"""Ranking, reverse mapping and the per-attribute cipher.

Ties are always broken by current row order (earlier row first), in both
directions.  Identities that hinge on exact ranks (composition, key round
trip) therefore only hold on tie-free attributes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dataset import Dataset
from .errors import DimensionError, InvalidDataError, InvalidSizeError, ParameterError
from .perm import DEFAULT_EPSILON, KeyGroup, PermutationKey, apply, invert
from .seeding import stage_rng

Direction = Literal["ascending", "descending"]


@dataclass(frozen=True, eq=False)
class RankVector:
    ranks: np.ndarray
    direction: Direction
    tie_rule: str = "by-record-order"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankVector):
            return NotImplemented
        return self.direction == other.direction and bool(np.array_equal(self.ranks, other.ranks))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class NoiseMatrix:
    """``(n, p)`` noise in attribute units; never re-ranks its base dataset."""

    entries: np.ndarray


def _check_values(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise InvalidSizeError(f"need at least 2 values, got {v.size}")
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise InvalidDataError(f"non-finite value at record {bad + 1}")
    return v


def _ascending_order(v: np.ndarray) -> np.ndarray:
    return np.argsort(v, kind="stable")


def _ascending_ranks(v: np.ndarray) -> np.ndarray:
    r = np.empty(v.size, dtype=np.int64)
    r[_ascending_order(v)] = np.arange(1, v.size + 1)
    return r


def ranks(values, direction: Direction = "descending") -> RankVector:
    """Rank vector with rank 1 for the largest (descending) or smallest (ascending) value."""
    v = _check_values(values)
    if direction == "ascending":
        r = _ascending_ranks(v)
    elif direction == "descending":
        r = np.empty(v.size, dtype=np.int64)
        r[np.argsort(-v, kind="stable")] = np.arange(1, v.size + 1)
    else:
        raise ParameterError(f"unknown rank direction {direction!r}")
    r.setflags(write=False)
    return RankVector(r, direction)


def sort_key(values) -> PermutationKey:
    """Stable key whose application sorts ``values`` ascending."""
    return PermutationKey.from_source(_ascending_order(_check_values(values)))


def _check_aligned(X: Dataset, Y: Dataset) -> None:
    if X.shape != Y.shape:
        raise DimensionError(f"datasets have shapes {X.shape} and {Y.shape}")
    if X.record_ids != Y.record_ids:
        raise DimensionError("record ids of the two datasets are not aligned row by row")


def reverse_map(X: Dataset, Y: Dataset) -> Dataset:
    """Original values of each attribute, rearranged into the masked rank order."""
    _check_aligned(X, Y)
    Z = np.empty_like(X.values)
    for j in range(X.p):
        x = _check_values(X.column(j))
        y = _check_values(Y.column(j))
        Z[:, j] = np.sort(x, kind="stable")[_ascending_ranks(y) - 1]
    return X.with_values(Z)


def extract_key(x, y) -> PermutationKey:
    """Key ``D`` with ``encrypt`` of ``x`` under ``D`` equal to the reverse map of (x, y)."""
    x = _check_values(x)
    y = _check_values(y)
    if x.size != y.size:
        raise DimensionError(f"attribute lengths differ: {x.size} vs {y.size}")
    m = np.empty(x.size, dtype=np.int64)
    m[_ascending_ranks(x) - 1] = _ascending_ranks(y)
    return PermutationKey(m)


def extract_key_group(X: Dataset, Y: Dataset, epsilon: float = DEFAULT_EPSILON) -> KeyGroup:
    """Recover ``D_1..D_p`` from an (original, masked) pair.

    ``epsilon`` is accepted for signature symmetry with the metrics; the keys
    themselves do not depend on it.
    """
    _check_aligned(X, Y)
    return KeyGroup(extract_key(X.column(j), Y.column(j)) for j in range(X.p))


def residual_noise(X: Dataset, Y: Dataset) -> NoiseMatrix:
    """``Y - reverse_map(X, Y)``: the part of the masking that is not permutation."""
    Z = reverse_map(X, Y)
    E = Y.values - Z.values
    E.setflags(write=False)
    return NoiseMatrix(E)


def encrypt_column(x, key: PermutationKey) -> np.ndarray:
    x = _check_values(x)
    if x.size != key.n:
        raise DimensionError(f"attribute of length {x.size} does not match key size {key.n}")
    A = sort_key(x)
    return apply(invert(A), apply(key, apply(A, x)))


def encrypt(X: Dataset, K: KeyGroup) -> Dataset:
    """Sort each attribute, apply its key in rank space, then undo the sort."""
    if K.p != X.p or K.n != X.n:
        raise DimensionError(f"key group ({K.n} x {K.p}) does not match dataset {X.shape}")
    out = np.column_stack([encrypt_column(X.column(j), K[j]) for j in range(X.p)])
    return X.with_values(out)


def rank_preserving_noise(values, seed, scale: float = 0.5) -> np.ndarray:
    """Uniform noise that cannot change the rank vector of ``values``.

    Each record's noise is bounded by ``scale`` times half the gap to its
    nearest distinct neighbour; tied records get exactly zero.
    """
    if not 0 < scale < 1:
        raise ParameterError(f"scale must lie in (0, 1), got {scale}")
    v = _check_values(values)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = _ascending_order(v)
    s = v[order]
    gaps = np.diff(s)
    left = np.concatenate(([np.inf], gaps))
    right = np.concatenate((gaps, [np.inf]))
    tied = (left == 0) | (right == 0)
    nearest = np.minimum(left, right)
    bound = np.where(tied | ~np.isfinite(nearest), 0.0, scale * nearest / 2)
    draws = rng.uniform(-1.0, 1.0, size=v.size)
    noise = np.empty_like(v)
    noise[order] = draws * bound
    return noise


def dataset_rank_preserving_noise(Y: Dataset, seed: int, scale: float = 0.5) -> NoiseMatrix:
    """Column-wise :func:`rank_preserving_noise`; attribute ``j`` uses stage ``("noise", j)``."""
    cols = [rank_preserving_noise(Y.column(j), stage_rng(seed, "noise", j), scale) for j in range(Y.p)]
    E = np.column_stack(cols)
    E.setflags(write=False)
    return NoiseMatrix(E)
