"""Permutation keys in one-line notation and their group algebra.

A key of size ``n`` is stored as ``map``: a 1-based sequence where ``map[i]``
is the sorted position whose value lands at position ``i`` once the key is
applied.  In matrix form this is the 0/1 matrix ``D`` with ``D[i, map[i]] = 1``,
so that ``apply(k, s) == D @ s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, InvalidDataError, InvalidSizeError

DEFAULT_EPSILON = 1e-6


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PermutationKey:
    """A bijection on rank positions ``1..n``."""

    map: np.ndarray

    def __init__(self, map: Iterable[int]):
        arr = np.array(list(map) if not isinstance(map, np.ndarray) else map, dtype=np.int64).ravel()
        n = arr.size
        if n < 2:
            raise InvalidSizeError(f"a permutation key needs n >= 2, got n={n}")
        if arr.min() < 1 or arr.max() > n or np.unique(arr).size != n:
            raise InvalidDataError(f"key of size {n} is not a bijection on 1..{n}")
        object.__setattr__(self, "map", _frozen(arr.copy()))

    @classmethod
    def from_source(cls, source: np.ndarray) -> "PermutationKey":
        """Build from a 0-based source-index array."""
        return cls(np.asarray(source, dtype=np.int64) + 1)

    @property
    def n(self) -> int:
        return int(self.map.size)

    @property
    def source(self) -> np.ndarray:
        """0-based view of ``map`` (``source[i] = map[i] - 1``)."""
        return self.map - 1

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermutationKey):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.map, other.map))

    def __hash__(self) -> int:
        return hash(self.map.tobytes())

    def __repr__(self) -> str:
        if self.n <= 12:
            return f"PermutationKey({self.map.tolist()})"
        head = ", ".join(str(v) for v in self.map[:6])
        return f"PermutationKey(n={self.n}, map=[{head}, ...])"

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.map, np.arange(1, self.n + 1)))


@dataclass(frozen=True, eq=False)
class KeyGroup:
    """One key per attribute; all keys share the same ``n``."""

    keys: tuple[PermutationKey, ...]

    def __init__(self, keys: Iterable[PermutationKey]):
        keys = tuple(keys)
        if not keys:
            raise InvalidSizeError("a key group needs at least one key")
        sizes = {k.n for k in keys}
        if len(sizes) != 1:
            raise DimensionError(f"keys in a group must share n, got sizes {sorted(sizes)}")
        object.__setattr__(self, "keys", keys)

    @property
    def n(self) -> int:
        return self.keys[0].n

    @property
    def p(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        return iter(self.keys)

    def __getitem__(self, j: int) -> PermutationKey:
        return self.keys[j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KeyGroup):
            return NotImplemented
        return self.keys == other.keys

    def __hash__(self) -> int:
        return hash(self.keys)


@dataclass(frozen=True, eq=False)
class DisplacementVector:
    """Signed rank shifts and their epsilon-floored magnitudes."""

    signed: np.ndarray
    absolute: np.ndarray
    epsilon: float


def identity_key(n: int) -> PermutationKey:
    if n < 2:
        raise InvalidSizeError(f"a permutation key needs n >= 2, got n={n}")
    return PermutationKey(np.arange(1, n + 1))


def identity_group(n: int, p: int) -> KeyGroup:
    return KeyGroup([identity_key(n)] * p)


def compose(outer: PermutationKey, inner: PermutationKey) -> PermutationKey:
    """Key equivalent to applying ``inner`` first, then ``outer``.

    ``apply(compose(outer, inner), s) == apply(outer, apply(inner, s))``.
    """
    if outer.n != inner.n:
        raise DimensionError(f"cannot compose keys of sizes {outer.n} and {inner.n}")
    return PermutationKey(inner.map[outer.source])


def compose_groups(outer: KeyGroup, inner: KeyGroup) -> KeyGroup:
    if outer.p != inner.p:
        raise DimensionError(f"cannot compose groups of {outer.p} and {inner.p} keys")
    return KeyGroup(compose(a, b) for a, b in zip(outer, inner))


def invert(k: PermutationKey) -> PermutationKey:
    inv = np.empty(k.n, dtype=np.int64)
    inv[k.source] = np.arange(1, k.n + 1)
    return PermutationKey(inv)


def apply(k: PermutationKey, s: Sequence | np.ndarray) -> np.ndarray | list:
    """Rearrange ``s`` so that ``out[i] = s[map[i]]``.

    numpy arrays come back as arrays; any other sequence comes back as a list.
    """
    if len(s) != k.n:
        raise DimensionError(f"sequence of length {len(s)} does not match key size {k.n}")
    if isinstance(s, np.ndarray):
        return s[k.source]
    return [s[i] for i in k.source.tolist()]


def displacement(k: PermutationKey, epsilon: float = DEFAULT_EPSILON) -> DisplacementVector:
    """Per-position rank shift ``i - map[i]``.

    Negative means the record moved down the ranking (its 1 shifted right in
    the matrix).  ``absolute`` replaces zero shifts by ``epsilon``.
    """
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    signed = np.arange(1, k.n + 1) - k.map
    absolute = np.abs(signed).astype(float)
    absolute[signed == 0] = epsilon
    return DisplacementVector(_frozen(signed), _frozen(absolute), float(epsilon))


def key_from_signed(signed: Sequence[int]) -> PermutationKey:
    """Inverse of ``displacement(k).signed``."""
    signed = np.asarray(signed, dtype=np.int64)
    return PermutationKey(np.arange(1, signed.size + 1) - signed)


def random_key(n: int, seed: int | np.random.Generator) -> PermutationKey:
    """Uniform random key; deterministic for an integer ``seed``."""
    if n < 2:
        raise InvalidSizeError(f"a permutation key needs n >= 2, got n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return PermutationKey.from_source(rng.permutation(n))
