from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidDataError, InvalidSizeError


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` records by ``p`` numeric attributes with stable record IDs.

    ``values`` is a read-only ``(n, p)`` float array; ``column(j)`` returns
    attribute ``j`` as a 1-d view.
    """

    record_ids: tuple
    values: np.ndarray
    column_names: tuple[str, ...]

    def __init__(
        self,
        values: np.ndarray | Sequence[Sequence[float]],
        record_ids: Iterable[Hashable] | None = None,
        column_names: Iterable[str] | None = None,
    ):
        arr = np.array(values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DimensionError(f"dataset values must be 2-d, got shape {arr.shape}")
        n, p = arr.shape
        if n < 2:
            raise InvalidSizeError(f"a dataset needs n >= 2 records, got {n}")
        if p < 1:
            raise InvalidSizeError("a dataset needs at least one attribute")
        ids = tuple(range(1, n + 1)) if record_ids is None else tuple(record_ids)
        if len(ids) != n:
            raise DimensionError(f"{len(ids)} record ids for {n} records")
        if len(set(ids)) != n:
            raise InvalidDataError("record ids must be unique")
        names = tuple(f"X{j + 1}" for j in range(p)) if column_names is None else tuple(column_names)
        if len(names) != p:
            raise DimensionError(f"{len(names)} column names for {p} attributes")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "record_ids", ids)
        object.__setattr__(self, "column_names", names)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[float]], **kwargs) -> "Dataset":
        return cls(np.column_stack([np.asarray(c, dtype=float) for c in columns]), **kwargs)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def with_values(self, values: np.ndarray) -> "Dataset":
        """Same IDs and names, new values of identical shape."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.shape:
            raise DimensionError(f"shape {values.shape} does not match {self.shape}")
        return Dataset(values, record_ids=self.record_ids, column_names=self.column_names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.record_ids == other.record_ids
            and self.column_names == other.column_names
            and self.shape == other.shape
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, p={self.p}, columns={list(self.column_names)})"
