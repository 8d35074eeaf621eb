"""Deterministic seed derivation.

Every stochastic stage draws from ``numpy.random.default_rng`` seeded with a
``SeedSequence`` built from the root seed plus a path of stage labels, so a
whole pipeline replays from one integer:

    rng = stage_rng(root, "emulate", "attribute", 0)

Labels may be strings or non-negative integers; strings are hashed with
CRC32 so the derivation is stable across interpreter runs.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_to_int(label: int | str) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    label = int(label)
    if label < 0:
        raise ValueError(f"seed labels must be non-negative, got {label}")
    return label


def derive_seed(root: int, *labels: int | str) -> np.random.SeedSequence:
    """Return the ``SeedSequence`` for the stage named by ``labels``."""
    root = int(root)
    if root < 0:
        raise ValueError(f"seed must be non-negative, got {root}")
    return np.random.SeedSequence(entropy=root, spawn_key=tuple(_label_to_int(x) for x in labels))


def stage_rng(root: int, *labels: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, *labels))
