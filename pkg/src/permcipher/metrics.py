"""Power means of rank-displacement distributions.

Absolute displacements with ``alpha <= 1`` grade disclosure risk (lower alpha
weighs the least-moved records more); relative displacements between two
keys with ``alpha >= 1`` grade information loss (higher alpha weighs the
largest distortions more).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DimensionError, DomainError, RangeError
from .perm import DEFAULT_EPSILON, PermutationKey, displacement

GEOMETRIC_ALPHA = 1e-9
LOG_SPACE_ALPHA = 20.0
DEFAULT_CUTOFF = 100.0

RISK_GRID = (-5.0, 1.0)
LOSS_GRID = (1.0, 5.0)
GRID_STEP = 0.01


@dataclass(frozen=True, eq=False)
class DistanceDistribution:
    values: np.ndarray
    kind: Literal["absolute", "relative"]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise DomainError("empty distance distribution")
        if not np.all(v > 0):
            raise DomainError("distance distributions must be strictly positive (apply the epsilon floor)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class AversionCurve:
    alphas: np.ndarray
    values: np.ndarray
    kind: Literal["risk", "information-loss"]
    epsilon: float = DEFAULT_EPSILON
    normalized: bool = False
    label: str = ""

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AversionCurve):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.label == other.label
            and np.array_equal(self.alphas, other.alphas)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def at(self, alpha: float) -> float:
        idx = np.flatnonzero(np.isclose(self.alphas, alpha, rtol=0, atol=1e-12))
        if idx.size == 0:
            raise KeyError(f"alpha={alpha} is not on the grid")
        return float(self.values[idx[0]])


def power_mean(p, alpha: float, cutoff: float = DEFAULT_CUTOFF) -> float:
    """Generalized mean ``((1/n) sum p_i**alpha) ** (1/alpha)``; geometric at 0.

    Beyond ``|alpha| > cutoff`` the limits ``min(p)`` / ``max(p)`` are returned.
    """
    v = p.values if isinstance(p, DistanceDistribution) else np.asarray(p, dtype=float).ravel()
    if v.size == 0:
        raise DomainError("empty distance distribution")
    if not np.all(v > 0):
        raise DomainError("power means need strictly positive entries")
    alpha = float(alpha)
    if alpha > cutoff:
        return float(v.max())
    if alpha < -cutoff:
        return float(v.min())
    # work around the geometric mean: log M = c + log(mean(exp(alpha * d))) / alpha
    # with d = log v - c; Jensen puts the mean at >= 1 so log1p never cancels
    logs = np.log(v)
    c = float(np.mean(logs))
    d = logs - c
    if abs(alpha) < GEOMETRIC_ALPHA:
        out = float(np.exp(c))
    elif abs(alpha) > LOG_SPACE_ALPHA:
        out = float(np.exp(c + (logsumexp(alpha * d) - np.log(v.size)) / alpha))
    else:
        out = float(np.exp(c + np.log1p(np.mean(np.expm1(alpha * d))) / alpha))
    return min(max(out, float(v.min())), float(v.max()))


def alpha_grid(lo: float, hi: float, step: float = GRID_STEP) -> np.ndarray:
    """Inclusive grid ``lo, lo+step, ..., hi`` rounded to the step's decimals."""
    if step <= 0:
        raise RangeError(f"grid step must be > 0, got {step}")
    if hi < lo:
        raise RangeError(f"grid upper bound {hi} is below lower bound {lo}")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = lo + step * np.arange(count)
    decimals = max(0, -int(np.floor(np.log10(step))) + 2)
    return np.round(grid, decimals)


def _floored(raw: np.ndarray, epsilon: float, scale: float) -> np.ndarray:
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    v = np.abs(raw).astype(float) / scale
    v[raw == 0] = epsilon
    return v


def absolute_displacement(
    k: PermutationKey, epsilon: float = DEFAULT_EPSILON, normalize: bool = False
) -> DistanceDistribution:
    scale = (k.n - 1) if normalize else 1.0
    return DistanceDistribution(_floored(displacement(k, epsilon).signed, epsilon, scale), "absolute")


def relative_displacement(
    kA: PermutationKey, kB: PermutationKey, epsilon: float = DEFAULT_EPSILON, normalize: bool = False
) -> DistanceDistribution:
    """``|signed_A - signed_B|`` per position, floored at ``epsilon``."""
    if kA.n != kB.n:
        raise DimensionError(f"keys have sizes {kA.n} and {kB.n}")
    diff = displacement(kA, epsilon).signed - displacement(kB, epsilon).signed
    scale = (kA.n - 1) if normalize else 1.0
    return DistanceDistribution(_floored(diff, epsilon, scale), "relative")


def _curve(dist: DistanceDistribution, alphas, kind, epsilon, normalize, label, cutoff) -> AversionCurve:
    a = np.asarray(alphas, dtype=float).ravel()
    if a.size > 1 and np.any(np.diff(a) <= 0):
        raise RangeError("alpha grid must be strictly increasing")
    vals = np.array([power_mean(dist, x, cutoff) for x in a])
    # the power-mean inequality holds exactly; rounding must not break it
    vals = np.maximum.accumulate(vals)
    a.setflags(write=False)
    vals.setflags(write=False)
    return AversionCurve(a, vals, kind, float(epsilon), bool(normalize), label)


def risk_profile(
    k: PermutationKey,
    alphas: Sequence[float] | np.ndarray | None = None,
    epsilon: float = DEFAULT_EPSILON,
    normalize: bool = False,
    label: str = "",
    cutoff: float = DEFAULT_CUTOFF,
) -> AversionCurve:
    """Disclosure-risk curve of one key; requires every ``alpha <= 1``."""
    if alphas is None:
        alphas = alpha_grid(*RISK_GRID)
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas > 1):
        raise RangeError(f"risk profiles need alpha <= 1, got max {alphas.max()}")
    return _curve(absolute_displacement(k, epsilon, normalize), alphas, "risk", epsilon, normalize, label, cutoff)


def info_loss_profile(
    kA: PermutationKey,
    kB: PermutationKey,
    alphas: Sequence[float] | np.ndarray | None = None,
    epsilon: float = DEFAULT_EPSILON,
    normalize: bool = False,
    label: str = "",
    cutoff: float = DEFAULT_CUTOFF,
) -> AversionCurve:
    """Information-loss curve of a key pair; requires every ``alpha >= 1``."""
    if alphas is None:
        alphas = alpha_grid(*LOSS_GRID)
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas < 1):
        raise RangeError(f"information-loss profiles need alpha >= 1, got min {alphas.min()}")
    dist = relative_displacement(kA, kB, epsilon, normalize)
    return _curve(dist, alphas, "information-loss", epsilon, normalize, label, cutoff)
