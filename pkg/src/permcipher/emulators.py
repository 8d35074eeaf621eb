"""Classical masking methods and their permutation profiles.

Each emulator masks one attribute; :func:`profile_method` masks a dataset,
reverse-maps it, extracts the key group and measures its curves.  Attribute
``j`` is masked with stage ``("emulate", method, j)`` of the config seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal

import numpy as np

from .dataset import Dataset
from .errors import DegenerateInputError, InvalidSizeError, ParameterError
from .metrics import AversionCurve, LOSS_GRID, RISK_GRID, alpha_grid, info_loss_profile, risk_profile
from .perm import DEFAULT_EPSILON, KeyGroup
from .ranks import extract_key_group
from .seeding import stage_rng

Method = Literal["rank-swap", "additive-noise", "multiplicative-noise"]


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _values(values) -> np.ndarray:
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 2:
        raise InvalidSizeError(f"need at least 2 values, got {v.size}")
    return v


def swap_window(n: int, swap_pct: float) -> int:
    if not 0 < swap_pct <= 1:
        raise ParameterError(f"swap_pct must lie in (0, 1], got {swap_pct}")
    w = int(round(swap_pct * n))
    if w < 1:
        raise ParameterError(f"swap window round({swap_pct} * {n}) = {w} is below 1")
    return w


def rank_swap_source(n: int, window: int, seed) -> np.ndarray:
    """0-based key of one rank-swap pass over ``n`` sorted positions.

    Scanning left to right, each unswapped position is paired with a
    uniformly chosen unswapped position at most ``window`` ranks above it.
    A position with no free partner left stays in place.
    """
    rng = _rng(seed)
    src = np.arange(n)
    free = np.ones(n, dtype=bool)
    for i in range(n):
        if not free[i]:
            continue
        hi = min(n, i + window + 1)
        cands = np.flatnonzero(free[i + 1 : hi])
        if cands.size == 0:
            continue
        j = i + 1 + int(cands[rng.integers(cands.size)])
        src[i], src[j] = j, i
        free[i] = free[j] = False
    return src


def rank_swap(values, swap_pct: float, seed) -> np.ndarray:
    """Swap values within ``round(swap_pct * n)`` ranks; the marginal is kept exactly."""
    v = _values(values)
    src = rank_swap_source(v.size, swap_window(v.size, swap_pct), seed)
    order = np.argsort(v, kind="stable")
    out = np.empty_like(v)
    out[order] = v[order][src]
    return out


def additive_noise(values, noise_ratio: float, seed) -> np.ndarray:
    """Add centred Gaussian noise with sd ``noise_ratio * sd(values)``."""
    if not noise_ratio > 0:
        raise ParameterError(f"noise_ratio must be > 0, got {noise_ratio}")
    v = _values(values)
    sd = float(np.std(v, ddof=1))
    if sd == 0:
        raise DegenerateInputError("zero-variance attribute: additive noise scale is undefined")
    return v + _rng(seed).normal(0.0, noise_ratio * sd, size=v.size)


def multiplicative_noise(values, lo: float, hi: float, seed) -> np.ndarray:
    """Multiply each value by an independent ``Uniform[lo, hi]`` factor."""
    if not lo > 0:
        raise ParameterError(f"lo must be > 0, got {lo}")
    if hi < lo:
        raise ParameterError(f"hi ({hi}) must be >= lo ({lo})")
    v = _values(values)
    if lo == hi:
        return v * lo
    return v * _rng(seed).uniform(lo, hi, size=v.size)


@dataclass(frozen=True)
class MethodConfig:
    method: Method
    seed: int = 0
    swap_pct: float | None = None
    noise_ratio: float | None = None
    mult_range: tuple[float, float] | None = None

    def __post_init__(self):
        params = {
            "rank-swap": "swap_pct",
            "additive-noise": "noise_ratio",
            "multiplicative-noise": "mult_range",
        }
        if self.method not in params:
            raise ParameterError(f"unknown method {self.method!r}")
        wanted = params[self.method]
        for name in params.values():
            given = getattr(self, name) is not None
            if given != (name == wanted):
                state = "requires" if name == wanted else "does not take"
                raise ParameterError(f"{self.method} {state} {name}")
        if self.method == "rank-swap" and not 0 < self.swap_pct <= 1:
            raise ParameterError(f"swap_pct must lie in (0, 1], got {self.swap_pct}")
        if self.method == "additive-noise" and not self.noise_ratio > 0:
            raise ParameterError(f"noise_ratio must be > 0, got {self.noise_ratio}")
        if self.method == "multiplicative-noise":
            lo, hi = self.mult_range
            if not (0 < lo <= hi):
                raise ParameterError(f"mult_range needs 0 < lo <= hi, got {self.mult_range}")

    @classmethod
    def rank_swap(cls, swap_pct: float = 0.30, seed: int = 0) -> "MethodConfig":
        return cls("rank-swap", seed, swap_pct=swap_pct)

    @classmethod
    def additive(cls, noise_ratio: float = 0.5, seed: int = 0) -> "MethodConfig":
        return cls("additive-noise", seed, noise_ratio=noise_ratio)

    @classmethod
    def multiplicative(cls, lo: float = 0.75, hi: float = 1.25, seed: int = 0) -> "MethodConfig":
        return cls("multiplicative-noise", seed, mult_range=(lo, hi))


def mask_column(values, cfg: MethodConfig, j: int = 0) -> np.ndarray:
    rng = stage_rng(cfg.seed, "emulate", cfg.method, j)
    if cfg.method == "rank-swap":
        return rank_swap(values, cfg.swap_pct, rng)
    if cfg.method == "additive-noise":
        return additive_noise(values, cfg.noise_ratio, rng)
    return multiplicative_noise(values, *cfg.mult_range, rng)


def mask(X: Dataset, cfg: MethodConfig) -> Dataset:
    return X.with_values(np.column_stack([mask_column(X.column(j), cfg, j) for j in range(X.p)]))


@dataclass(frozen=True)
class MethodProfile:
    config: MethodConfig
    masked: Dataset
    keys: KeyGroup
    risk: dict[str, AversionCurve] = field(default_factory=dict)
    loss: dict[str, AversionCurve] = field(default_factory=dict)


def pair_label(a: str, b: str) -> str:
    return f"{a}|{b}"


def profile_keys(
    K: KeyGroup,
    names,
    alphas_risk=None,
    alphas_loss=None,
    epsilon: float = DEFAULT_EPSILON,
    normalize: bool = False,
) -> tuple[dict[str, AversionCurve], dict[str, AversionCurve]]:
    """Risk curve per key and loss curve per key pair."""
    ar = alpha_grid(*RISK_GRID) if alphas_risk is None else alphas_risk
    al = alpha_grid(*LOSS_GRID) if alphas_loss is None else alphas_loss
    risk = {names[j]: risk_profile(K[j], ar, epsilon, normalize, label=names[j]) for j in range(K.p)}
    loss = {}
    for a, b in combinations(range(K.p), 2):
        label = pair_label(names[a], names[b])
        loss[label] = info_loss_profile(K[a], K[b], al, epsilon, normalize, label=label)
    return risk, loss


def profile_method(
    X: Dataset,
    cfg: MethodConfig,
    alphas_risk=None,
    alphas_loss=None,
    epsilon: float = DEFAULT_EPSILON,
    normalize: bool = False,
) -> MethodProfile:
    """Mask, reverse-map, extract keys, then measure every curve."""
    Y = mask(X, cfg)
    K = extract_key_group(X, Y, epsilon)
    risk, loss = profile_keys(K, X.column_names, alphas_risk, alphas_loss, epsilon, normalize)
    return MethodProfile(cfg, Y, K, risk, loss)
