"""Permutation cipher for microdata anonymization."""

__version__ = "0.1.0"

from .dataset import Dataset
from .errors import CalibrationError, CipherError
from .metrics import AversionCurve, DistanceDistribution, info_loss_profile, power_mean, relative_displacement, risk_profile
from .perm import (
    KeyGroup,
    PermutationKey,
    apply,
    compose,
    compose_groups,
    displacement,
    identity_key,
    invert,
    random_key,
)
from .ranks import encrypt, extract_key_group, rank_preserving_noise, ranks, residual_noise, reverse_map, sort_key

__all__ = [
    "AversionCurve",
    "CalibrationError",
    "CipherError",
    "Dataset",
    "DistanceDistribution",
    "KeyGroup",
    "PermutationKey",
    "apply",
    "compose",
    "compose_groups",
    "displacement",
    "encrypt",
    "extract_key_group",
    "identity_key",
    "info_loss_profile",
    "invert",
    "power_mean",
    "random_key",
    "rank_preserving_noise",
    "ranks",
    "relative_displacement",
    "residual_noise",
    "reverse_map",
    "risk_profile",
    "sort_key",
]
