import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permcipher.dataset import Dataset
from permcipher.emulators import (
    MethodConfig,
    additive_noise,
    mask,
    multiplicative_noise,
    profile_method,
    rank_swap,
    rank_swap_source,
    swap_window,
)
from permcipher.errors import DegenerateInputError, ParameterError
from permcipher.metrics import info_loss_profile, risk_profile
from permcipher.perm import PermutationKey, displacement
from permcipher.ranks import extract_key_group, ranks

from conftest import tie_free

EPS = 1e-6


class TestRankSwap:
    def test_window_one_pairs_neighbours(self):
        src = rank_swap_source(6, 1, seed=0)
        assert (src + 1).tolist() == [2, 1, 4, 3, 6, 5]

    def test_window(self):
        assert swap_window(1080, 0.30) == 324
        with pytest.raises(ParameterError):
            swap_window(10, 0.01)
        with pytest.raises(ParameterError):
            swap_window(10, 0)

    @given(st.integers(2, 200), st.integers(1, 50), st.integers(0, 2**32 - 1))
    def test_source_is_involution_within_window(self, n, w, seed):
        src = rank_swap_source(n, w, seed)
        assert sorted(src) == list(range(n))
        assert np.array_equal(src[src], np.arange(n))
        assert np.abs(src - np.arange(n)).max(initial=0) <= w

    @pytest.mark.parametrize("seed", range(10))
    def test_marginal_kept(self, seed):
        x = np.random.default_rng(seed).normal(size=300)
        y = rank_swap(x, 0.1, seed)
        assert sorted(y) == sorted(x)

    @pytest.mark.parametrize("seed", range(5))
    def test_data_independent(self, seed):
        x = tie_free(np.random.default_rng(seed), 200, 1).column(0)
        # any strictly increasing transform leaves the rank-space key unchanged
        X = Dataset(np.column_stack([x]))
        k1 = extract_key_group(X, X.with_values(rank_swap(x, 0.2, seed)[:, None]))[0]
        z = np.exp(x / 10) * 7 + 3
        Xz = Dataset(np.column_stack([z]))
        k2 = extract_key_group(Xz, Xz.with_values(rank_swap(z, 0.2, seed)[:, None]))[0]
        assert k1 == k2

    def test_deterministic(self):
        x = np.arange(50.0)
        assert np.array_equal(rank_swap(x, 0.2, 3), rank_swap(x, 0.2, 3))


class TestNoise:
    def test_additive_deterministic(self):
        x = np.linspace(0, 1, 40)
        assert np.array_equal(additive_noise(x, 0.5, 9), additive_noise(x, 0.5, 9))

    def test_additive_tiny_ratio_keeps_ranks(self):
        x = np.random.default_rng(0).normal(size=500)
        y = additive_noise(x, 1e-12, 1)
        assert np.array_equal(ranks(x).ranks, ranks(y).ranks)

    def test_additive_scale(self):
        x = np.random.default_rng(0).normal(5, 3, size=20_000)
        y = additive_noise(x, 0.5, 2)
        assert np.std(y - x, ddof=1) == pytest.approx(0.5 * np.std(x, ddof=1), rel=0.03)

    def test_additive_zero_variance(self):
        with pytest.raises(DegenerateInputError):
            additive_noise([2.0, 2.0, 2.0], 0.5, 0)
        with pytest.raises(ParameterError):
            additive_noise([1.0, 2.0], 0, 0)

    def test_additive_many_untouched(self):
        x = np.random.default_rng(1).normal(size=1080)
        X = Dataset(x[:, None])
        k = extract_key_group(X, X.with_values(additive_noise(x, 0.5, 1)[:, None]))[0]
        d = np.abs(displacement(k).signed)
        assert np.mean(d <= 2) > 0.02
        assert risk_profile(k, [-5.0]).values[0] < 1

    def test_multiplicative_identity_and_scaling(self):
        x = np.array([3.0, -1.0, 7.5, 2.0])
        assert np.array_equal(multiplicative_noise(x, 1, 1, 0), x)
        assert np.array_equal(multiplicative_noise(x, 2.5, 2.5, 0), 2.5 * x)

    def test_multiplicative_range(self):
        x = np.linspace(1, 2, 100)
        f = multiplicative_noise(x, 0.9, 1.1, 4) / x
        assert f.min() >= 0.9 and f.max() <= 1.1

    def test_multiplicative_errors(self):
        with pytest.raises(ParameterError):
            multiplicative_noise([1.0, 2.0], 0, 1, 0)
        with pytest.raises(ParameterError):
            multiplicative_noise([1.0, 2.0], 1.2, 1.1, 0)

    def test_multiplicative_separated_values_keep_ranks(self):
        # gaps of 2x swamp a +-1% factor
        x = 2.0 ** np.arange(1, 30)
        y = multiplicative_noise(x, 0.99, 1.01, 3)
        assert np.array_equal(ranks(x).ranks, ranks(y).ranks)


class TestMethodConfig:
    def test_factories(self):
        assert MethodConfig.rank_swap().swap_pct == 0.30
        assert MethodConfig.multiplicative(0.5, 1.5).mult_range == (0.5, 1.5)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(method="rank-swap"),
            dict(method="rank-swap", swap_pct=0.2, noise_ratio=0.1),
            dict(method="additive-noise", noise_ratio=-1),
            dict(method="multiplicative-noise", mult_range=(0, 1)),
            dict(method="shuffle"),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            MethodConfig(**kwargs)


class TestProfile:
    def setup_method(self):
        self.X = tie_free(np.random.default_rng(2), 120, 3)

    def test_matches_manual_pipeline(self):
        cfg = MethodConfig.additive(0.4, seed=11)
        prof = profile_method(self.X, cfg, [-1, 0, 1], [1, 2])
        Y = mask(self.X, cfg)
        K = extract_key_group(self.X, Y)
        assert prof.masked == Y and prof.keys == K
        names = self.X.column_names
        for j in range(3):
            assert prof.risk[names[j]] == risk_profile(K[j], [-1, 0, 1], label=names[j])
        label = f"{names[0]}|{names[2]}"
        assert prof.loss[label] == info_loss_profile(K[0], K[2], [1, 2], label=label)
        assert len(prof.loss) == 3

    def test_identity_like(self):
        prof = profile_method(self.X, MethodConfig.multiplicative(1, 1), [-3, 0, 1], [1, 3])
        for curve in list(prof.risk.values()) + list(prof.loss.values()):
            assert np.allclose(curve.values, EPS, rtol=1e-12)

    def test_attributes_get_distinct_streams(self):
        cfg = MethodConfig.rank_swap(0.2, seed=1)
        Xs = Dataset(np.column_stack([np.arange(100.0)] * 2))
        Y = mask(Xs, cfg)
        assert not np.array_equal(Y.column(0), Y.column(1))

    def test_rank_swap_reference_scale(self):
        x = np.random.default_rng(0).normal(size=(1080, 1))
        prof = profile_method(Dataset(x), MethodConfig.rank_swap(0.30, seed=0), [1.0], [1.0])
        assert prof.risk["X1"].values[0] == pytest.approx(160, rel=0.15)
