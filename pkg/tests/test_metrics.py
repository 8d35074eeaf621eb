import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from permcipher.errors import DimensionError, DomainError, RangeError
from permcipher.metrics import (
    DistanceDistribution,
    alpha_grid,
    info_loss_profile,
    power_mean,
    relative_displacement,
    risk_profile,
)
from permcipher.perm import PermutationKey, identity_key, random_key

EPS = 1e-6
FIVE_KEY = PermutationKey([5, 2, 3, 1, 4])

dists = st.lists(st.floats(0.1, 100.0), min_size=1, max_size=40)
alphas = st.floats(-30.0, 30.0)


def direct(p, alpha):
    # oracle: the textbook formula at 50 significant digits
    with mpmath.workdps(50):
        xs = [mpmath.mpf(float(x)) for x in p]
        if abs(alpha) < 1e-20:  # below 50 digits x**a rounds to 1
            return float(mpmath.exp(mpmath.fsum(mpmath.log(x) for x in xs) / len(xs)))
        a = mpmath.mpf(alpha)
        return float((mpmath.fsum(x**a for x in xs) / len(xs)) ** (1 / a))


class TestPowerMean:
    def test_constant(self):
        assert power_mean([3.5] * 7, -2.3) == 3.5

    def test_geometric(self):
        assert power_mean([1, 4], 0) == pytest.approx(2.0, rel=1e-15)

    def test_arithmetic(self):
        assert power_mean([1, 2, 3], 1) == pytest.approx(2.0, rel=1e-15)

    def test_harmonic(self):
        assert power_mean([1, 9], -1) == pytest.approx(1.8, rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            power_mean([0.0, 1.0], 1)
        with pytest.raises(DomainError):
            DistanceDistribution(np.array([1.0, -1.0]), "absolute")

    def test_limits(self):
        p = [0.5, 2, 7]
        assert power_mean(p, -1000) == 0.5
        assert power_mean(p, 1000) == 7
        assert power_mean(p, -80) == pytest.approx(0.5 * (1 / 3) ** (-1 / 80), rel=1e-12)

    def test_tiny_alpha_is_geometric(self):
        p = [1.0, 2.0, 8.0]
        assert power_mean(p, 1e-12) == pytest.approx(power_mean(p, 0), rel=1e-12)
        assert power_mean(p, 1e-6) == pytest.approx(power_mean(p, 0), rel=1e-5)

    def test_log_space_branch_continuous(self):
        p = np.linspace(0.5, 40, 25)
        assert power_mean(p, 20.0) == pytest.approx(power_mean(p, 20.0 + 1e-9), rel=1e-8)
        assert power_mean(p, -20.0) == pytest.approx(power_mean(p, -20.0 - 1e-9), rel=1e-8)

    @given(dists, alphas)
    def test_against_direct_formula(self, p, a):
        assert power_mean(p, a) == pytest.approx(direct(p, a), rel=1e-9)

    @given(dists, alphas, st.randoms())
    def test_neutral(self, p, a, rnd):
        q = list(p)
        rnd.shuffle(q)
        assert power_mean(q, a) == pytest.approx(power_mean(p, a), rel=1e-9)

    @given(dists, alphas, st.integers(2, 5))
    def test_size_independent(self, p, a, m):
        assert power_mean(p * m, a) == pytest.approx(power_mean(p, a), rel=1e-9)

    @given(dists, alphas, st.sampled_from([0.5, 2.0, 10.0]))
    def test_homogeneous(self, p, a, lam):
        assert power_mean(np.multiply(p, lam), a) == pytest.approx(lam * power_mean(p, a), rel=1e-9)

    @given(dists, st.floats(-50, 50), st.floats(0.01, 10))
    def test_monotone_in_alpha(self, p, a, gap):
        assert power_mean(p, a - gap) <= power_mean(p, a) * (1 + 1e-12)

    @given(st.lists(st.floats(0.5, 50.0), min_size=2, max_size=30), st.floats(-50, 50), st.floats(0.01, 10))
    def test_strictly_monotone_unless_constant(self, p, a, gap):
        assume(max(p) / min(p) > 1.01)
        assert power_mean(p, a - gap) < power_mean(p, a)


class TestRelativeDisplacement:
    def test_same_key(self):
        k = random_key(30, 1)
        assert np.all(relative_displacement(k, k, EPS).values == EPS)

    def test_identity_vs_five_key(self):
        d = relative_displacement(identity_key(5), FIVE_KEY, EPS).values
        assert d.tolist() == [4, EPS, EPS, 3, 1]

    def test_symmetric(self):
        a, b = random_key(20, 1), random_key(20, 2)
        np.testing.assert_array_equal(relative_displacement(a, b).values, relative_displacement(b, a).values)

    def test_uses_signed_displacements(self):
        # equal magnitudes in opposite directions are still a distortion
        a = PermutationKey([2, 1, 3])
        b = PermutationKey([1, 3, 2])
        assert relative_displacement(a, b).values.tolist() == [1, 2, 1]

    def test_size_mismatch(self):
        with pytest.raises(DimensionError):
            relative_displacement(identity_key(3), identity_key(4))

    def test_normalized(self):
        d = relative_displacement(identity_key(5), FIVE_KEY, EPS, normalize=True).values
        assert d.tolist() == [1.0, EPS, EPS, 0.75, 0.25]


class TestProfiles:
    def test_identity_risk_curve(self):
        c = risk_profile(identity_key(10), [-3, -1, 0, 1], EPS)
        assert np.allclose(c.values, EPS, rtol=1e-12)

    def test_five_key_mean(self):
        c = risk_profile(FIVE_KEY, [1.0])
        assert c.values[0] == pytest.approx((4 + 3 + 1 + 2 * EPS) / 5, rel=1e-12)

    def test_risk_alpha_range(self):
        with pytest.raises(RangeError):
            risk_profile(FIVE_KEY, [0.5, 1.5])

    def test_loss_alpha_range(self):
        with pytest.raises(RangeError):
            info_loss_profile(FIVE_KEY, FIVE_KEY, [0.5, 2])

    def test_loss_same_keys(self):
        k = random_key(40, 3)
        assert np.allclose(info_loss_profile(k, k).values, EPS, rtol=1e-12)

    def test_loss_identity_vs_five_key(self):
        c = info_loss_profile(identity_key(5), FIVE_KEY, [1.0])
        assert c.values[0] == pytest.approx(1.6, rel=1e-6)

    def test_loss_large_alpha_tends_to_max(self):
        a, b = random_key(50, 5), random_key(50, 6)
        top = relative_displacement(a, b).values.max()
        c = info_loss_profile(a, b, [1, 50, 99, 500])
        assert c.values[-1] == top
        assert c.values[2] == pytest.approx(top, rel=0.05)

    def test_default_grids(self):
        c = risk_profile(random_key(30, 0))
        assert c.alphas[0] == -5.0 and c.alphas[-1] == 1.0 and len(c.alphas) == 601
        c = info_loss_profile(random_key(30, 0), random_key(30, 1))
        assert c.alphas[0] == 1.0 and c.alphas[-1] == 5.0 and len(c.alphas) == 401

    @pytest.mark.parametrize("seed", range(10))
    def test_curves_nondecreasing(self, seed):
        k = random_key(60, seed)
        assert np.all(np.diff(risk_profile(k).values) >= 0)
        assert np.all(np.diff(info_loss_profile(k, random_key(60, seed + 100)).values) >= 0)

    def test_normalized_scale(self):
        k = random_key(41, 0)
        raw = risk_profile(k, [1.0]).values[0]
        norm = risk_profile(k, [1.0], normalize=True).values[0]
        assert norm == pytest.approx(raw / 40, rel=1e-6)


def test_alpha_grid_step():
    g = alpha_grid(-1, 1, 0.01)
    assert len(g) == 201 and g[100] == 0.0 and g[-1] == 1.0
    with pytest.raises(RangeError):
        alpha_grid(0, 1, 0)
