import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from relspace.errors import DegenerateDirections, EmptyAccumulator, InsufficientSamples
from relspace.geometry import CylCoords
from relspace.stats import (
    KAPPA_MAX,
    CylindricalDistribution,
    Gaussian2D,
    GaussianAccumulator,
    VonMises,
    VonMisesAccumulator,
    bessel_ratio,
    distribution_from_dict,
    distribution_to_dict,
    finalize,
    mle_gaussian,
    mle_vonmises,
    solve_concentration,
)


def two_pass_gaussian(samples):
    """Independent oracle: textbook two-pass mean/covariance with 1/n."""
    x = np.asarray(samples, dtype=float)
    mean = x.mean(axis=0)
    d = x - mean
    return mean, d.T @ d / len(x)


def batch_vonmises_stats(angles):
    """Independent oracle: mean direction and resultant length."""
    x = np.column_stack([np.cos(angles), np.sin(angles)])
    s = x.sum(axis=0)
    return math.atan2(s[1], s[0]), np.linalg.norm(s) / len(angles)


def unit_dist(kappa=0.0):
    return CylindricalDistribution(
        Gaussian2D(np.zeros(2), np.eye(2)), VonMises(0.0, kappa)
    )


class TestPdf:
    def test_identity_gaussian_uniform_angle_at_mean(self):
        d = unit_dist(kappa=0.0)
        assert d.pdf(CylCoords(0, 0, 0)) == pytest.approx(1 / (2 * math.pi) ** 2, rel=1e-9)

    def test_kappa_zero_is_angle_independent(self):
        d = unit_dist(kappa=0.0)
        values = {d.pdf(CylCoords(0.5, phi, -0.3)) for phi in np.linspace(-math.pi, math.pi, 17)}
        assert max(values) - min(values) < 1e-15

    def test_mode_dominates_samples(self):
        d = CylindricalDistribution(
            Gaussian2D(np.array([1.0, 0.5]), np.array([[0.04, 0.01], [0.01, 0.09]])),
            VonMises(0.3, 4.0),
        )
        rng = np.random.default_rng(7)
        peak = d.pdf(CylCoords(1.0, 0.3, 0.5))
        samples = d.sample(rng, 1000)
        assert np.all(d.pdf_many(samples) <= peak + 1e-15)

    def test_pdf_many_matches_scalar(self):
        d = CylindricalDistribution(
            Gaussian2D(np.array([0.7, -0.2]), np.array([[0.3, -0.1], [-0.1, 0.5]])),
            VonMises(-1.2, 2.5),
        )
        coords = np.array([[0.5, 0.1, 0.0], [1.5, -3.0, 1.2], [0.0, 2.2, -0.7]])
        expected = [d.pdf(CylCoords(r, p, h)) for r, p, h in coords]
        assert d.pdf_many(coords) == pytest.approx(expected, rel=1e-12)

    def test_large_kappa_stays_finite(self):
        vm = VonMises(0.0, KAPPA_MAX)
        assert math.isfinite(vm.pdf(0.0)) and vm.pdf(0.0) > 0
        assert vm.pdf(math.pi) == pytest.approx(0.0, abs=1e-300)

    @pytest.mark.parametrize("kappa", [0.0, 1.0, 10.0, 100.0])
    def test_vonmises_integrates_to_one(self, kappa):
        vm = VonMises(0.4, kappa)
        total, _ = integrate.quad(vm.pdf, -math.pi, math.pi, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_gaussian_integrates_to_one(self):
        g = Gaussian2D(np.array([0.5, -1.0]), np.array([[0.09, 0.03], [0.03, 0.25]]))
        s0, s1 = math.sqrt(0.09), math.sqrt(0.25)
        xs = np.linspace(0.5 - 6 * s0, 0.5 + 6 * s0, 401)
        ys = np.linspace(-1.0 - 6 * s1, -1.0 + 6 * s1, 401)
        grid = np.array([[g.pdf((x, y)) for y in ys] for x in xs])
        total = np.trapezoid(np.trapezoid(grid, ys, axis=1), xs)
        assert total == pytest.approx(1.0, abs=1e-3)


class TestSampler:
    def test_determinism(self):
        d = CylindricalDistribution(
            Gaussian2D(np.array([1.0, 0.5]), 0.01 * np.eye(2)), VonMises(0.4, 5.0)
        )
        a = d.sample(np.random.default_rng(42), 100)
        b = d.sample(np.random.default_rng(42), 100)
        assert np.array_equal(a, b)

    def test_degenerate_concentration_pins_samples(self):
        # kappa at the cap gives angle std ~ 1/sqrt(kappa) = 0.01 rad, so
        # samples concentrate within a few sigma of the mean; the Gaussian
        # block at the regularization floor is tighter still.
        d = CylindricalDistribution(
            Gaussian2D(np.array([1.0, 0.5]), 1e-12 * np.eye(2)), VonMises(0.4, KAPPA_MAX)
        )
        samples = d.sample(np.random.default_rng(3), 200)
        assert np.all(np.abs(samples[:, 0] - 1.0) < 1e-3)
        assert np.all(np.abs(samples[:, 2] - 0.5) < 1e-3)
        assert np.all(np.abs(samples[:, 1] - 0.4) < 6e-2)

    def test_gaussian_block_law_of_large_numbers(self):
        mean = np.array([2.0, -1.0])
        cov = np.array([[0.25, 0.1], [0.1, 0.5]])
        d = CylindricalDistribution(Gaussian2D(mean, cov), VonMises(0.0, 1.0))
        n = 100_000
        samples = d.sample(np.random.default_rng(11), n)
        for i, col in enumerate((0, 2)):
            tol = 3 * math.sqrt(cov[i, i] / n)
            assert abs(samples[:, col].mean() - mean[i]) < tol

    def test_circular_mean_recovery(self):
        d = unit_dist()
        d = CylindricalDistribution(d.rh, VonMises(1.1, 5.0))
        samples = d.sample(np.random.default_rng(5), 100_000)
        mu, _ = batch_vonmises_stats(samples[:, 1])
        assert abs(mu - 1.1) < 0.05

    def test_radius_clamped_nonnegative(self):
        d = CylindricalDistribution(
            Gaussian2D(np.array([0.0, 0.0]), np.eye(2)), VonMises(0.0, 0.0)
        )
        samples = d.sample(np.random.default_rng(9), 10_000)
        assert np.all(samples[:, 0] >= 0)


class TestBatchMLE:
    def test_gaussian_two_points(self):
        g = mle_gaussian([(1, 2), (3, 4)])
        assert g.mean == pytest.approx([2, 3], abs=1e-12)
        assert g.covariance == pytest.approx(np.array([[1, 1], [1, 1]]), abs=1e-9)

    def test_gaussian_identical_points(self):
        g = mle_gaussian([(0.5, 0.5)] * 10)
        assert g.covariance == pytest.approx(1e-12 * np.eye(2), abs=1e-15)

    def test_gaussian_insufficient(self):
        with pytest.raises(InsufficientSamples):
            mle_gaussian([(1, 2)])

    def test_gaussian_monte_carlo_recovery(self):
        mean = np.array([0.8, -0.4])
        cov = np.array([[0.36, -0.12], [-0.12, 0.25]])
        rng = np.random.default_rng(13)
        samples = rng.multivariate_normal(mean, cov, size=100_000)
        g = mle_gaussian(samples)
        assert np.linalg.norm(g.mean - mean) < 0.02
        assert np.linalg.norm(g.covariance - cov) < 0.05

    def test_vonmises_mean_of_two(self):
        vm = mle_vonmises([0.0, math.pi / 2])
        assert vm.mean_angle == pytest.approx(math.pi / 4, abs=1e-12)

    def test_vonmises_kappa_solves_bessel_ratio(self):
        vm = mle_vonmises([0.0, math.pi / 2])
        r_bar = math.sqrt(2) / 2
        assert bessel_ratio(vm.concentration) == pytest.approx(r_bar, abs=1e-6)

    def test_vonmises_antipodal(self):
        with pytest.raises(DegenerateDirections):
            mle_vonmises([0.0, math.pi])

    def test_vonmises_insufficient(self):
        with pytest.raises(InsufficientSamples):
            mle_vonmises([0.3])


class TestKappaSolver:
    def test_zero_resultant(self):
        assert solve_concentration(0.0) == 0.0

    def test_residuals_and_monotonicity(self):
        r_bars = np.linspace(0.0, 0.999, 1000)
        kappas = [solve_concentration(r) for r in r_bars]
        for r, k in zip(r_bars, kappas):
            if k < KAPPA_MAX:
                assert abs(bessel_ratio(k) - r) <= 1e-8
        assert all(b >= a for a, b in zip(kappas, kappas[1:]))

    def test_cap(self):
        assert solve_concentration(0.9999999) == KAPPA_MAX
        assert solve_concentration(1.0) == KAPPA_MAX

    def test_bessel_ratio_strictly_increasing(self):
        ks = np.linspace(0, KAPPA_MAX, 100)
        vals = [bessel_ratio(k) for k in ks]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestAccumulators:
    def test_gaussian_first_sample(self):
        acc = GaussianAccumulator().add((1, 2))
        assert acc.n == 1
        assert acc.mean == pytest.approx([1, 2])
        assert acc.m2 == pytest.approx(np.zeros((2, 2)))

    def test_gaussian_second_sample_recurrence(self):
        acc = GaussianAccumulator().add((1, 2)).add((3, 4))
        assert acc.mean == pytest.approx([2, 3], abs=1e-12)
        assert acc.m2 == pytest.approx(np.array([[2, 2], [2, 2]]), abs=1e-12)

    def test_gaussian_matches_two_pass(self):
        rng = np.random.default_rng(21)
        samples = rng.normal(size=(1000, 2)) * [3.0, 0.5] + [10.0, -2.0]
        acc = GaussianAccumulator()
        for s in samples:
            acc.add(s)
        mean, cov = two_pass_gaussian(samples)
        assert acc.mean == pytest.approx(mean, abs=1e-9)
        assert acc.m2 / acc.n == pytest.approx(cov, abs=1e-9)

    def test_vonmises_base_cases(self):
        acc = VonMisesAccumulator().add(0.0)
        assert acc.n == 1
        assert acc.direction_sum == pytest.approx([1, 0])
        acc.add(math.pi / 2)
        assert acc.n == 2
        assert acc.direction_sum == pytest.approx([1, 1])

    def test_vonmises_matches_batch(self):
        rng = np.random.default_rng(22)
        angles = rng.uniform(-math.pi, math.pi, size=1000) * 0.4 + 0.9
        acc = VonMisesAccumulator()
        for a in angles:
            acc.add(a)
        batch = mle_vonmises(angles)
        inc = acc.vonmises()
        assert inc.mean_angle == pytest.approx(batch.mean_angle, abs=1e-9)
        assert bessel_ratio(inc.concentration) == pytest.approx(
            bessel_ratio(batch.concentration), abs=1e-9
        )

    def test_norm_bounded_by_count(self):
        rng = np.random.default_rng(23)
        acc = VonMisesAccumulator()
        for a in rng.uniform(-math.pi, math.pi, size=500):
            acc.add(a)
        assert np.linalg.norm(acc.direction_sum) <= acc.n + 1e-9


class TestFinalize:
    def test_matches_batch_examples(self):
        g = GaussianAccumulator().add((1, 2)).add((3, 4))
        v = VonMisesAccumulator().add(0.0).add(math.pi / 2)
        dist = finalize(g, v)
        batch_g = mle_gaussian([(1, 2), (3, 4)])
        batch_v = mle_vonmises([0.0, math.pi / 2])
        assert dist.rh.mean == pytest.approx(batch_g.mean, abs=1e-12)
        assert dist.rh.covariance == pytest.approx(batch_g.covariance, abs=1e-12)
        assert dist.phi.mean_angle == pytest.approx(batch_v.mean_angle, abs=1e-12)
        assert dist.phi.concentration == pytest.approx(batch_v.concentration, abs=1e-9)

    def test_empty_accumulator(self):
        with pytest.raises(EmptyAccumulator):
            finalize(GaussianAccumulator(), VonMisesAccumulator())

    def test_count_mismatch(self):
        g = GaussianAccumulator().add((0, 0))
        v = VonMisesAccumulator().add(0.0).add(1.0)
        with pytest.raises(ValueError):
            finalize(g, v)

    @given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=2, max_size=60))
    @settings(max_examples=100)
    def test_gaussian_mean_order_invariant(self, pts):
        fwd = GaussianAccumulator()
        rev = GaussianAccumulator()
        for p in pts:
            fwd.add(p)
        for p in reversed(pts):
            rev.add(p)
        assert fwd.mean == pytest.approx(rev.mean, abs=1e-9)

    @given(
        st.lists(
            st.tuples(st.floats(-3, 3), st.floats(-math.pi, math.pi), st.floats(-3, 3)),
            min_size=2,
            max_size=50,
        )
    )
    @settings(max_examples=100)
    def test_stream_equivalence_property(self, rows):
        g = GaussianAccumulator()
        v = VonMisesAccumulator()
        for r, phi, h in rows:
            g.add((abs(r), h))
            v.add(phi)
        try:
            dist = finalize(g, v)
        except DegenerateDirections:
            return
        gauss = mle_gaussian([(abs(r), h) for r, _, h in rows])
        assert dist.rh.mean == pytest.approx(gauss.mean, abs=1e-9)
        assert dist.rh.covariance == pytest.approx(gauss.covariance, abs=1e-9)


class TestSerializationRecord:
    def test_round_trip_exact(self):
        d = CylindricalDistribution(
            Gaussian2D(np.array([0.123456789012345, -2.5]), np.array([[0.31, 0.07], [0.07, 0.9]])),
            VonMises(0.777, 31.5),
        )
        back = distribution_from_dict(distribution_to_dict(d))
        assert np.array_equal(back.rh.mean, d.rh.mean)
        assert np.array_equal(back.rh.covariance, d.rh.covariance)
        assert back.phi == d.phi


class TestValidation:
    def test_covariance_symmetry_enforced(self):
        with pytest.raises(ValueError):
            Gaussian2D(np.zeros(2), np.array([[1.0, 0.2], [0.1, 1.0]]))

    def test_covariance_positive_definite(self):
        with pytest.raises(ValueError):
            Gaussian2D(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_kappa_range(self):
        with pytest.raises(ValueError):
            VonMises(0.0, -1.0)
        with pytest.raises(ValueError):
            VonMises(0.0, KAPPA_MAX * 2)
