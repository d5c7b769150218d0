import numpy as np
import pytest
from scipy import stats

from qitransfer import states, tomography
from qitransfer.exceptions import RankDeficientError
from qitransfer.random_states import random_channel, random_qubit
from qitransfer.tomography import ShotRecord

C_IN = np.array([0.3, -0.4, 0.5])
# squared Mahalanobis radius holding 95.45% of a 3-d Gaussian (the 2-sigma mass in 1-d)
CHI2_2SIGMA_3D = stats.chi2.ppf(stats.norm.cdf(2) - stats.norm.cdf(-2), df=3)


def _rms(x, shots, seeds=range(100), c=C_IN):
    rc = states.qubit_from_bloch(*c)
    errs = [
        np.linalg.norm(tomography.remote_tomography(rc, states.werner(x), "00", shots, s).c_hat - c)
        for s in seeds
    ]
    return float(np.sqrt(np.mean(np.square(errs))))


class TestSampling:
    def test_eigenstate_is_deterministic(self):
        rho = states.qubit_from_bloch(0, 0, 1)
        for seed in range(5):
            assert tomography.sample_pauli(rho, 3, 1000, seed).plus_counts == 1000
        rho = states.qubit_from_bloch(-1, 0, 0)
        assert tomography.sample_pauli(rho, 1, 1000, 0).plus_counts == 0

    def test_maximally_mixed_fraction(self):
        rho = np.eye(2) / 2
        fractions = np.array(
            [tomography.sample_pauli(rho, 3, 10**6, s).plus_counts / 10**6 for s in range(200)]
        )
        inside = np.mean((fractions >= 0.4985) & (fractions <= 0.5015))
        assert inside >= 0.99

    def test_reproducible(self):
        rho = random_qubit(np.random.default_rng(1))
        a = tomography.sample_pauli(rho, 2, 5000, 42)
        b = tomography.sample_pauli(rho, 2, 5000, 42)
        assert a == b
        assert tomography.sample_pauli(rho, 2, 5000, 43) != a

    def test_child_seeds_distinct(self):
        seeds = tomography.child_seeds(7, 3)
        assert len(set(seeds)) == 3
        assert seeds == tomography.child_seeds(7, 3)

    @pytest.mark.parametrize("axis, shots", [(0, 10), (4, 10), (1, 0)])
    def test_bad_arguments(self, axis, shots):
        with pytest.raises(ValueError):
            tomography.sample_pauli(np.eye(2) / 2, axis, shots, 0)


class TestEstimateBloch:
    def test_counts(self):
        recs = [ShotRecord(1, 100, 75, 0), ShotRecord(2, 100, 50, 0), ShotRecord(3, 100, 0, 0)]
        s_hat, err = tomography.estimate_bloch(recs)
        np.testing.assert_allclose(s_hat, [0.5, 0.0, -1.0])
        np.testing.assert_allclose(err, [2 * np.sqrt(0.75 * 0.25 / 100), 0.1, 0.0])

    def test_missing_axis(self):
        with pytest.raises(ValueError):
            tomography.estimate_bloch([ShotRecord(1, 10, 5, 0), ShotRecord(1, 10, 5, 0)])

    def test_invalid_record(self):
        with pytest.raises(ValueError):
            ShotRecord(1, 10, 11, 0)

    def test_project_to_ball(self):
        np.testing.assert_allclose(tomography.project_to_ball([2, 0, 0]), [1, 0, 0])
        np.testing.assert_allclose(tomography.project_to_ball([0.1, 0, 0]), [0.1, 0, 0])


class TestRemoteTomography:
    def test_infinite_shot_limit(self, rng):
        for _ in range(20):
            rc = random_qubit(rng)
            for x in (1.0, 0.25):
                est = tomography.remote_tomography(rc, states.werner(x), "01", None, None)
                np.testing.assert_allclose(est.c_hat, states.to_bloch(rc), atol=1e-12)
                assert np.all(est.c_cov == 0)

    def test_shot_split(self):
        est = tomography.remote_tomography(states.qubit_from_bloch(*C_IN), states.werner(1), "00", 1001, 3)
        assert [r.shots for r in est.records] == [334, 334, 333]
        assert [r.axis for r in est.records] == [1, 2, 3]

    def test_too_few_shots(self):
        with pytest.raises(ValueError):
            tomography.remote_tomography(np.eye(2) / 2, states.werner(1), "00", 2, 0)

    def test_teleportation_accuracy(self):
        rc = states.qubit_from_bloch(*C_IN)
        errs = [
            np.linalg.norm(tomography.remote_tomography(rc, states.werner(1), "00", 10**5, s).c_hat - C_IN)
            for s in range(100)
        ]
        assert np.mean(np.array(errs) < 0.02) >= 0.95

    def test_rms_scales_inverse_sqrt(self):
        scaled = [_rms(1.0, n) * np.sqrt(n) for n in (10**3, 10**4, 10**5)]
        assert max(scaled) / min(scaled) < 1.3

    def test_noisy_channel_amplifies(self):
        ratio = _rms(0.25, 10**4) / _rms(1.0, 10**4)
        # first-order prediction: 1/x gain times the larger binomial variance of s = x c
        s = 0.25 * C_IN
        predicted = 4 * np.sqrt(np.sum(1 - s**2) / np.sum(1 - C_IN**2))
        assert predicted == pytest.approx(4.36, abs=0.01)
        assert predicted / 1.3 < ratio < predicted * 1.3

    def test_covariance_coverage(self, rng):
        hits = 0
        trials = 200
        for seed in range(trials):
            rho_ab = random_channel(rng)
            rc = random_qubit(rng)
            est = tomography.remote_tomography(rc, rho_ab, "00", 10**4, seed)
            hits += est.mahalanobis2(states.to_bloch(rc)) <= CHI2_2SIGMA_3D
        assert hits / trials >= 0.90

    def test_covariance_matches_spread(self):
        rc = states.qubit_from_bloch(*C_IN)
        ests = [tomography.remote_tomography(rc, states.werner(0.5), "10", 3 * 10**4, s) for s in range(300)]
        empirical = np.cov(np.array([e.c_hat for e in ests]).T)
        predicted = ests[0].c_cov
        np.testing.assert_allclose(np.diag(empirical), np.diag(predicted), rtol=0.3)

    def test_rank_deficient_raises(self, rng):
        rho = states.product_state(random_qubit(rng), random_qubit(rng))
        with pytest.raises(RankDeficientError):
            tomography.remote_tomography(np.eye(2) / 2, rho, "00", 1000, 0)

    def test_physical_projection(self):
        rc = states.qubit_from_bloch(0, 0, 1)
        for seed in range(20):
            est = tomography.remote_tomography(rc, states.werner(0.4), "00", 300, seed, physical=True)
            assert np.linalg.norm(est.c_hat) <= 1 + 1e-12

    def test_seeded_reproducible(self):
        rc = states.qubit_from_bloch(*C_IN)
        a = tomography.remote_tomography(rc, states.werner(0.7), "11", 9000, 5)
        b = tomography.remote_tomography(rc, states.werner(0.7), "11", 9000, 5)
        assert np.array_equal(a.c_hat, b.c_hat) and a.records == b.records
