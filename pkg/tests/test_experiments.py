import numpy as np
import pytest

from avgmomentum import (DomainError, QuadraticProblem, gradient_descent_coefficients,
                         monte_carlo, optimal_coefficients, polyak_coefficients, problem_sampler,
                         run_method, sample_diagonal_problem, sample_wishart_problem, uniform_measure)
from avgmomentum.spectrum import empirical_measure


class TestProblems:
    @pytest.mark.parametrize("seed", [0, 1, 17])
    def test_wishart_structure(self, seed):
        p = sample_wishart_problem(40, 90, sigma=1.3, radius=2.0, seed=seed)
        assert np.array_equal(p.hessian, p.hessian.T)
        assert p.eigenvalues().min() >= -1e-12
        assert np.linalg.norm(p.start - p.solution) == pytest.approx(2.0, rel=1e-14)

    def test_wishart_deterministic(self):
        a, b = sample_wishart_problem(30, 60, seed=5), sample_wishart_problem(30, 60, seed=5)
        for f in ("hessian", "solution", "start"):
            assert getattr(a, f).tobytes() == getattr(b, f).tobytes()
        c = sample_wishart_problem(30, 60, seed=6)
        assert not np.array_equal(a.hessian, c.hessian)

    def test_wishart_edges(self, mp):
        eigs = sample_wishart_problem(200, 400).eigenvalues()
        assert mp.lower - 0.1 <= eigs.min() and eigs.max() <= mp.upper + 0.1

    def test_diagonal(self):
        p = sample_diagonal_problem([3.0, 1.0, 2.0], radius=0.5, seed=2)
        np.testing.assert_array_equal(np.diag(p.hessian), [3.0, 1.0, 2.0])
        assert np.linalg.norm(p.start - p.solution) == pytest.approx(0.5)

    def test_gradient(self):
        p = sample_diagonal_problem([1.0, 4.0], seed=0)
        np.testing.assert_allclose(p.gradient(p.solution), 0.0)
        np.testing.assert_allclose(p.gradient(p.start), np.diag([1.0, 4.0]) @ (p.start - p.solution))

    @pytest.mark.parametrize("H", [np.ones((2, 3)), np.array([[1.0, 2.0], [0.0, 1.0]])])
    def test_rejects_bad_hessian(self, H):
        with pytest.raises(DomainError):
            QuadraticProblem(H, np.zeros(2), np.zeros(2))

    @pytest.mark.parametrize("d, n", [(0, 5), (5, 0)])
    def test_rejects_sizes(self, d, n):
        with pytest.raises(DomainError):
            sample_wishart_problem(d, n)

    def test_sampler_dispatch(self, mp, unif):
        assert problem_sampler(mp, 20)(0).hessian.shape == (20, 20)
        np.testing.assert_allclose(np.diag(problem_sampler(unif, 5)(0).hessian), np.linspace(1, 2, 5))
        emp = empirical_measure([1.0, 2.0, 5.0])
        with pytest.raises(DomainError):
            problem_sampler(emp, 3)
        assert problem_sampler(emp, 3, eigenvalues=[1.0, 2.0, 5.0])(0).dim == 3


class TestMonteCarlo:
    def test_single_trial_is_run_method(self, mp):
        c = optimal_coefficients(mp, 8)
        sampler = problem_sampler(mp, 30, 60)
        rep = monte_carlo(sampler, c, 8, trials=1, master_seed=11)
        errs = run_method(sampler(11), c, 8)
        np.testing.assert_array_equal(rep.per_t_mean, errs / errs[0])
        assert np.all(rep.per_t_stderr == 0)
        assert (rep.trials, rep.d, rep.seed) == (1, 30, 11)

    def test_normalized_start(self, unif):
        c = polyak_coefficients(1.0, 2.0, 5)
        rep = monte_carlo(problem_sampler(unif, 10, radius=3.0), c, 5, trials=4, master_seed=2)
        assert rep.per_t_mean[0] == 1.0

    def test_parallel_bit_identical(self, mp):
        c = optimal_coefficients(mp, 10)
        sampler = problem_sampler(mp, 40, 80)
        serial = monte_carlo(sampler, c, 10, 6, master_seed=9, workers=1)
        parallel = monte_carlo(sampler, c, 10, 6, master_seed=9, workers=3)
        assert serial.per_t_mean.tobytes() == parallel.per_t_mean.tobytes()
        assert serial.per_t_stderr.tobytes() == parallel.per_t_stderr.tobytes()

    def test_optimal_beats_polyak_on_grid(self, unif):
        T = 20
        sampler = problem_sampler(unif, 400)
        opt = monte_carlo(sampler, optimal_coefficients(unif, T), T, 10)
        pm = monte_carlo(sampler, polyak_coefficients(1.0, 2.0, T), T, 10)
        assert np.all(opt.per_t_mean[1:] <= pm.per_t_mean[1:])

    def test_stderr_concentration(self, unif):
        # doubling the number of trials should shrink the standard error by about 1/sqrt(2)
        T = 5
        c = gradient_descent_coefficients(0.5, T)
        sampler = problem_sampler(uniform_measure(0.2, 2.0), 20)
        ratios = []
        for block in range(20):
            small = monte_carlo(sampler, c, T, 40, master_seed=1000 * block)
            big = monte_carlo(sampler, c, T, 80, master_seed=1000 * block + 500)
            ratios.append(big.per_t_stderr[1:] / small.per_t_stderr[1:])
        mean_ratio = float(np.mean(ratios))
        assert 0.6 <= mean_ratio <= 0.82

    def test_divergence_reported_per_trial(self):
        # trial seeds 0..3; only the problem sampled with seed 2 has a large eigenvalue
        def sampler(seed):
            eigs = [1.0, 1.5, 10.0] if seed == 2 else [1.0, 1.5, 2.0]
            return sample_diagonal_problem(eigs, seed=seed)

        c = gradient_descent_coefficients(0.5, 300)
        rep = monte_carlo(sampler, c, 300, trials=4)
        assert [i for i, _ in rep.diverged] == [2]
        assert rep.completed == 3 and np.all(np.isfinite(rep.per_t_mean))

    def test_rejects_zero_trials(self, mp):
        with pytest.raises(DomainError):
            monte_carlo(problem_sampler(mp, 5, 10), optimal_coefficients(mp, 3), 3, trials=0)
