import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as spi

from avgmomentum import (DomainError, NumericalError, build_quadrature, empirical_measure, integrate,
                         lambda_weighted, marchenko_pastur, sample_wishart_problem, uniform_measure)
from avgmomentum.spectrum import SpectralMeasure, moments, read_eigenvalues


def mp_moment_oracle(k, sigma, r):
    """int lam^k dMP via QUADPACK with the algebraic endpoint weight (continuous part only)."""
    lo, hi = sigma**2 * (1 - math.sqrt(r)) ** 2, sigma**2 * (1 + math.sqrt(r)) ** 2
    val, _ = spi.quad(lambda x: x ** (k - 1) / (2 * math.pi * sigma**2 * r), lo, hi,
                      weight="alg", wvar=(0.5, 0.5), epsabs=1e-14, epsrel=1e-14)
    return val


class TestMarchenkoPastur:
    def test_edges(self):
        m = marchenko_pastur(1.0, 0.5)
        assert m.lower == pytest.approx(0.0857864, abs=1e-7)
        assert m.upper == pytest.approx(2.9142136, abs=1e-7)
        assert m.atoms == ()

    def test_atom_at_zero_for_wide_matrices(self):
        m = marchenko_pastur(1.0, 4.0)
        assert m.atoms == ((0.0, 0.75),)
        q = build_quadrature(m, 4000)
        assert q.total_mass == pytest.approx(1.0, abs=1e-6)

    def test_normalization(self, mp):
        assert integrate(build_quadrature(mp, 4000), lambda x: 1.0) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("k, expected", [(1, 1.0), (2, 1.5)])
    def test_moments(self, mp, k, expected):
        # oracle first: QUADPACK confirms the closed forms sigma^2 and sigma^4 (1 + r)
        assert mp_moment_oracle(k, 1.0, 0.5) == pytest.approx(expected, abs=1e-12)
        assert moments(build_quadrature(mp, 4000), [k])[0] == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("sigma, r", [(0, 0.5), (-1, 0.5), (1, 0), (1, -2), (1, 1)])
    def test_rejects_bad_parameters(self, sigma, r):
        with pytest.raises(DomainError):
            marchenko_pastur(sigma, r)

    @given(st.floats(0.1, 5.0), st.floats(0.05, 5.0).filter(lambda r: abs(r - 1) > 1e-3))
    def test_edge_identities(self, sigma, r):
        m = marchenko_pastur(sigma, r)
        assert m.lower * m.upper == pytest.approx(sigma**4 * (1 - r) ** 2, rel=1e-12)
        assert m.lower + m.upper == pytest.approx(2 * sigma**2 * (1 + r), rel=1e-12)

    @settings(deadline=None, max_examples=20)
    @given(st.floats(0.3, 3.0), st.floats(0.1, 4.0).filter(lambda r: abs(r - 1) > 0.05))
    def test_normalizes_for_any_parameters(self, sigma, r):
        q = build_quadrature(marchenko_pastur(sigma, r), 4000)
        assert q.total_mass == pytest.approx(1.0, abs=1e-6)


class TestUniform:
    def test_density(self, unif):
        assert np.all(unif.density(np.linspace(1, 2, 7)) == 1.0)

    def test_moments(self, unif):
        q = build_quadrature(unif, 64)
        assert integrate(q, lambda x: x) == pytest.approx(1.5, abs=1e-12)
        assert integrate(q, lambda x: x**2) == pytest.approx(7 / 3, abs=1e-12)

    @pytest.mark.parametrize("k", range(21))
    def test_monomials_exact(self, unif, k):
        exact = (2 ** (k + 1) - 1) / (k + 1)
        assert integrate(build_quadrature(unif, 64), lambda x: x**k) == pytest.approx(exact, rel=1e-12)

    @pytest.mark.parametrize("lo, hi", [(0, 1), (-1, 2), (2, 2), (3, 1)])
    def test_rejects_bad_interval(self, lo, hi):
        with pytest.raises(DomainError):
            uniform_measure(lo, hi)


class TestEmpirical:
    def test_counts(self):
        m = empirical_measure([1, 1, 2, 4])
        assert m.atoms == ((1.0, 0.5), (2.0, 0.25), (4.0, 0.25))
        assert (m.lower, m.upper) == (1.0, 4.0)
        assert m.is_atomic

    def test_single(self):
        assert empirical_measure([3]).atoms == ((3.0, 1.0),)

    def test_integrate_ignores_node_count(self):
        q = build_quadrature(empirical_measure([1, 2]), 16)
        assert integrate(q, lambda x: x) == pytest.approx(1.5)

    @pytest.mark.parametrize("eigs", [[], [1, -0.5], [0, 0]])
    def test_rejects(self, eigs):
        with pytest.raises(DomainError):
            empirical_measure(eigs)

    def test_wishart_spectrum_near_mp_edges(self, mp):
        eigs = np.linalg.eigvalsh(sample_wishart_problem(200, 400, 1.0, seed=0).hessian)
        assert mp.lower - 0.1 <= eigs.min() and eigs.max() <= mp.upper + 0.1
        m = empirical_measure(eigs)
        assert m.lower == eigs.min() and m.upper == eigs.max()

    def test_read_file(self, tmp_path):
        p = tmp_path / "eigs.txt"
        p.write_text("# spectrum\n1.5\n\n2.25\n")
        assert list(read_eigenvalues(p)) == [1.5, 2.25]
        p.write_text("1.0\nabc\n")
        with pytest.raises(DomainError):
            read_eigenvalues(p)


class TestLambdaWeighted:
    def test_uniform(self, unif):
        w = lambda_weighted(unif)
        assert not w.probability
        assert integrate(build_quadrature(w, 64), lambda x: 1.0) == pytest.approx(1.5, abs=1e-12)

    def test_atom_at_zero_vanishes(self):
        m = marchenko_pastur(1.0, 4.0)
        w = lambda_weighted(m)
        assert w.atoms == ()
        stripped = SpectralMeasure(m.lower, m.upper, m.density)
        qa = build_quadrature(w, 2000)
        qb = build_quadrature(lambda_weighted(stripped), 2000)
        for f in (lambda x: 1.0, lambda x: x, lambda x: np.cos(x), lambda x: x**5):
            assert integrate(qa, f) == integrate(qb, f)

    def test_mp_is_scaled_semicircle(self, mp):
        w = lambda_weighted(mp)
        lam = np.linspace(mp.lower, mp.upper, 50)
        semicircle = np.sqrt(np.clip((mp.upper - lam) * (lam - mp.lower), 0, None)) / (2 * math.pi * 0.5)
        np.testing.assert_allclose(w.density(lam), semicircle, atol=1e-14)


class TestQuadrature:
    def test_too_few_nodes(self, unif):
        with pytest.raises(DomainError):
            build_quadrature(unif, 15)

    def test_weights_positive_and_mass(self, mp):
        q = build_quadrature(mp, 4000)
        assert np.all(q.weights > 0)
        assert np.all((q.nodes >= mp.lower) & (q.nodes <= mp.upper))
        assert q.weights.sum() == pytest.approx(1.0, rel=1e-6)

    def test_nonfinite_integrand(self, unif):
        with pytest.raises(NumericalError):
            integrate(build_quadrature(unif, 16), lambda x: np.where(x > 1.5, np.inf, 0.0))

    @pytest.mark.parametrize("factory", [lambda: marchenko_pastur(1, 0.5), lambda: marchenko_pastur(2, 3),
                                         lambda: uniform_measure(0.5, 9), lambda: empirical_measure([1, 2, 2])])
    def test_every_constructor_normalizes(self, factory):
        assert integrate(build_quadrature(factory(), 4000), lambda x: 1.0) == pytest.approx(1.0, abs=1e-6)

    def test_atoms_inside_support_rejected(self, unif):
        with pytest.raises(DomainError):
            SpectralMeasure(1.0, 2.0, unif.density, ((1.5, 0.1),))
