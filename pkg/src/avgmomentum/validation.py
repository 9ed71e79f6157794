"""Numerical checks that the optimal schedules behave as the theory predicts.

Each check returns ``(passed, detail)``. :func:`run_checks` drives them; ``fast``
restricts to iterations ``t <= 50`` and skips the long-horizon and Monte Carlo checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import figures
from .experiments import monte_carlo, problem_sampler
from .methods import gradient_descent_coefficients, mp_closed_form, polyak_coefficients, polyak_rate
from .orthopoly import (b1_from_moments, coefficients_from_recurrence, eval_residual, optimal_coefficients,
                        q_ratio_sequence, stieltjes, stieltjes_recurrence)
from .rates import asymptotic_rate, error_series, rate_recurrence
from .spectrum import build_quadrature, gauss_legendre, lambda_weighted, marchenko_pastur, moments, uniform_measure


@dataclass
class Context:
    fast: bool = False
    perturb_alpha: float = 0.0

    @property
    def horizon(self) -> int:
        return 50 if self.fast else 100


def _measures():
    return [marchenko_pastur(1.0, 0.5), uniform_measure(1.0, 2.0)]


def _normalized_gram(coeffs, weight_quad, T):
    P = eval_residual(coeffs, weight_quad.all_nodes, T)
    G = (P * weight_quad.all_weights) @ P.T
    d = np.sqrt(np.diag(G))
    return G / np.outer(d, d)


def check_legendre(ctx):
    T = 50
    x, w = gauss_legendre(10 * T)
    alphas, betas, _ = stieltjes(x, w, T)
    t = np.arange(1, T + 1)
    err = max(np.abs(alphas - t / np.sqrt(4 * t**2 - 1)).max(), np.abs(betas).max())
    return err <= 1e-10, f"max deviation {err:.2e} (tol 1e-10)"


def check_chebyshev(ctx):
    T = ctx.horizon
    mp = marchenko_pastur(1.0, 0.5)
    rec = stieltjes_recurrence(build_quadrature(lambda_weighted(mp), 4000), T)
    err = max(np.abs(rec.alphas[1:] - 0.5).max(), np.abs(rec.betas[2:]).max())
    return err <= 1e-6, f"max |alpha_t - 1/2|, |beta_t| for 2 <= t <= {T}: {err:.2e} (tol 1e-6)"


def check_closed_form(ctx):
    T = 50
    opt = optimal_coefficients(marchenko_pastur(1.0, 0.5), T)
    cf = mp_closed_form(1.0, 0.5, T)
    err = max(abs(opt.b1 - cf.b1), np.abs(opt.a - cf.a).max(), np.abs(opt.b - cf.b).max())
    return err <= 1e-6, f"max elementwise difference {err:.2e} (tol 1e-6)"


def check_recurrence_consistency(ctx):
    """Schedule built from the recurrence must give residual polynomials orthogonal under lambda dmu."""
    T = 30
    worst = 0.0
    for m in _measures():
        wq = build_quadrature(lambda_weighted(m), 4000)
        rec = stieltjes_recurrence(wq, T, m.lower, m.upper)
        if ctx.perturb_alpha:
            rec = rec.perturbed(ctx.perturb_alpha)
        coeffs = coefficients_from_recurrence(rec, T)
        b1 = b1_from_moments(build_quadrature(m, 4000))
        G = _normalized_gram(coeffs, wq, T)
        off = np.abs(G - np.diag(np.diag(G))).max()
        worst = max(worst, off, abs(coeffs.b1 - b1))
    return worst <= 1e-8, f"max normalized off-diagonal / b1 mismatch {worst:.2e} (tol 1e-8)"


def check_limits(ctx):
    details, ok = [], True
    for m in _measures():
        for t, tol in ((300, 1e-2), (1000, 1e-3)):
            cmp = figures.compare_with_polyak(m, t)
            gm = abs(cmp.momentum_opt[-1] - cmp.momentum_pm)
            gs = abs(cmp.step_opt[-1] - cmp.step_pm)
            ok &= gm < tol and gs < tol
            details.append(f"{m.name} t={t}: {gm:.1e}/{gs:.1e}")
    return ok, "; ".join(details)


def check_ratio_limit(ctx):
    ok, details = True, []
    for m in _measures():
        rec = stieltjes_recurrence(build_quadrature(lambda_weighted(m), 4000), 300, m.lower, m.upper)
        m0 = rec.m0
        gap = abs(q_ratio_sequence(rec, m0, 300)[-1] - (m0 + math.sqrt(m0 * m0 - 1)))
        ok &= gap < 1e-3
        details.append(f"{m.name}: {gap:.1e}")
    return ok, "; ".join(details) + " (tol 1e-3)"


def check_residual(ctx):
    T = 50 if ctx.fast else 300
    worst_norm, worst_orth = 0.0, 0.0
    for m in _measures():
        coeffs = optimal_coefficients(m, T, figures.nodes_for(T))
        worst_norm = max(worst_norm, np.abs(eval_residual(coeffs, 0.0, T) - 1.0).max())
        G = _normalized_gram(coeffs, build_quadrature(lambda_weighted(m), 4000), 30)
        worst_orth = max(worst_orth, np.abs(G - np.diag(np.diag(G))).max())
    ok = worst_norm <= 1e-12 and worst_orth <= 1e-8
    return ok, f"|P_t(0) - 1| {worst_norm:.1e} (tol 1e-12); orthogonality {worst_orth:.1e} (tol 1e-8)"


def check_triple(ctx):
    T = 30
    ok, details = True, []
    expected_r1 = {"mp": 1.0 / 3.0, "uniform": 1.0 / 28.0}
    for m in _measures():
        q = build_quadrature(m, 4000)
        coeffs = optimal_coefficients(m, T)
        rec = rate_recurrence(coeffs, moments(q, (1,))[0], T).values
        sq = error_series(q, coeffs, T).values
        lin = error_series(q, coeffs, T, power=1).values
        err = max(np.abs(rec - sq).max(), np.abs(sq - lin).max())
        r1 = abs(rec[1] - expected_r1[m.name])
        ok &= err <= 1e-8 and r1 <= 1e-8
        details.append(f"{m.name}: {err:.1e}, r_1 off by {r1:.1e}")
    return ok, "; ".join(details) + " (tol 1e-8)"


def check_rate(ctx):
    T = 400
    ok, details = True, []
    for m in _measures():
        coeffs = optimal_coefficients(m, T, figures.nodes_for(T))
        fitted = asymptotic_rate(error_series(m, coeffs, T))
        target = polyak_rate(m.lower, m.upper)
        ok &= abs(fitted - target) < 1e-2
        details.append(f"{m.name}: {fitted:.6f} vs {target:.6f}")
    return ok, "; ".join(details) + " (tol 1e-2)"


def check_optimality(ctx):
    T = ctx.horizon
    worst = -np.inf
    for m in _measures():
        q = build_quadrature(m, 4000)
        opt = error_series(q, optimal_coefficients(m, T), T).values
        pm = error_series(q, polyak_coefficients(m.lower, m.upper, T), T).values
        gd = error_series(q, gradient_descent_coefficients(2.0 / (m.lower + m.upper), T), T).values
        worst = max(worst, (opt - pm).max(), (opt - gd).max())
    return worst <= 1e-10, f"max excess of optimal over PM/GD {worst:.1e} (slack 1e-10)"


def check_monte_carlo(ctx):
    T = 10
    mp = marchenko_pastur(1.0, 0.5)
    coeffs = optimal_coefficients(mp, T)
    rep = monte_carlo(problem_sampler(mp, 200, 400), coeffs, T, trials=20, master_seed=0)
    theory = error_series(mp, coeffs, T).values
    rel = np.abs(rep.per_t_mean / theory - 1.0).max()
    return rel <= 0.15, f"max relative deviation {rel:.3f} (tol 0.15)"


def check_figure2_monotone(ctx):
    fams = figures.figure2_families(mp_ratios=(), kappas=figures.FIGURE2_KAPPAS)
    data = figures.figure2_data(1000, fams)
    its = [figures.iterations_to_gap(cmp.momentum_gap()) for _, _, cmp in data]
    ok = None not in its and all(a < b for a, b in zip(its, its[1:]))
    return ok, f"iterations to gap 1e-3 for kappa {list(figures.FIGURE2_KAPPAS)}: {its}"


def check_determinism(ctx):
    comps = [figures.compare_with_polyak(m, 100) for m in _measures()]
    again = [figures.compare_with_polyak(m, 100) for m in _measures()]
    same_fig = (figures.csv_text(figures.FIGURE1_HEADER, figures.figure1_rows(comps))
                == figures.csv_text(figures.FIGURE1_HEADER, figures.figure1_rows(again)))
    mp = marchenko_pastur(1.0, 0.5)
    coeffs = optimal_coefficients(mp, 10)
    sampler = problem_sampler(mp, 50, 100)
    serial = monte_carlo(sampler, coeffs, 10, 4, master_seed=3, workers=1)
    parallel = monte_carlo(sampler, coeffs, 10, 4, master_seed=3, workers=2)
    same_mc = (serial.per_t_mean.tobytes() == parallel.per_t_mean.tobytes()
               and serial.per_t_stderr.tobytes() == parallel.per_t_stderr.tobytes())
    return same_fig and same_mc, f"figure1 identical: {same_fig}; montecarlo serial == parallel: {same_mc}"


CHECKS: list[tuple[str, Callable, bool]] = [
    # (name, check, included in fast mode)
    ("legendre_oracle", check_legendre, True),
    ("chebyshev_mp_oracle", check_chebyshev, True),
    ("closed_form_equivalence", check_closed_form, True),
    ("recurrence_consistency", check_recurrence_consistency, True),
    ("parameter_limits", check_limits, False),
    ("ratio_asymptotics", check_ratio_limit, False),
    ("residual_orthogonality", check_residual, True),
    ("rate_triple_agreement", check_triple, True),
    ("asymptotic_rate", check_rate, False),
    ("pointwise_optimality", check_optimality, True),
    ("monte_carlo_vs_theory", check_monte_carlo, False),
    ("figure2_monotonicity", check_figure2_monotone, False),
    ("determinism", check_determinism, False),
]


def run_checks(fast: bool = False, perturb_alpha: float = 0.0, report=print) -> bool:
    ctx = Context(fast=fast, perturb_alpha=perturb_alpha)
    all_ok = True
    for name, check, in_fast in CHECKS:
        if fast and not in_fast:
            continue
        try:
            ok, detail = check(ctx)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        report(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
