"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 bad arguments, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import figures
from .errors import DomainError, NumericalError
from .experiments import monte_carlo, problem_sampler, sample_diagonal_problem, sample_wishart_problem
from .methods import gradient_descent_coefficients, mp_closed_form, polyak_coefficients, polyak_rate, run_method
from .orthopoly import optimal_coefficients
from .rates import asymptotic_rate, error_series, rate_recurrence
from .spectrum import (build_quadrature, empirical_measure, marchenko_pastur, moments, read_eigenvalues,
                       uniform_measure)
from .validation import run_checks

METHODS = ("optimal", "polyak", "mp-closed", "gd")


class Dist:
    """Measure selected on the command line, plus raw eigenvalues for ``--dist file``."""

    def __init__(self, args):
        self.eigenvalues = None
        if args.dist == "mp":
            self.measure = marchenko_pastur(args.sigma, args.ratio)
            self.tag = f"mp_sigma{args.sigma:g}-ratio{args.ratio:g}"
        elif args.dist == "uniform":
            if args.lmin is None or args.lmax is None:
                raise DomainError("--dist uniform needs --lmin and --lmax")
            self.measure = uniform_measure(args.lmin, args.lmax)
            self.tag = f"uniform_lmin{args.lmin:g}-lmax{args.lmax:g}"
        else:
            if not args.eigs:
                raise DomainError("--dist file needs --eigs PATH")
            self.eigenvalues = read_eigenvalues(args.eigs)
            self.measure = empirical_measure(self.eigenvalues)
            self.tag = f"file_{Path(args.eigs).stem}"


def _coefficients(args, dist: Dist, T: int):
    m = dist.measure
    if args.method == "optimal":
        return optimal_coefficients(m, T, figures.nodes_for(T, args.nodes))
    if args.method == "polyak":
        return polyak_coefficients(m.lower, m.upper, T)
    if args.method == "gd":
        step = args.step if args.step is not None else 2.0 / (m.lower + m.upper)
        return gradient_descent_coefficients(step, T)
    if args.dist != "mp":
        raise DomainError("--method mp-closed requires --dist mp")
    return mp_closed_form(args.sigma, args.ratio, T)


def _write(args, name: str, text: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(path)
    return path


def cmd_coeffs(args):
    dist = Dist(args)
    T = args.iters
    c = _coefficients(args, dist, T)
    rows = [[1, None, c.b1, None, -c.b1]]
    rows += [[t, c.a_t(t), c.b_t(t), c.a_t(t) - 1.0, -c.b_t(t)] for t in range(2, T + 1)]
    text = figures.csv_text(("t", "a_t", "b_t", "momentum", "step"), rows,
                            [f"method={args.method} dist={dist.tag} iters={T}"])
    _write(args, f"coeffs_{dist.tag}-{args.method}-T{T}.csv", text)


def cmd_run(args):
    dist = Dist(args)
    T = args.iters
    c = _coefficients(args, dist, T)
    if dist.eigenvalues is not None:
        problem = sample_diagonal_problem(dist.eigenvalues, args.radius, args.seed)
    elif args.dist == "mp":
        n = args.n if args.n is not None else max(1, round(args.d / args.ratio))
        problem = sample_wishart_problem(args.d, n, args.sigma, args.radius, args.seed)
    else:
        problem = sample_diagonal_problem(np.linspace(dist.measure.lower, dist.measure.upper, args.d),
                                          args.radius, args.seed)
    errs = run_method(problem, c, T)
    text = figures.csv_text(("t", "sq_error"), [[t, e] for t, e in enumerate(errs)],
                            [f"method={args.method} dist={dist.tag} d={problem.dim} seed={args.seed}"])
    _write(args, f"run_{dist.tag}-{args.method}-d{problem.dim}-T{T}-seed{args.seed}.csv", text)


def cmd_rates(args):
    dist = Dist(args)
    m = dist.measure
    T = args.iters
    c = _coefficients(args, dist, T)
    quad = build_quadrature(m, figures.nodes_for(T, args.nodes))
    integral = error_series(quad, c, T)
    theory = None
    if args.method in ("optimal", "mp-closed"):
        theory = rate_recurrence(c, moments(quad, (1,))[0], T).values
    try:
        fitted = asymptotic_rate(integral)
    except DomainError:
        fitted = math.nan
    rows = [[t, None if theory is None else theory[t], integral.values[t], args.method] for t in range(T + 1)]
    text = figures.csv_text(("t", "r_theory", "r_integral", "method"), rows,
                            [f"dist={dist.tag} iters={T}"])
    text += f"# fitted_rate={figures.fmt(fitted)} pm_rate={figures.fmt(polyak_rate(m.lower, m.upper))}\n"
    _write(args, f"rates_{dist.tag}-{args.method}-T{T}.csv", text)


def cmd_montecarlo(args):
    dist = Dist(args)
    T = args.iters
    c = _coefficients(args, dist, T)
    n = args.n
    if args.dist == "mp" and n is None:
        n = max(1, round(args.d / args.ratio))
    sampler = problem_sampler(dist.measure, args.d, n, args.radius, dist.eigenvalues)
    rep = monte_carlo(sampler, c, T, args.trials, args.seed, args.workers, d=None, n=n)
    meta = [f"method={args.method} dist={dist.tag} d={rep.d} n={'' if n is None else n} "
            f"trials={rep.trials} seed={rep.seed} radius={args.radius:g}"]
    if rep.diverged:
        meta.append("diverged_trials=" + ",".join(str(i) for i, _ in rep.diverged))
    rows = [[t, rep.per_t_mean[t], rep.per_t_stderr[t]] for t in range(T + 1)]
    text = figures.csv_text(("t", "mean", "stderr"), rows, meta)
    _write(args, f"montecarlo_{dist.tag}-{args.method}-d{rep.d}-T{T}-trials{args.trials}-seed{args.seed}.csv",
           text)
    if rep.diverged:
        print(f"{len(rep.diverged)} of {rep.trials} trials diverged", file=sys.stderr)
        return 3
    return 0


def cmd_figure1(args):
    T = args.iters
    if args.dist is None:
        measures, tag = figures.default_figure1_measures(), "default"
    else:
        dist = Dist(args)
        measures, tag = [dist.measure], dist.tag
    comps = [figures.compare_with_polyak(m, T, args.nodes) for m in measures]
    comment = [f"iters={T} nodes={figures.nodes_for(T, args.nodes)}"]
    if args.dist is None:
        comment.append("MP(sigma=1, r=0.5) parametrization is a representative default")
    stem = f"figure1_{tag}_T{T}"
    _write(args, stem + ".csv", figures.csv_text(figures.FIGURE1_HEADER, figures.figure1_rows(comps), comment))
    _write(args, stem + ".svg", figures.figure1_svg(comps))


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_figure2(args):
    T = args.iters
    fams = figures.figure2_families(_floats(args.mp_ratios), _floats(args.kappas))
    data = figures.figure2_data(T, fams, args.nodes)
    summary = []
    for dist, param, cmp in data:
        its = figures.iterations_to_gap(cmp.momentum_gap())
        summary.append(f"{dist}:{param:g}={'' if its is None else its}")
    comment = [f"iters={T} nodes={figures.nodes_for(T, args.nodes)}",
               "parametrizations are representative defaults, not values taken from a reference",
               f"iterations_to_momentum_gap_{figures.GAP_THRESHOLD:g} " + " ".join(summary)]
    stem = f"figure2_all_T{T}"
    _write(args, stem + ".csv", figures.csv_text(figures.FIGURE2_HEADER, figures.figure2_rows(data), comment))
    _write(args, stem + ".svg", figures.figure2_svg(data))


def cmd_validate(args):
    ok = run_checks(fast=args.fast, perturb_alpha=args.perturb_alpha)
    print("all checks passed" if ok else "validation FAILED")
    return 0 if ok else 1


def _int_at_least(lo):
    def parse(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nodes", type=_int_at_least(16), default=None,
                        help="quadrature nodes (default 4000, raised to 10 per iteration if needed)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=".", help="output directory")

    dist = argparse.ArgumentParser(add_help=False)
    dist.add_argument("--dist", choices=("mp", "uniform", "file"), default=None)
    dist.add_argument("--sigma", type=float, default=1.0)
    dist.add_argument("--ratio", type=float, default=0.5)
    dist.add_argument("--lmin", type=float)
    dist.add_argument("--lmax", type=float)
    dist.add_argument("--eigs", help="text file with one eigenvalue per line")

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument("--method", choices=METHODS, default="optimal")
    method.add_argument("--step", type=float, default=None, help="gradient descent step (default 2/(L+l))")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--d", type=_int_at_least(1), default=200)
    problem.add_argument("--n", type=_int_at_least(1), default=None, help="rows of A (default d/ratio)")
    problem.add_argument("--radius", type=float, default=1.0)

    p = argparse.ArgumentParser(prog="avgmomentum",
                                description="Average-case optimal momentum schedules for random quadratics.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, parents, iters, help_):
        sp = sub.add_parser(name, parents=parents, help=help_)
        sp.add_argument("--iters", type=_int_at_least(1), default=iters)
        sp.set_defaults(func=func)
        return sp

    add("coeffs", cmd_coeffs, [common, dist, method], 300, "coefficient schedule as CSV")
    add("run", cmd_run, [common, dist, method, problem], 100, "run a method on one sampled problem")
    add("rates", cmd_rates, [common, dist, method], 400, "theoretical expected error and fitted rate")
    mc = add("montecarlo", cmd_montecarlo, [common, dist, method, problem], 20,
             "Monte Carlo estimate of the expected error")
    mc.add_argument("--trials", type=_int_at_least(1), default=20)
    mc.add_argument("--workers", type=_int_at_least(1), default=1)
    add("figure1", cmd_figure1, [common, dist], 300, "optimal vs Polyak parameters (CSV + SVG)")
    f2 = add("figure2", cmd_figure2, [common], 1000, "speed of convergence to Polyak (CSV + SVG)")
    f2.add_argument("--mp-ratios", default=",".join(f"{r:g}" for r in figures.FIGURE2_MP_RATIOS))
    f2.add_argument("--kappas", default=",".join(f"{k:g}" for k in figures.FIGURE2_KAPPAS))
    v = sub.add_parser("validate", help="run the numerical check suite")
    v.add_argument("--fast", action="store_true", help="only the t <= 50 subset")
    v.add_argument("--perturb-alpha", type=float, default=0.0, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "dist", "unset") is None and args.command not in ("figure1",):
        args.dist = "mp"
    try:
        code = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
