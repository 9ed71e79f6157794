"""Data behind the figures: parameter convergence to Polyak momentum and its speed.

Builders return plain row lists; :func:`csv_text` and the ``*_svg`` helpers turn
them into files. CSV cells use 17 significant digits so output is bit-exact.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import svgplot
from .methods import polyak_coefficients
from .orthopoly import optimal_coefficients
from .spectrum import DEFAULT_NODES, SpectralMeasure, marchenko_pastur, uniform_measure

FIGURE2_MP_RATIOS = (0.2, 0.5, 0.8)
FIGURE2_KAPPAS = (4.0, 100.0, 10000.0)
GAP_THRESHOLD = 1e-3


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def csv_text(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def nodes_for(T: int, n_nodes: Optional[int] = None) -> int:
    """Explicit node count if given, else the default raised to 10 nodes per degree."""
    if n_nodes is not None:
        return n_nodes
    return max(DEFAULT_NODES, 10 * T)


def default_figure1_measures() -> list[SpectralMeasure]:
    return [marchenko_pastur(1.0, 0.5), uniform_measure(1.0, 2.0)]


@dataclass
class ScheduleComparison:
    measure: SpectralMeasure
    momentum_opt: np.ndarray   # t = 2..T
    step_opt: np.ndarray       # t = 1..T
    momentum_pm: float
    step_pm: float
    b1_pm: float

    @property
    def horizon(self) -> int:
        return len(self.step_opt)

    def momentum_gap(self) -> np.ndarray:
        return np.abs(self.momentum_opt - self.momentum_pm)

    def step_gap(self) -> np.ndarray:
        return np.abs(self.step_opt[1:] - self.step_pm)


def compare_with_polyak(measure: SpectralMeasure, T: int, n_nodes: Optional[int] = None) -> ScheduleComparison:
    opt = optimal_coefficients(measure, T, nodes_for(T, n_nodes))
    pm = polyak_coefficients(measure.lower, measure.upper, T)
    return ScheduleComparison(measure, opt.momentum, opt.steps, float(pm.momentum[0]),
                              float(pm.b[0]), pm.b1)


def figure1_rows(comparisons: Sequence[ScheduleComparison]) -> list[list]:
    rows = []
    for cmp in comparisons:
        tag = cmp.measure.tag()
        rows.append([tag, 1, None, cmp.step_opt[0], None, cmp.b1_pm])
        for t in range(2, cmp.horizon + 1):
            rows.append([tag, t, cmp.momentum_opt[t - 2], cmp.step_opt[t - 1], cmp.momentum_pm, cmp.step_pm])
    return rows


FIGURE1_HEADER = ("dist", "t", "momentum_opt", "step_opt", "momentum_pm", "step_pm")
FIGURE2_HEADER = ("dist", "param", "t", "abs_momentum_gap", "abs_step_gap")


def figure1_svg(comparisons: Sequence[ScheduleComparison]) -> str:
    panels = []
    for cmp in comparisons:
        m = cmp.measure
        grid = np.linspace(m.lower, m.upper, 201)[1:-1]
        dens = svgplot.Panel(f"density {m.tag()}", [svgplot.Line("density", grid, m.density(grid))],
                             xlabel="eigenvalue")
        t = np.arange(2, cmp.horizon + 1)
        mom = svgplot.Panel("momentum a_t - 1", [svgplot.Line("optimal", t, cmp.momentum_opt)],
                            [("Polyak", cmp.momentum_pm)])
        step = svgplot.Panel("step size b_t", [svgplot.Line("optimal", np.arange(1, cmp.horizon + 1),
                                                            cmp.step_opt)],
                             [("Polyak", cmp.step_pm)])
        panels.append([dens, mom, step])
    return svgplot.render(panels, "Optimal average-case parameters vs Polyak momentum")


def figure2_families(mp_ratios: Sequence[float] = FIGURE2_MP_RATIOS,
                     kappas: Sequence[float] = FIGURE2_KAPPAS) -> list[tuple[str, float, SpectralMeasure]]:
    fams = [("mp", float(r), marchenko_pastur(1.0, r)) for r in mp_ratios]
    fams += [("uniform", float(k), uniform_measure(1.0, k)) for k in kappas]
    return fams


def iterations_to_gap(gap: np.ndarray, threshold: float = GAP_THRESHOLD, first_t: int = 2) -> Optional[int]:
    """First iteration after which the gap stays below ``threshold`` (None if never)."""
    above = np.nonzero(gap >= threshold)[0]
    if len(above) == 0:
        return first_t
    if above[-1] == len(gap) - 1:
        return None
    return int(above[-1]) + 1 + first_t


def figure2_data(T: int, families, n_nodes: Optional[int] = None):
    return [(dist, param, compare_with_polyak(measure, T, n_nodes)) for dist, param, measure in families]


def figure2_rows(data) -> list[list]:
    rows = []
    for dist, param, cmp in data:
        mg, sg = cmp.momentum_gap(), cmp.step_gap()
        for t in range(2, cmp.horizon + 1):
            rows.append([dist, f"{param:g}", t, mg[t - 2], sg[t - 2]])
    return rows


def figure2_svg(data) -> str:
    by_dist: dict[str, list] = {}
    for dist, param, cmp in data:
        by_dist.setdefault(dist, []).append((param, cmp))
    panels = []
    for dist, entries in by_dist.items():
        key = "r" if dist == "mp" else "kappa"
        mom = svgplot.Panel(f"{dist}: |momentum - Polyak|", logy=True)
        step = svgplot.Panel(f"{dist}: |step - Polyak|", logy=True)
        for param, cmp in entries:
            t = np.arange(2, cmp.horizon + 1)
            mom.lines.append(svgplot.Line(f"{key}={param:g}", t, cmp.momentum_gap()))
            step.lines.append(svgplot.Line(f"{key}={param:g}", t, cmp.step_gap()))
        panels.append([mom, step])
    return svgplot.render(panels, "Speed of convergence to Polyak momentum")
