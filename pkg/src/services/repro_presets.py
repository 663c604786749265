"""Presets reproducing the numerical experiments figure by figure"""

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..dynamics.maps import get_map
from ..dynamics.observables import ladder_levels
from ..exact.interval_set import cantor_approx, format_rational
from ..models.schemas import SweepTable
from ..utils.error_handler import ConfigException
from ..utils.logging_config import get_logger
from .simulation_service import SimulationService

logger = get_logger('services')

DEFAULT_Q_LIST = (1, 5, 10)


@dataclass(frozen=True)
class Panel:
    map_id: str
    n: int
    ell: int
    observable: str = "ladder"
    u_range: Tuple[int, int] = (5, 20)
    q_list: Tuple[int, ...] = DEFAULT_Q_LIST
    expected: Optional[float] = None


@dataclass(frozen=True)
class SweepFigure:
    name: str
    description: str
    panels: Tuple[Panel, ...]


SWEEP_FIGURES: Dict[str, SweepFigure] = {
    'fig3': SweepFigure('fig3', "3x and 9x mod 1, ladder observable", (
        Panel('mx_mod1:3', 50_000, 500, expected=1 / 3),
        Panel('mx_mod1:9', 50_000, 500, expected=5 / 9),
    )),
    'fig4': SweepFigure('fig4', "5x mod 1, two sample sizes", (
        Panel('mx_mod1:5', 50_000, 500, u_range=(5, 28), expected=1.0),
        Panel('mx_mod1:5', 500_000, 100, u_range=(5, 28), expected=1.0),
    )),
    'fig7': SweepFigure('fig7', "mixed linear map, two sample sizes", (
        Panel('mixed_linear', 50_000, 500, expected=2 / 3),
        Panel('mixed_linear', 500_000, 100, expected=2 / 3),
    )),
    'fig8': SweepFigure('fig8', "nonlinear, Gauss and irrational rotation", (
        Panel('nonlinear', 50_000, 500, expected=1.0),
        Panel('gauss', 50_000, 500, expected=1.0),
        Panel('rotation', 50_000, 500, expected=1.0),
    )),
    'fig9': SweepFigure('fig9', "quadratic survivor set: compatible map and 5x mod 1", (
        Panel('quadratic_compatible', 50_000, 500, observable="escape", expected=0.61),
        Panel('mx_mod1:5', 50_000, 500, observable="escape", expected=1.0),
    )),
}

EXACT_FIGURES = {
    'fig1': "Cantor construction C_0..C_5",
    'fig2': "ternary ladder on a grid",
}

FIGURES = sorted([*SWEEP_FIGURES, *EXACT_FIGURES])


def scaled_panels(figure: SweepFigure, n: Optional[int] = None, ell: Optional[int] = None,
                  scale: float = 1.0) -> List[Panel]:
    """Panels with --n/--ell overrides, else sizes multiplied by scale"""
    panels = []
    for panel in figure.panels:
        panel_n = n if n is not None else max(1, int(round(panel.n * scale)))
        panel_ell = ell if ell is not None else max(1, int(round(panel.ell * scale)))
        panels.append(replace(panel, n=panel_n, ell=panel_ell))
    return panels


def run_sweep_figure(name: str, service: SimulationService, seed: int, cap: int,
                     n: Optional[int] = None, ell: Optional[int] = None, scale: float = 1.0,
                     burn_in: Optional[int] = None) -> List[Tuple[Panel, SweepTable]]:
    if name not in SWEEP_FIGURES:
        raise ConfigException(f"Unknown figure {name!r}; known: {', '.join(FIGURES)}", "UNKNOWN_FIGURE")
    results = []
    for panel in scaled_panels(SWEEP_FIGURES[name], n, ell, scale):
        logger.info(f"{name}: {panel.map_id} n={panel.n} ell={panel.ell} observable={panel.observable}")
        table = service.sweep(
            get_map(panel.map_id), panel.observable, panel.n, panel.ell, seed, cap,
            panel.u_range, panel.q_list, burn_in
        )
        results.append((panel, table))
    return results


def cantor_construction_lines(levels: int = 5) -> List[str]:
    """Interval dumps of C_0..C_levels, one section per level"""
    lines = []
    for n in range(levels + 1):
        approximation = cantor_approx(n)
        lines.append(f"# C_{n}: {approximation.component_count()} intervals, measure {format_rational(approximation.measure())}")
        lines.extend(approximation.to_text().splitlines())
    return lines


def ladder_grid_lines(points: int = 729, cap: int = 100) -> List[str]:
    """x,level on the grid (i + 1/2) / points"""
    grid = (np.arange(points) + 0.5) / points
    levels = ladder_levels(grid, cap)
    return ['x,level'] + [f"{format(x, '.12g')},{int(level)}" for x, level in zip(grid, levels)]


def exact_figure_lines(name: str, cap: int) -> List[str]:
    if name == 'fig1':
        return cantor_construction_lines()
    if name == 'fig2':
        return ladder_grid_lines(cap=cap)
    raise ConfigException(f"Unknown figure {name!r}; known: {', '.join(FIGURES)}", "UNKNOWN_FIGURE")
