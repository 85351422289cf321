"""Sweeps, power-law exponent fits, and the two-model comparison.

The central question this module answers is an exponent: on a low-velocity
log grid, does the force scale like v (two-level atom) or like v**3
(linear-oscillator model)?  run_sweep evaluates the forces over a velocity
or distance grid, fit_exponent extracts the slope of log|F| against
log v by ordinary least squares, and compare_models runs both models on
one grid and reports the pair of exponents side by side.

The fit is unweighted: quadrature error estimates are near-uniform in
relative terms across a log grid, so weights would only complicate the
algebra.  Each sweep also refits the lower and upper halves of its grid
separately and flags a disagreement beyond twice the combined standard
errors, which is the cheap way to notice that the grid has left the
asymptotic small-v regime.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .atom import gamma_at_distance
from .forces import (
    ForceResult,
    Model,
    QuadratureSpec,
    Scenario,
    osc_force_combined,
    tla_force_total,
)
from .quadrature import QuadratureError

_VARIABLES = ("velocity", "distance")
_COMPONENTS = frozenset({"f0", "fs", "total"})


def log_grid(lo: float, hi: float, n: int):
    """n log-spaced points from lo to hi inclusive."""
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    return tuple(float(x) for x in np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: which knob moves, over which grid, from which base."""

    variable: str  # "velocity" or "distance"
    grid: tuple
    scenario_base: Scenario
    components: frozenset = _COMPONENTS

    def __post_init__(self):
        if self.variable not in _VARIABLES:
            raise ValueError(f"variable must be one of {_VARIABLES}, got {self.variable!r}")
        grid = tuple(float(g) for g in self.grid)
        object.__setattr__(self, "grid", grid)
        if len(grid) == 0:
            raise ValueError("grid must not be empty")
        if not all(math.isfinite(g) for g in grid):
            raise ValueError("grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        comps = frozenset(self.components)
        object.__setattr__(self, "components", comps)
        if not comps or not comps <= _COMPONENTS:
            raise ValueError(f"components must be a nonempty subset of {set(_COMPONENTS)}")
        if self.variable == "distance" and grid[0] <= 0:
            raise ValueError("distance grid must be positive")


@dataclass(frozen=True)
class FitResult:
    """OLS fit of log|F| = exponent*log v + prefactor_log."""

    exponent: float
    prefactor_log: float
    r_squared: float
    stderr: float


@dataclass(frozen=True)
class SweepPoint:
    variable_value: float
    result: Optional[ForceResult]  # None when the quadrature failed here
    failure: str = ""

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple
    fit: Optional[FitResult]  # fit of totals; None with the reason in fit_note
    fit_low: Optional[FitResult]  # same fit on the lower half of the grid
    fit_high: Optional[FitResult]  # and on the upper half
    window_flag: bool  # halves disagree by > 2x combined stderr
    fit_note: str = ""


@dataclass(frozen=True)
class ComparisonRow:
    variable_value: float
    f_tla: float
    f_osc: float
    ratio: float  # f_osc / f_tla -> 0 as v -> 0+ if the exponents are (1, 3)


@dataclass(frozen=True)
class ComparisonResult:
    rows: tuple
    fit_tla: Optional[FitResult]
    fit_osc: Optional[FitResult]


def _ols(lx: np.ndarray, ly: np.ndarray) -> FitResult:
    n = lx.size
    xm = lx.mean()
    ym = ly.mean()
    dx = lx - xm
    sxx = float(dx @ dx)
    slope = float(dx @ (ly - ym)) / sxx
    intercept = ym - slope * xm
    resid = ly - (slope * lx + intercept)
    ssr = float(resid @ resid)
    sst = float((ly - ym) @ (ly - ym))
    r2 = 1.0 if sst == 0.0 else max(0.0, min(1.0, 1.0 - ssr / sst))
    stderr = math.sqrt(ssr / (n - 2) / sxx) if n > 2 else 0.0
    return FitResult(exponent=slope, prefactor_log=float(intercept),
                     r_squared=r2, stderr=stderr)


def _fit_checked(grid, forces, min_points: int) -> FitResult:
    x = np.asarray(grid, dtype=float)
    y = np.asarray(forces, dtype=float)
    if x.size != y.size:
        raise ValueError("grid and forces must have equal length")
    if x.size < min_points:
        raise ValueError(f"need at least {min_points} points for a fit, got {x.size}")
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("grid values must be positive and finite for a log fit")
    if np.any(y == 0) or not np.all(np.isfinite(y)):
        raise ValueError("forces must be nonzero and finite")
    if np.any(y > 0) and np.any(y < 0):
        raise ValueError("forces change sign; no single power law to fit")
    return _ols(np.log(x), np.log(np.abs(y)))


def fit_exponent(grid, forces) -> FitResult:
    """Slope of log|F| vs log v.  Requires >= 5 positive grid points and
    nonzero, uniform-sign forces."""
    return _fit_checked(grid, forces, min_points=5)


def _sensitivity(grid, forces):
    """Refit each half of the grid (internal 3-point minimum); flag when
    the halves disagree by more than 2x the combined standard errors."""
    n = len(grid)
    half = n // 2
    if half < 3:
        return None, None, False
    lo = _fit_checked(grid[:half], forces[:half], min_points=3)
    hi = _fit_checked(grid[half:], forces[half:], min_points=3)
    flag = abs(lo.exponent - hi.exponent) > 2.0 * (lo.stderr + hi.stderr)
    return lo, hi, flag


def _total_op(model: Model):
    return tla_force_total if model is Model.TLA else osc_force_combined


def _point_scenario(spec: SweepSpec, value: float) -> Scenario:
    base = spec.scenario_base
    if spec.variable == "velocity":
        return replace(base, v=value)
    # distance sweep: the near-field linewidth rides the cube law
    gamma = gamma_at_distance(base.atom.gamma, base.z, value)
    return replace(base, z=value, atom=replace(base.atom, gamma=gamma))


def _regime_check(spec: SweepSpec, q: QuadratureSpec):
    base = spec.scenario_base
    if spec.variable == "velocity":
        v_max, z_min = max(abs(g) for g in spec.grid), base.z
    else:
        v_max, z_min = abs(base.v), spec.grid[0]
    k_max = q.k_cut / (2.0 * z_min)
    if k_max * v_max > 0.1 * base.atom.omega_a:
        warnings.warn(
            f"k_max*v_max = {k_max * v_max:.3g} exceeds 0.1*omega_a: the top of "
            "this grid is leaving the small-Doppler regime; watch the "
            "half-window sensitivity flag", stacklevel=3)


def run_sweep(spec: SweepSpec, q: QuadratureSpec) -> SweepResult:
    """Evaluate the model's complete force over the grid.

    Points are independent; they are evaluated in grid order by a single
    worker so results are deterministic.  A quadrature failure at one
    point is recorded on that point and does not abort the rest.  The
    exponent fit (totals only) is attached when the grid supports one.
    """
    _regime_check(spec, q)
    op = _total_op(spec.scenario_base.model)
    points = []
    for value in spec.grid:
        scenario = _point_scenario(spec, value)
        try:
            points.append(SweepPoint(value, op(scenario, q)))
        except QuadratureError as exc:
            points.append(SweepPoint(value, None, failure=str(exc)))

    fit = fit_lo = fit_hi = None
    flag = False
    note = ""
    if "total" not in spec.components:
        note = "fit skipped: 'total' not among requested components"
    elif not all(p.ok for p in points):
        note = "fit skipped: quadrature failures in the sweep"
    else:
        totals = [p.result.total for p in points]
        try:
            fit = fit_exponent(spec.grid, totals)
            fit_lo, fit_hi, flag = _sensitivity(spec.grid, totals)
        except ValueError as exc:
            note = f"fit skipped: {exc}"
    return SweepResult(spec=spec, points=tuple(points), fit=fit,
                       fit_low=fit_lo, fit_high=fit_hi, window_flag=flag,
                       fit_note=note)


def compare_models(scenario_base: Scenario, grid, q: QuadratureSpec) -> ComparisonResult:
    """Run both models over one velocity grid and fit both exponents.

    The rows carry the complete forces and their ratio f_osc/f_tla, which
    must fall toward 0 as v -> 0+ when the exponent pair is (1, 3).
    """
    grid = tuple(float(g) for g in grid)
    if len(grid) < 5 or any(g <= 0 for g in grid):
        raise ValueError("comparison grid needs >= 5 positive points")
    tla = run_sweep(SweepSpec("velocity", grid, replace(scenario_base, model=Model.TLA)), q)
    osc = run_sweep(SweepSpec("velocity", grid, replace(scenario_base, model=Model.OSCILLATOR)), q)
    rows = []
    for v, pt, po in zip(grid, tla.points, osc.points):
        ft = pt.result.total if pt.ok else math.nan
        fo = po.result.total if po.ok else math.nan
        rows.append(ComparisonRow(v, ft, fo, fo / ft if ft else math.nan))
    return ComparisonResult(rows=tuple(rows), fit_tla=tla.fit, fit_osc=osc.fit)
