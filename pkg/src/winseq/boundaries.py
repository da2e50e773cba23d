"""Alpha-spending group-sequential boundaries.

Boundaries are solved on the score scale S_k = Z_k * sqrt(t_k), where
the increments S_k - S_{k-1} are independent Gaussians with variance
t_k - t_{k-1} (equivalently corr(Z_j, Z_k) = sqrt(t_j/t_k)). The
sub-density of the not-yet-stopped statistic is propagated look to look
on a Simpson grid over the continuation region; each boundary is
root-solved so the stagewise exit probability matches the spending
increment. Exit probabilities integrate analytically against the
Gaussian increment, so every root evaluation is a single weighted sum
of normal CDFs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from .errors import ConvergenceFailure, DomainError, InfeasibleSpend

PROB_TOL = 1e-8
MIN_INCREMENT = 1e-12


@dataclass(frozen=True)
class SpendingSpec:
    """Cumulative alpha-spending family.

    family "hsd": f(t) = alpha * (1 - exp(-param * t)) / (1 - exp(-param)),
    param != 0 (more negative spends later). family "power":
    f(t) = alpha * t ** param, param > 0.
    """

    family: str
    alpha: float
    param: float
    sides: int = 2

    def __post_init__(self):
        if self.family not in ("hsd", "power"):
            raise DomainError(f"unknown spending family {self.family!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if self.family == "hsd" and self.param == 0.0:
            raise DomainError("hsd parameter must be nonzero")
        if self.family == "power" and not self.param > 0.0:
            raise DomainError("power family exponent must be positive")
        if self.sides not in (1, 2):
            raise DomainError("sides must be 1 or 2")


def spending_value(spec: SpendingSpec, t: float) -> float:
    """Cumulative alpha spent at information fraction t (closed form)."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"information fraction {t} outside [0, 1]")
    if spec.family == "hsd":
        return spec.alpha * (1.0 - math.exp(-spec.param * t)) / (1.0 - math.exp(-spec.param))
    return spec.alpha * t**spec.param


@dataclass(frozen=True)
class GroupSequentialDesign:
    """Solved efficacy boundaries for a set of information fractions.

    z_bounds are on the standard-normal scale (symmetric +-z for
    two-sided specs); nominal_p is the per-look tail probability implied
    by the z bound.
    """

    fractions: tuple[float, ...]
    spending: SpendingSpec
    z_bounds: tuple[float, ...]
    nominal_p: tuple[float, ...]
    cumulative_spend: tuple[float, ...]

    @property
    def n_looks(self) -> int:
        return len(self.fractions)

    def crossed(self, look: int, z: float) -> bool:
        if math.isnan(z):
            return False
        if self.spending.sides == 2:
            return abs(z) >= self.z_bounds[look]
        return z >= self.z_bounds[look]


def _check_fractions(fractions):
    fractions = tuple(float(t) for t in fractions)
    if not fractions:
        raise DomainError("need at least one information fraction")
    for t in fractions:
        if not 0.0 < t <= 1.0:
            raise DomainError(f"information fraction {t} outside (0, 1]")
    for a, b in zip(fractions, fractions[1:]):
        if not b > a:
            raise DomainError("information fractions must be strictly increasing")
    if fractions[-1] != 1.0:
        raise DomainError("final information fraction must equal 1")
    return fractions


def _simpson_weights(n_points: int, h: float) -> np.ndarray:
    w = np.ones(n_points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _grid_point_count(grid_points: int) -> int:
    # composite Simpson needs an odd number of points
    n = max(int(grid_points), 5)
    return n if n % 2 == 1 else n + 1


class _SubDensity:
    """Weighted sub-density of the unstopped score statistic at one look."""

    def __init__(self, grid: np.ndarray, weighted: np.ndarray):
        self.grid = grid
        self.weighted = weighted  # Simpson weight * density value
        self.mass = float(weighted.sum())

    @classmethod
    def first_look(cls, lo, hi, t, drift, n_points):
        grid = np.linspace(lo, hi, n_points)
        sd = math.sqrt(t)
        dens = norm.pdf((grid - drift * t) / sd) / sd
        return cls(grid, _simpson_weights(n_points, grid[1] - grid[0]) * dens)

    def propagate(self, lo, hi, dt, drift, n_points):
        grid = np.linspace(lo, hi, n_points)
        s = math.sqrt(dt)
        dens = (
            self.weighted[None, :]
            * norm.pdf((grid[:, None] - self.grid[None, :] - drift * dt) / s)
            / s
        ).sum(axis=1)
        return _SubDensity(grid, _simpson_weights(n_points, grid[1] - grid[0]) * dens)

    def continuation_mass(self, lo, hi, dt, drift):
        """Mass of the propagated density inside (lo, hi), integrated exactly."""
        s = math.sqrt(dt)
        shifted = self.grid + drift * dt
        return float(
            np.sum(self.weighted * (norm.cdf((hi - shifted) / s) - norm.cdf((lo - shifted) / s)))
        )


def _continuation_interval(b, t, drift, halfwidth, sides):
    hi = min(b, drift * t + halfwidth * math.sqrt(t))
    lo = -b if sides == 2 else drift * t - halfwidth * math.sqrt(t)
    lo = max(lo, drift * t - halfwidth * math.sqrt(t))
    return lo, hi


def _first_look_exit(b, t, drift, sides):
    sd = math.sqrt(t)
    upper = float(norm.sf((b - drift * t) / sd))
    if sides == 1:
        return upper
    return upper + float(norm.cdf((-b - drift * t) / sd))


def solve_boundaries(
    fractions,
    spec: SpendingSpec,
    grid_points: int = 513,
    grid_halfwidth: float = 8.0,
) -> GroupSequentialDesign:
    """Solve per-look z boundaries so stagewise null exit probabilities
    equal the spending increments.

    The first look has a closed-form quantile; later looks bracket the
    boundary and root-solve the stagewise probability to within
    ``PROB_TOL``.
    """
    fractions = _check_fractions(fractions)
    n_points = _grid_point_count(grid_points)
    spend = [spending_value(spec, t) for t in fractions]
    increments = np.diff([0.0] + spend)
    z_bounds: list[float] = []
    density: _SubDensity | None = None
    mass_prev = 1.0
    for k, t in enumerate(fractions):
        incr = float(increments[k])
        if incr < MIN_INCREMENT or incr >= mass_prev:
            raise InfeasibleSpend(
                f"look {k + 1}: incremental spend {incr:.3e} not solvable "
                f"(remaining probability {mass_prev:.3e})"
            )
        if k == 0:
            q = incr / 2.0 if spec.sides == 2 else incr
            b = float(norm.isf(q)) * math.sqrt(t)
        else:
            dt = t - fractions[k - 1]

            def excess(bound, _dt=dt, _incr=incr):
                lo, hi = (-bound, bound) if spec.sides == 2 else (-np.inf, bound)
                cont = density.continuation_mass(lo, hi, _dt, 0.0)
                return (mass_prev - cont) - _incr

            hi_bracket = grid_halfwidth * math.sqrt(t) + 2.0
            try:
                b = brentq(excess, 0.0, hi_bracket, xtol=1e-12, maxiter=200)
            except ValueError as exc:
                raise ConvergenceFailure(
                    f"look {k + 1}: could not bracket the boundary"
                ) from exc
            if abs(excess(b)) > PROB_TOL:
                raise ConvergenceFailure(
                    f"look {k + 1}: residual {excess(b):.2e} exceeds {PROB_TOL}"
                )
        z_bounds.append(b / math.sqrt(t))
        if k < len(fractions) - 1:
            lo, hi = _continuation_interval(b, t, 0.0, grid_halfwidth, spec.sides)
            if k == 0:
                density = _SubDensity.first_look(lo, hi, t, 0.0, n_points)
            else:
                density = density.propagate(lo, hi, t - fractions[k - 1], 0.0, n_points)
            mass_prev = density.mass
    tail = norm.sf(z_bounds)
    nominal = tuple(float(2.0 * p if spec.sides == 2 else p) for p in tail)
    return GroupSequentialDesign(
        fractions=fractions,
        spending=spec,
        z_bounds=tuple(z_bounds),
        nominal_p=nominal,
        cumulative_spend=tuple(spend),
    )


def crossing_probability(
    design: GroupSequentialDesign,
    drift: float,
    grid_points: int = 513,
    grid_halfwidth: float = 8.0,
) -> np.ndarray:
    """Stagewise exit probabilities when E[Z_k] = drift * sqrt(t_k).

    drift = 0 reproduces the spending increments.
    """
    fractions = design.fractions
    sides = design.spending.sides
    n_points = _grid_point_count(grid_points)
    probs = []
    density: _SubDensity | None = None
    mass_prev = 1.0
    for k, t in enumerate(fractions):
        b = design.z_bounds[k] * math.sqrt(t)
        if k == 0:
            exit_prob = _first_look_exit(b, t, drift, sides)
        else:
            dt = t - fractions[k - 1]
            lo, hi = (-b, b) if sides == 2 else (-np.inf, b)
            exit_prob = mass_prev - density.continuation_mass(lo, hi, dt, drift)
        probs.append(exit_prob)
        if k < len(fractions) - 1:
            lo, hi = _continuation_interval(b, t, drift, grid_halfwidth, sides)
            if k == 0:
                density = _SubDensity.first_look(lo, hi, t, drift, n_points)
            else:
                density = density.propagate(lo, hi, t - fractions[k - 1], drift, n_points)
            mass_prev = density.mass
    return np.asarray(probs)
