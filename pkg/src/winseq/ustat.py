"""Two-sample U-statistics for win/loss grids and their asymptotic tests.

The win and loss indicators over all m*n pairs form two correlated
U-statistics. Their large-sample covariance is assembled from the
covariances of kernel evaluations sharing one subject (xi10: shared
treatment subject, xi01: shared control subject), scaled by arm sizes.
Both the win difference u1 - u2 and the log win ratio log(u1/u2) are
tested against the standard normal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DegenerateSample, DegenerateWinRatio, ZeroVariance
from .pairwise import ComparisonMatrix

VARIANCE_TOL = 1e-12


@dataclass(frozen=True)
class WinStatistics:
    """Counts and proportions of wins/losses over all pairs.

    u1 and u2 double as the plug-in estimates of the population win and
    loss probabilities; u1/u2 estimates the win ratio (equivalently the
    ratio of win to loss counts).
    """

    wins: int
    losses: int
    ties: int
    m: int
    n: int

    @property
    def n_pairs(self) -> int:
        return self.m * self.n

    @property
    def u1(self) -> float:
        return self.wins / self.n_pairs

    @property
    def u2(self) -> float:
        return self.losses / self.n_pairs

    @property
    def win_ratio(self) -> float:
        if self.losses == 0:
            return math.inf if self.wins > 0 else math.nan
        return self.wins / self.losses


@dataclass(frozen=True)
class KernelCovariances:
    """2x2 covariance estimates of the win/loss kernels.

    xi10[u, v]: covariance of kernel u and kernel v evaluated on pairs
    sharing the treatment subject; xi01 likewise for a shared control
    subject. Indices 0/1 correspond to the win/loss kernels.
    """

    xi10: np.ndarray
    xi01: np.ndarray


@dataclass(frozen=True)
class AsymptoticCovariance:
    """Covariance matrix of sqrt(N)*(u1 - tau1, u2 - tau2)."""

    matrix: np.ndarray

    @property
    def s11(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def s22(self) -> float:
        return float(self.matrix[1, 1])

    @property
    def s12(self) -> float:
        return float(self.matrix[0, 1])


@dataclass(frozen=True)
class TestResult:
    """A z-test outcome.

    ``scale`` records the scale of the confidence limits: "difference"
    keeps them on the estimate's scale, "ratio" exponentiates them (the
    estimate itself stays on the log scale).
    """

    estimate: float
    std_error: float
    z: float
    p_two_sided: float
    ci_low: float
    ci_high: float
    information: float
    scale: str
    conf_level: float = 0.95


def compute_win_stats(matrix: ComparisonMatrix) -> WinStatistics:
    res = matrix.results
    wins = int((res == 1).sum())
    losses = int((res == -1).sum())
    m, n = res.shape
    return WinStatistics(wins=wins, losses=losses, ties=m * n - wins - losses, m=m, n=n)


def _indicator_grids(matrix: ComparisonMatrix):
    res = matrix.results
    return (res == 1).astype(np.float64), (res == -1).astype(np.float64)


def estimate_xi(matrix: ComparisonMatrix) -> KernelCovariances:
    """Plug-in kernel covariances in O(m*n) after the grid is built.

    For each kernel pair (u, v), the mean product over index triples
    sharing the treatment subject is (sum_i R_i^u R_i^v - sum_ij
    phi_u phi_v) / (m n (n-1)), via row sums R; the shared-control
    version uses column sums over n m (m-1).
    """
    m, n = matrix.results.shape
    if m < 2 or n < 2:
        raise DegenerateSample(f"need at least 2 subjects per arm, got m={m}, n={n}")
    win, loss = _indicator_grids(matrix)
    u = np.array([win.mean(), loss.mean()])
    rows = np.stack([win.sum(axis=1), loss.sum(axis=1)])  # (2, m)
    cols = np.stack([win.sum(axis=0), loss.sum(axis=0)])  # (2, n)
    # sum_ij phi_u(i,j) * phi_v(i,j); the win/loss indicators are disjoint,
    # so same-pair products reduce to the diagonal counts
    cross = np.array(
        [
            [win.sum(), 0.0],
            [0.0, loss.sum()],
        ]
    )
    outer = np.outer(u, u)
    xi10 = (rows @ rows.T - cross) / (m * n * (n - 1)) - outer
    xi01 = (cols @ cols.T - cross) / (n * m * (m - 1)) - outer
    return KernelCovariances(xi10=xi10, xi01=xi01)


def estimate_xi_bruteforce(matrix: ComparisonMatrix) -> KernelCovariances:
    """Oracle: enumerate every index triple. O(m*n^2 + n*m^2); tests only."""
    m, n = matrix.results.shape
    if m < 2 or n < 2:
        raise DegenerateSample(f"need at least 2 subjects per arm, got m={m}, n={n}")
    win, loss = _indicator_grids(matrix)
    phis = (win, loss)
    u = np.array([win.mean(), loss.mean()])
    xi10 = np.zeros((2, 2))
    xi01 = np.zeros((2, 2))
    for a in range(2):
        for b in range(2):
            total = 0.0
            for i in range(m):
                for j in range(n):
                    for j2 in range(n):
                        if j2 != j:
                            total += phis[a][i, j] * phis[b][i, j2]
            xi10[a, b] = total / (m * n * (n - 1)) - u[a] * u[b]
            total = 0.0
            for j in range(n):
                for i in range(m):
                    for i2 in range(m):
                        if i2 != i:
                            total += phis[a][i, j] * phis[b][i2, j]
            xi01[a, b] = total / (n * m * (m - 1)) - u[a] * u[b]
    return KernelCovariances(xi10=xi10, xi01=xi01)


def asymptotic_covariance(xi: KernelCovariances, m: int, n: int) -> AsymptoticCovariance:
    """Combine shared-subject covariances into the sqrt(N)-scale matrix.

    The off-diagonal entries are equal analytically; averaging them
    guards against rounding asymmetry.
    """
    n_total = m + n
    sigma = (n_total / m) * xi.xi10 + (n_total / n) * xi.xi01
    off = 0.5 * (sigma[0, 1] + sigma[1, 0])
    sigma = np.array([[sigma[0, 0], off], [off, sigma[1, 1]]])
    return AsymptoticCovariance(matrix=sigma)


def _finish_test(estimate, variance, scale, conf_level):
    if variance <= VARIANCE_TOL:
        raise ZeroVariance(f"estimated variance {variance:.3e} is not positive")
    se = math.sqrt(variance)
    z = estimate / se
    p = 2.0 * float(norm.sf(abs(z)))
    q = float(norm.ppf(0.5 + conf_level / 2.0))
    lo, hi = estimate - q * se, estimate + q * se
    if scale == "ratio":
        lo, hi = math.exp(lo), math.exp(hi)
    return TestResult(
        estimate=estimate,
        std_error=se,
        z=z,
        p_two_sided=p,
        ci_low=lo,
        ci_high=hi,
        information=1.0 / variance,
        scale=scale,
        conf_level=conf_level,
    )


def win_difference_test(
    stats: WinStatistics,
    cov: AsymptoticCovariance,
    n_total: int | None = None,
    conf_level: float = 0.95,
) -> TestResult:
    """Test of u1 - u2 = 0 (net benefit) against the standard normal."""
    n_total = stats.m + stats.n if n_total is None else n_total
    variance = (cov.s11 + cov.s22 - 2.0 * cov.s12) / n_total
    return _finish_test(stats.u1 - stats.u2, variance, "difference", conf_level)


def log_win_ratio_test(
    stats: WinStatistics,
    cov: AsymptoticCovariance,
    n_total: int | None = None,
    conf_level: float = 0.95,
) -> TestResult:
    """Delta-method test of log(u1/u2) = 0; CI reported on the ratio scale."""
    n_total = stats.m + stats.n if n_total is None else n_total
    u1, u2 = stats.u1, stats.u2
    if u1 <= 0.0 or u2 <= 0.0:
        raise DegenerateWinRatio(
            f"win ratio undefined with u1={u1:.4g}, u2={u2:.4g}"
        )
    variance = (
        cov.s11 / u1**2 + cov.s22 / u2**2 - 2.0 * cov.s12 / (u1 * u2)
    ) / n_total
    return _finish_test(math.log(u1 / u2), variance, "ratio", conf_level)
