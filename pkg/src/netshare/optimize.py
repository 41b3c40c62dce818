"""Station-density optimisation of either setup's aggregate throughput.

Throughput as a function of density typically rises while extra
stations shorten links faster than they add interference, then falls
once the network is interference limited, so a coarse geometric grid
followed by golden-section refinement around the best cell finds the
maximum reliably.  Both stages work on log density: the curve's
features are scale-like.

Degenerate shapes are reported instead of hidden: ``boundary`` flags a
maximum pinned to an endpoint of the search interval, ``plateau`` flags
an objective so flat over the whole grid that the located abscissa is
arbitrary (interference-limited networks are near scale invariant, so
this happens in realistic configurations, not only in broken ones).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .quadrature import QuadratureConfig
from .rate import throughput
from .scenario import Scenario

_OBJECTIVES = ("nonsharing", "sharing")
_SWEEPS = ("both", 1, 2)

# grid spread below which the objective is declared flat in density
PLATEAU_SPREAD = 1e-4
# refined maximum closer than this to a search endpoint stays "boundary"
_EDGE_REL = 1e-3

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DensitySearch:
    """Search plan over station density (per m^2).

    ``sweep_operator`` selects whose density varies: ``"both"`` moves
    the two operators together (the symmetric deployments the setup
    comparison is about), 1 or 2 moves one operator and leaves the
    other at its scenario value.  ``lambda_min == lambda_max`` is
    allowed and short-circuits to a single evaluation.
    """

    lambda_min: float
    lambda_max: float
    grid_points: int = 12
    refine_iters: int = 32
    objective: str = "sharing"
    sweep_operator: object = "both"

    def __post_init__(self):
        if not (self.lambda_min > 0.0 and math.isfinite(self.lambda_min)):
            raise ValueError("lambda_min must be positive and finite")
        if not (self.lambda_max >= self.lambda_min and math.isfinite(self.lambda_max)):
            raise ValueError("lambda_max must satisfy lambda_max >= lambda_min")
        if int(self.grid_points) != self.grid_points or self.grid_points < 8:
            raise ValueError("grid_points must be an integer >= 8")
        if int(self.refine_iters) != self.refine_iters or self.refine_iters < 0:
            raise ValueError("refine_iters must be a nonnegative integer")
        if self.objective not in _OBJECTIVES:
            raise ValueError(f"objective must be one of {_OBJECTIVES}")
        if self.sweep_operator not in _SWEEPS:
            raise ValueError(f"sweep_operator must be one of {_SWEEPS}")


@dataclass(frozen=True, eq=False)
class OptimumReport:
    lambda_star: float
    rate_star: float
    profile_lambdas: np.ndarray
    profile_rates: np.ndarray
    interior: bool
    boundary: bool
    plateau: bool
    evaluations: int


def _with_density(scenario: Scenario, lam: float, sweep) -> Scenario:
    if sweep in ("both", 1):
        scenario = replace(scenario,
                           operator1=replace(scenario.operator1, density_per_m2=lam))
    if sweep in ("both", 2):
        scenario = replace(scenario,
                           operator2=replace(scenario.operator2, density_per_m2=lam))
    return scenario


def _objective_value(lam: float, scenario: Scenario, search: DensitySearch,
                     qc: QuadratureConfig, sharing_noise_bandwidth: str) -> float:
    return throughput(_with_density(scenario, lam, search.sweep_operator),
                      search.objective, qc, sharing_noise_bandwidth)


def optimal_density(scenario: Scenario, search: DensitySearch,
                    qc: QuadratureConfig = QuadratureConfig(),
                    sharing_noise_bandwidth: str = "per_operator",
                    workers: int = 1) -> OptimumReport:
    """Locate the density maximising the chosen setup's throughput.

    Runs the geometric grid (in parallel when ``workers`` > 1), then
    golden-section refinement inside the cells flanking the best grid
    point.  Results are deterministic for fixed inputs regardless of
    ``workers``.
    """
    if int(workers) != workers or workers < 1:
        raise ValueError("workers must be a positive integer")

    if search.lambda_max == search.lambda_min:
        val = _objective_value(search.lambda_min, scenario, search, qc,
                               sharing_noise_bandwidth)
        return OptimumReport(lambda_star=search.lambda_min, rate_star=val,
                             profile_lambdas=np.array([search.lambda_min]),
                             profile_rates=np.array([val]),
                             interior=False, boundary=True, plateau=False,
                             evaluations=1)

    grid = np.geomspace(search.lambda_min, search.lambda_max, search.grid_points)
    if workers == 1:
        rates = np.array([_objective_value(g, scenario, search, qc,
                                           sharing_noise_bandwidth) for g in grid])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_objective_value, g, scenario, search, qc,
                                sharing_noise_bandwidth) for g in grid]
            rates = np.array([f.result() for f in futs])
    evals = grid.size

    top = float(np.max(rates))
    plateau = top > 0.0 and (top - float(np.min(rates))) <= PLATEAU_SPREAD * top
    best = int(np.argmax(rates))
    edge_best = best in (0, grid.size - 1)

    if plateau or search.refine_iters == 0:
        return OptimumReport(lambda_star=float(grid[best]), rate_star=float(rates[best]),
                             profile_lambdas=grid, profile_rates=rates,
                             interior=not edge_best and not plateau,
                             boundary=edge_best, plateau=plateau, evaluations=evals)

    # golden section on log density over the cells flanking the best point
    a = math.log(grid[max(best - 1, 0)])
    b = math.log(grid[min(best + 1, grid.size - 1)])
    best_lam, best_val = float(grid[best]), float(rates[best])
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _objective_value(math.exp(c), scenario, search, qc, sharing_noise_bandwidth)
    fd = _objective_value(math.exp(d), scenario, search, qc, sharing_noise_bandwidth)
    evals += 2
    for _ in range(search.refine_iters):
        if b - a < 1e-4:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _objective_value(math.exp(c), scenario, search, qc,
                                  sharing_noise_bandwidth)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _objective_value(math.exp(d), scenario, search, qc,
                                  sharing_noise_bandwidth)
        evals += 1
    for lam_c, val_c in ((math.exp(c), fc), (math.exp(d), fd)):
        if val_c > best_val:
            best_lam, best_val = lam_c, val_c

    near_edge = (best_lam <= search.lambda_min * (1.0 + _EDGE_REL)
                 or best_lam >= search.lambda_max / (1.0 + _EDGE_REL))
    boundary = edge_best and near_edge
    return OptimumReport(lambda_star=best_lam, rate_star=best_val,
                         profile_lambdas=grid, profile_rates=rates,
                         interior=not boundary, boundary=boundary,
                         plateau=False, evaluations=evals)
