"""Density search: grid, refinement, and the degenerate-shape flags."""
import math
from dataclasses import replace

import numpy as np
import pytest

from helpers import nlos_scenario, urban_scenario
from netshare.optimize import (DensitySearch, OptimumReport, PLATEAU_SPREAD,
                               optimal_density)
from netshare.quadrature import QuadratureConfig
from netshare.rate import throughput

QC = QuadratureConfig(rel_tol=1e-6)
QC_COARSE = QuadratureConfig(rel_tol=1e-5)
URBAN = urban_scenario()


def test_search_plan_validation():
    DensitySearch(lambda_min=1e-6, lambda_max=1e-6)  # zero width is legal
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=0.0, lambda_max=1e-4)
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=1e-4, lambda_max=1e-5)
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=1e-6, lambda_max=1e-4, grid_points=7)
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=1e-6, lambda_max=1e-4, refine_iters=-1)
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=1e-6, lambda_max=1e-4, objective="ratio")
    with pytest.raises(ValueError):
        DensitySearch(lambda_min=1e-6, lambda_max=1e-4, sweep_operator="1")


def test_zero_width_short_circuit():
    lam0 = 7e-5
    search = DensitySearch(lambda_min=lam0, lambda_max=lam0,
                           objective="nonsharing")
    rep = optimal_density(URBAN, search, QC)
    assert rep.lambda_star == lam0
    assert rep.evaluations == 1
    assert rep.boundary and not rep.interior and not rep.plateau
    assert rep.profile_lambdas.tolist() == [lam0]
    assert rep.rate_star == rep.profile_rates[0]
    sym = replace(URBAN,
                  operator1=replace(URBAN.operator1, density_per_m2=lam0),
                  operator2=replace(URBAN.operator2, density_per_m2=lam0))
    assert rep.rate_star == throughput(sym, "nonsharing", QC)


def test_sweep_operator_moves_only_the_chosen_density():
    lam0 = 5e-5
    for sweep, lam1, lam2 in (("both", lam0, lam0), (1, lam0, 1e-4),
                              (2, 1e-4, lam0)):
        search = DensitySearch(lambda_min=lam0, lambda_max=lam0,
                               objective="nonsharing", sweep_operator=sweep)
        rep = optimal_density(URBAN, search, QC)
        moved = replace(URBAN,
                        operator1=replace(URBAN.operator1, density_per_m2=lam1),
                        operator2=replace(URBAN.operator2, density_per_m2=lam2))
        assert rep.rate_star == throughput(moved, "nonsharing", QC)


def test_interior_optimum_found_and_refined():
    search = DensitySearch(lambda_min=5e-6, lambda_max=3e-4, grid_points=8,
                           refine_iters=12, objective="nonsharing")
    rep = optimal_density(URBAN, search, QC)
    assert rep.interior and not rep.boundary and not rep.plateau
    # blockage knee: the optimum sits near lam pi d^2 ~ 1
    assert 1.5e-5 < rep.lambda_star < 6e-5
    assert rep.rate_star >= float(np.max(rep.profile_rates))
    assert rep.profile_lambdas.shape == (8,)
    assert rep.evaluations > 8
    # profile rises then falls around the best grid cell
    best = int(np.argmax(rep.profile_rates))
    assert 0 < best < 7
    assert rep.profile_rates[0] < rep.rate_star
    assert rep.profile_rates[-1] < rep.rate_star


def test_boundary_flag_when_range_excludes_the_peak():
    # the peak sits near 3e-5; this window only sees the falling side
    search = DensitySearch(lambda_min=2e-4, lambda_max=1e-3, grid_points=8,
                           refine_iters=8, objective="nonsharing")
    rep = optimal_density(URBAN, search, QC_COARSE)
    assert rep.boundary and not rep.interior
    assert rep.lambda_star < 2e-4 * 1.01
    assert int(np.argmax(rep.profile_rates)) == 0


def test_plateau_on_scale_invariant_network():
    # single slope, no blockage contrast, power high enough to drown the
    # noise: SIR is scale invariant so throughput is flat in density
    s = nlos_scenario(p1=1e6, p2=1e6)
    search = DensitySearch(lambda_min=3e-5, lambda_max=3e-4, grid_points=8,
                           objective="nonsharing")
    rep = optimal_density(s, search, QC)
    assert rep.plateau
    assert not rep.interior
    assert rep.evaluations == 8  # refinement skipped, nothing to refine
    spread = (np.max(rep.profile_rates) - np.min(rep.profile_rates))
    assert spread <= PLATEAU_SPREAD * np.max(rep.profile_rates)


def test_deterministic_and_worker_invariant():
    search = DensitySearch(lambda_min=1e-5, lambda_max=2e-4, grid_points=8,
                           refine_iters=0, objective="sharing")
    a = optimal_density(URBAN, search, QC_COARSE)
    b = optimal_density(URBAN, search, QC_COARSE)
    c = optimal_density(URBAN, search, QC_COARSE, workers=2)
    assert a.lambda_star == b.lambda_star == c.lambda_star
    assert a.rate_star == b.rate_star == c.rate_star
    assert np.array_equal(a.profile_rates, c.profile_rates)
    with pytest.raises(ValueError):
        optimal_density(URBAN, search, QC_COARSE, workers=0)


def test_refine_iters_zero_returns_grid_argmax():
    search = DensitySearch(lambda_min=5e-6, lambda_max=3e-4, grid_points=9,
                           refine_iters=0, objective="nonsharing")
    rep = optimal_density(URBAN, search, QC_COARSE)
    best = int(np.argmax(rep.profile_rates))
    assert rep.lambda_star == rep.profile_lambdas[best]
    assert rep.rate_star == rep.profile_rates[best]
    assert rep.evaluations == 9
