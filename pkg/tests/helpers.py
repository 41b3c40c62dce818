"""Scenario builders shared across the test modules."""
from netshare.scenario import (LinkStateModel, OperatorParams, PathLossParams,
                               Scenario, pathloss_constant)

K_21GHZ = pathloss_constant(2.1e9)

URBAN_LINKSTATE = LinkStateModel(d_meters=109.8517, q_los_inner=0.7195,
                                 q_los_outer=0.0002)
URBAN_PATHLOSS = PathLossParams(k=K_21GHZ, alpha_los=2.5, alpha_nlos=3.5)


def urban_scenario(lam1=1e-4, lam2=1e-4, w1=10e6, w2=10e6, p1=1.0, p2=1.0,
                   noise_figure_db=10.0):
    """Two-ball urban reference; density defaults to 100 per km^2."""
    return Scenario(
        operator1=OperatorParams(density_per_m2=lam1, bandwidth_hz=w1,
                                 power_watts=p1),
        operator2=OperatorParams(density_per_m2=lam2, bandwidth_hz=w2,
                                 power_watts=p2),
        link_state=URBAN_LINKSTATE, pathloss=URBAN_PATHLOSS,
        noise_figure_db=noise_figure_db)


def nlos_scenario(alpha=3.5, lam1=1e-4, lam2=1e-4, w1=10e6, w2=10e6,
                  p1=1.0, p2=1.0):
    """Single-slope control case: LOS probability zero everywhere."""
    ls = LinkStateModel(d_meters=100.0, q_los_inner=0.0, q_los_outer=0.0)
    pl = PathLossParams(k=K_21GHZ, alpha_los=2.5, alpha_nlos=alpha)
    return Scenario(
        operator1=OperatorParams(density_per_m2=lam1, bandwidth_hz=w1,
                                 power_watts=p1),
        operator2=OperatorParams(density_per_m2=lam2, bandwidth_hz=w2,
                                 power_watts=p2),
        link_state=ls, pathloss=pl, noise_figure_db=10.0)
