"""Path-loss process intensity for one Poisson deployment.

Mapping every base station of a planar Poisson process through the
state-dependent loss l_S(r) = k r**alpha_S produces an inhomogeneous
Poisson process of loss values on the positive half line.  This module
evaluates its mean measure Lambda([0, x)), the measure's density in x,
and the induced distribution of the smallest loss, all split by link
state.

With the two-ball blockage model each state contributes a piecewise
form with a single breakpoint at x = k d**alpha_S, the loss at the ball
edge.  The boundary belongs to the outer piece, matching the blockage
model's convention at r = d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scenario import LinkState, LinkStateModel, PathLossParams, Scenario

_STATES = (LinkState.LOS, LinkState.NLOS)


@dataclass(frozen=True)
class IntensityContext:
    """One operator's deployment density plus the shared channel models."""

    density_per_m2: float
    link_state: LinkStateModel
    pathloss: PathLossParams

    def __post_init__(self) -> None:
        lam = self.density_per_m2
        if not (lam >= 0.0 and math.isfinite(lam)):
            raise ValueError(f"density_per_m2 must be finite and non-negative, got {lam}")

    @classmethod
    def for_operator(cls, scenario: Scenario, index: int) -> "IntensityContext":
        return cls(scenario.operator(index).density_per_m2,
                   scenario.link_state, scenario.pathloss)


def state_breakpoint(ctx: IntensityContext, state: LinkState) -> float:
    """Loss value at the blockage-ball edge, k * d**alpha_state."""
    return ctx.pathloss.k * ctx.link_state.d_meters ** ctx.pathloss.alpha(state)


def breakpoints(ctx: IntensityContext) -> tuple[float, float]:
    """Both per-state breakpoints, LOS first."""
    return tuple(state_breakpoint(ctx, s) for s in _STATES)


def _measure_inner_branch(x, ctx: IntensityContext, state: LinkState):
    """Mean measure branch valid for x below the state breakpoint."""
    q_in = ctx.link_state.q_inner(state)
    beta = 2.0 / ctx.pathloss.alpha(state)
    return math.pi * ctx.density_per_m2 * q_in * (x / ctx.pathloss.k) ** beta


def _measure_outer_branch(x, ctx: IntensityContext, state: LinkState):
    """Mean measure branch valid at and above the state breakpoint."""
    q_in = ctx.link_state.q_inner(state)
    q_out = ctx.link_state.q_outer(state)
    beta = 2.0 / ctx.pathloss.alpha(state)
    d2 = ctx.link_state.d_meters ** 2
    return math.pi * ctx.density_per_m2 * (
        d2 * (q_in - q_out) + q_out * (x / ctx.pathloss.k) ** beta)


def intensity_measure_state(x, ctx: IntensityContext, state: LinkState):
    """Mean number of state-``state`` loss values below ``x``.

    Non-decreasing and continuous in x; scales linearly with density.
    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("path-loss threshold must be non-negative")
    b = state_breakpoint(ctx, state)
    out = np.where(x < b,
                   _measure_inner_branch(x, ctx, state),
                   _measure_outer_branch(x, ctx, state))
    return float(out) if out.ndim == 0 else out


def intensity_density_state(x, ctx: IntensityContext, state: LinkState):
    """d/dx of the state measure; defined for x > 0.

    At the breakpoint itself the outer one-sided derivative is
    returned, consistent with the boundary-to-outer convention.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("the measure density needs a strictly positive threshold")
    alpha = ctx.pathloss.alpha(state)
    b = state_breakpoint(ctx, state)
    q = np.where(x < b, ctx.link_state.q_inner(state), ctx.link_state.q_outer(state))
    out = (2.0 * math.pi * ctx.density_per_m2 / (alpha * x)
           * (x / ctx.pathloss.k) ** (2.0 / alpha) * q)
    return float(out) if out.ndim == 0 else out


def intensity_measure(x, ctx: IntensityContext):
    """Mean measure of [0, x) summed over both link states."""
    return sum(intensity_measure_state(x, ctx, s) for s in _STATES)


def intensity_density(x, ctx: IntensityContext):
    """Density of the total measure at x > 0."""
    return sum(intensity_density_state(x, ctx, s) for s in _STATES)


def cdf_min_pathloss(x, ctx: IntensityContext):
    """P(smallest loss < x) = 1 - exp(-Lambda([0, x))).

    When the outer-region state probabilities vanish the measure
    saturates and the distribution is defective: the missing mass is
    the chance of an empty loss process (no coverage).
    """
    return -np.expm1(-intensity_measure(x, ctx))


def pdf_min_pathloss(x, ctx: IntensityContext):
    """Density of the smallest loss at x > 0."""
    return intensity_density(x, ctx) * np.exp(-intensity_measure(x, ctx))
