"""Transform of the aggregate interference beyond an exclusion level.

Conditioned on the serving station sitting at path loss x, every other
station of a Poisson deployment has loss at least x.  With unit-mean
exponential fading marks, the Laplace transform over fading and
positions of the normalised interference sum g_n / l_n factorises per
link state, and each factor is an exponential of hypergeometric terms:

    log M_S(z; x) = A_S(x) (1 - F_S(-z/x)) + B_S (1 - F_S(-z/x_S*)) [x < x_S*]

where F_S is the Gauss function evaluated by ``specfun``, x_S* the
state's breakpoint loss, A_S(x) the active-region disc coefficient and
B_S the two-ball compensation term.  Both terms together are always
non-positive, so every factor lies in (0, 1].
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .intensity import IntensityContext, state_breakpoint
from .scenario import LinkState, Scenario
from .specfun import hyp2f1_interference_deficit

_STATES = (LinkState.LOS, LinkState.NLOS)

# beyond this magnitude exp() underflows; flagged once, not per call
_UNDERFLOW_EXPONENT = -700.0


@dataclass(frozen=True)
class MgfQuery:
    """One evaluation point of a per-state interference factor.

    ``z`` is the transform argument applied to the normalised
    interference (fading over loss, no transmit power), ``x`` the
    exclusion threshold: only stations with loss >= x contribute.
    """

    z: float
    x: float
    state: LinkState
    operator_index: int = 1

    def __post_init__(self) -> None:
        if not (self.z >= 0.0 and math.isfinite(self.z)):
            raise ValueError(f"transform argument must be finite and >= 0, got {self.z}")
        if not (self.x > 0.0 and math.isfinite(self.x)):
            raise ValueError(f"exclusion threshold must be positive and finite, got {self.x}")
        if self.operator_index not in (1, 2):
            raise ValueError(f"operator_index must be 1 or 2, got {self.operator_index}")


def exclusion_coefficient(x, ctx: IntensityContext, state: LinkState):
    """A_S(x): disc coefficient of the active region at threshold x."""
    x = np.asarray(x, dtype=float)
    beta = 2.0 / ctx.pathloss.alpha(state)
    bp = state_breakpoint(ctx, state)
    q = np.where(x < bp, ctx.link_state.q_inner(state), ctx.link_state.q_outer(state))
    out = math.pi * ctx.density_per_m2 * (x / ctx.pathloss.k) ** beta * q
    return float(out) if out.ndim == 0 else out


def ball_compensation(ctx: IntensityContext, state: LinkState) -> float:
    """B_S with sign flipped: pi lambda (q_inner - q_outer) d**2.

    The exponent gains ``+ ball_compensation * deficit`` while the
    threshold is below the state breakpoint.
    """
    m = ctx.link_state
    return (math.pi * ctx.density_per_m2
            * (m.q_inner(state) - m.q_outer(state)) * m.d_meters ** 2)


def component_log_mgf(z, x, ctx: IntensityContext, state: LinkState):
    """log of one state's interference factor; broadcasts z against x."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(z < 0.0):
        raise ValueError("transform argument must be non-negative")
    if np.any(x <= 0.0):
        raise ValueError("exclusion threshold must be positive")
    z, x = np.broadcast_arrays(z, x)
    shape = z.shape
    z1 = np.atleast_1d(z)
    x1 = np.atleast_1d(x)
    alpha = ctx.pathloss.alpha(state)
    bp = state_breakpoint(ctx, state)
    expo = -np.atleast_1d(exclusion_coefficient(x1, ctx, state)) \
        * hyp2f1_interference_deficit(alpha, -z1 / x1)
    inner = x1 < bp
    if np.any(inner):
        defb = hyp2f1_interference_deficit(alpha, -z1[inner] / bp)
        expo[inner] += ball_compensation(ctx, state) * defb
    return float(expo[0]) if shape == () else expo.reshape(shape)


def _warn_if_underflowing(expo) -> None:
    worst = np.min(expo)
    if worst < _UNDERFLOW_EXPONENT:
        warnings.warn(f"interference transform exponent {worst:.1f} underflows "
                      "double precision; result clamps to 0", RuntimeWarning,
                      stacklevel=3)


def mgf_component(query: MgfQuery, ctx: IntensityContext) -> float:
    """One link state's interference factor at the query point."""
    expo = component_log_mgf(query.z, query.x, ctx, query.state)
    _warn_if_underflowing(expo)
    return float(np.exp(expo))


def mgf_nonsharing(z, x, operator_index: int, scenario: Scenario):
    """Transform of one operator's own-band normalised interference.

    Equals E[exp(-z sum g_n / l_n)] over stations of the operator with
    loss >= x; the LOS and NLOS factors multiply.  Transmit power is
    not included here: callers scale z by power over noise as needed.
    """
    ctx = IntensityContext.for_operator(scenario, operator_index)
    expo = sum(component_log_mgf(z, x, ctx, s) for s in _STATES)
    _warn_if_underflowing(np.asarray(expo))
    out = np.exp(expo)
    return float(out) if np.ndim(out) == 0 else out


def mgf_sharing(z, x, scenario: Scenario):
    """Transform of the pooled two-operator interference.

    Equals E[exp(-z sum_j P_j sum g / l)] with both deployments
    restricted to loss >= x: each operator contributes its own-power
    factors, so the argument of operator j's factors is P_j * z.
    """
    total = 0.0
    for idx in (1, 2):
        op = scenario.operator(idx)
        ctx = IntensityContext.for_operator(scenario, idx)
        z_op = np.asarray(z, dtype=float) * op.power_watts
        total = total + sum(component_log_mgf(z_op, x, ctx, s) for s in _STATES)
    _warn_if_underflowing(np.asarray(total))
    out = np.exp(total)
    return float(out) if np.ndim(out) == 0 else out
