"""Mean spectral efficiency and aggregate throughput of both setups.

The mean of log2(1 + SINR) for a terminal served at the smallest path
loss is computed by transform methods: conditioning on the serving loss
x, averaging the exponentially faded signal against the interference
transform, then integrating over the serving-loss density,

    R = (1/ln 2) Int_0^inf J(x) exp(-Lambda_assoc([0,x))) Lhat_serv(x) dx,

where the association measure is the serving operator's own in the
dedicated-band setup and the sum of both in the pooled setup.  The
conditional fading/interference average is, after substituting
z = (sigma^2 x / P) t,

    J(x) = Int_0^inf exp(-(sigma^2 x / P) t) M(x t; x) / (1 + t) dt,

with M the product of per-operator, per-state interference factors at
power ratios rho_j = P_j / P_serving.  In this parameterisation the
leading hypergeometric deficits depend on t alone, so a whole batch of
x values shares their evaluation; only the two-ball compensation terms
need a full (x, t) mesh.  The t integral runs over a geometric ladder
of Gauss panels sized to the noise knee, the transform decay and the
unit knee of 1/(1+t); panel disagreements between embedded 15- and
7-point rules are folded into the reported error estimate, and rows
that miss their budget rerun on a denser ladder.

The outer x integral is handled by the adaptive driver with explicit
breakpoints at both state breakpoint losses and is truncated where the
void probability exp(-Lambda) drops below 1e-12 (or at the largest
breakpoint when the measure saturates, beyond which the serving
density is identically zero).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError
from .intensity import (IntensityContext, breakpoints, intensity_density,
                        intensity_measure)
from .interference import ball_compensation
from .quadrature import QuadratureConfig, adaptive_quad, gauss_rule, log_ladder
from .scenario import LinkState, Scenario, noise_power
from .specfun import hyp2f1_interference_deficit

_STATES = (LinkState.LOS, LinkState.NLOS)

# outer integral stops once the no-station-below-x probability is this small
VOID_TRUNCATION = 1e-12
_VOID_LOG = -math.log(VOID_TRUNCATION)

# inner-ladder cutoffs leave the integrand at ~exp(-60) of its local scale
_DECAY_BUDGET = 60.0

_SHARING_NOISE_MODES = ("per_operator", "combined")


@dataclass(frozen=True)
class RateReport:
    """Spectral efficiencies and aggregate throughputs of both setups.

    ``r_bar_*`` and ``r_tilde_*`` are per-serving-operator mean
    spectral efficiencies in bit/s/Hz (dedicated bands and pooled
    spectrum respectively); ``r_nsh`` and ``r_sh`` are the aggregate
    throughputs in bit/s.  ``diagnostics`` holds quadrature error
    estimates and truncation points keyed by component.
    """

    r_bar_1: float
    r_bar_2: float
    r_tilde_1: float
    r_tilde_2: float
    r_nsh: float
    r_sh: float
    diagnostics: dict = field(default_factory=dict)


def _interferer_groups(scenario: Scenario, serving_index: int,
                       sharing: bool) -> list[tuple[float, float]]:
    """(power ratio, summed density) per distinct interferer power.

    Ratios are relative to the serving operator's power; operators with
    no stations or muted transmitters drop out.  Sorted by ratio so the
    assembly order is label-independent.
    """
    p_serv = scenario.operator(serving_index).power_watts
    indices = (1, 2) if sharing else (serving_index,)
    merged: dict[float, float] = {}
    for j in indices:
        op = scenario.operator(j)
        if op.density_per_m2 <= 0.0 or op.power_watts <= 0.0:
            continue
        rho = op.power_watts / p_serv
        merged[rho] = merged.get(rho, 0.0) + op.density_per_m2
    return sorted(merged.items())


@dataclass(frozen=True)
class _StateConstants:
    beta: float
    alpha: float
    breakpoint: float
    q_inner: float
    q_outer: float
    ball_unit: float  # two-ball compensation coefficient at unit density


def _state_constants(scenario: Scenario) -> tuple[_StateConstants, ...]:
    ref = IntensityContext(1.0, scenario.link_state, scenario.pathloss)
    out = []
    for s in _STATES:
        alpha = scenario.pathloss.alpha(s)
        out.append(_StateConstants(
            beta=2.0 / alpha,
            alpha=alpha,
            breakpoint=scenario.pathloss.k * scenario.link_state.d_meters ** alpha,
            q_inner=scenario.link_state.q_inner(s),
            q_outer=scenario.link_state.q_outer(s),
            ball_unit=ball_compensation(ref, s)))
    return tuple(out)


def _conditional_fading_average(x: np.ndarray, power: float, noise_w: float,
                                groups, scenario: Scenario,
                                qc: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """J(x) for a batch of serving losses, plus per-row error bounds."""
    x = np.asarray(x, dtype=float)
    k = scenario.pathloss.k
    consts = _state_constants(scenario)
    c = noise_w * x / power  # rate of the noise factor exp(-c t)

    # Per-row upper cutoff: the noise factor is spent at 60/c and the
    # interference transform, whose far decay is governed by the
    # outer-region density alone (the two-ball term cancels the inner
    # surplus), at the matching power-law point.  Lower knee: first
    # scale where any exponent reaches order one, the noise knee, or
    # the 1/(1+t) knee, whichever comes first.
    t_end = _DECAY_BUDGET / c
    t_unit = np.full_like(x, np.inf)
    for sc in consts:
        c_beta = math.pi * sc.beta / math.sin(math.pi * sc.beta)
        for rho, lam in groups:
            scale = math.pi * lam * c_beta * k ** -sc.beta * (rho * x) ** sc.beta
            if sc.q_outer > 0.0:
                t_end = np.minimum(
                    t_end, (_DECAY_BUDGET / (sc.q_outer * scale)) ** (1.0 / sc.beta))
            q_near = max(sc.q_inner, sc.q_outer)
            if q_near > 0.0:
                t_unit = np.minimum(t_unit, (1.0 / (q_near * scale)) ** (1.0 / sc.beta))
    lo = 1e-3 * np.minimum(1.0, np.minimum(1.0 / c, t_unit))
    lo = np.maximum(np.minimum(lo, 1e-6 * t_end), 1e-280)

    ppd = max(3, math.ceil(-math.log10(qc.rel_tol) / 2.5))
    j_val = j_err = tol = None
    for bump in range(3):
        j_val, j_err = _ladder_pass(x, c, float(np.min(lo)), float(np.max(t_end)),
                                    ppd * (1 << bump), t_end, groups, consts, k)
        tol = np.maximum(0.25 * qc.rel_tol * np.abs(j_val), 1e-300)
        if np.all(j_err <= tol):
            return j_val, j_err
    worst = int(np.argmax(j_err / tol))
    raise NumericalError(
        "conditional fading average did not converge on its Gauss ladder "
        f"(worst error ratio {float(j_err[worst] / tol[worst]):.1e})",
        estimate=float(j_val[worst]), error_estimate=float(j_err[worst]))


def _ladder_pass(x, c, lo, hi, ppd, t_end, groups, consts, k):
    """One fixed-ladder evaluation of J over the batch."""
    x15, w15 = gauss_rule(15)
    x7, w7 = gauss_rule(7)
    edges = log_ladder(lo, max(hi, 10.0 * lo), ppd)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = np.concatenate([x15, x7])
    tn = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()

    expo = np.zeros((x.size, tn.size))
    live = tn[None, :] <= 1.5 * t_end[:, None]  # cells that can still matter
    for sc in consts:
        lead = np.zeros_like(tn)
        for rho, lam in groups:
            lead += lam * hyp2f1_interference_deficit(sc.alpha, -rho * tn)
        region_q = np.where(x < sc.breakpoint, sc.q_inner, sc.q_outer)
        a_of_x = math.pi * k ** -sc.beta * x ** sc.beta * region_q
        expo -= a_of_x[:, None] * lead[None, :]
        if sc.ball_unit == 0.0:
            continue
        inner = x < sc.breakpoint
        if not np.any(inner):
            continue
        sub = live[inner]
        xs = x[inner]
        add = np.zeros(sub.shape)
        for rho, lam in groups:
            args = -(rho / sc.breakpoint) * (xs[:, None] * tn[None, :])[sub]
            add[sub] += (lam * sc.ball_unit) * hyp2f1_interference_deficit(sc.alpha, args)
        expo[inner] += add

    h = np.exp(expo - c[:, None] * tn[None, :]) / (1.0 + tn)[None, :]
    h = h.reshape(x.size, mid.size, 22)
    seg15 = np.einsum("ipj,j,p->ip", h[:, :, :15], w15, half)
    seg7 = np.einsum("ipj,j,p->ip", h[:, :, 15:], w7, half)
    return seg15.sum(axis=1), np.abs(seg15 - seg7).sum(axis=1)


def _sharing_noise(scenario: Scenario, serving_index: int, mode: str) -> float:
    if mode not in _SHARING_NOISE_MODES:
        raise ValueError(f"sharing_noise_bandwidth must be one of {_SHARING_NOISE_MODES}")
    if mode == "combined":
        w = scenario.operator1.bandwidth_hz + scenario.operator2.bandwidth_hz
    else:
        w = scenario.operator(serving_index).bandwidth_hz
    if w <= 0.0:
        return 0.0
    return noise_power(w, scenario.noise_figure_db)


def j_bar(x: float, operator_index: int, scenario: Scenario,
          qc: QuadratureConfig = QuadratureConfig()) -> float:
    """Conditional fading/interference average, dedicated-band setup."""
    if not x > 0.0:
        raise ValueError("serving path loss x must be positive")
    op = scenario.operator(operator_index)
    if op.power_watts <= 0.0 or op.bandwidth_hz <= 0.0:
        return 0.0
    groups = _interferer_groups(scenario, operator_index, sharing=False)
    sigma2 = noise_power(op.bandwidth_hz, scenario.noise_figure_db)
    val, _ = _conditional_fading_average(np.asarray([x], dtype=float),
                                         op.power_watts, sigma2, groups,
                                         scenario, qc)
    return float(val[0])


def j_tilde(x: float, operator_index: int, scenario: Scenario,
            qc: QuadratureConfig = QuadratureConfig(),
            sharing_noise_bandwidth: str = "per_operator") -> float:
    """Conditional fading/interference average, pooled-spectrum setup."""
    if not x > 0.0:
        raise ValueError("serving path loss x must be positive")
    op = scenario.operator(operator_index)
    sigma2 = _sharing_noise(scenario, operator_index, sharing_noise_bandwidth)
    if op.power_watts <= 0.0 or sigma2 <= 0.0:
        return 0.0
    groups = _interferer_groups(scenario, operator_index, sharing=True)
    val, _ = _conditional_fading_average(np.asarray([x], dtype=float),
                                         op.power_watts, sigma2, groups,
                                         scenario, qc)
    return float(val[0])


def _association_cutoff(assoc: tuple[IntensityContext, ...], k: float) -> float:
    """Serving-loss value beyond which the remaining mass is negligible."""
    b_max = max(max(breakpoints(ctx)) for ctx in assoc)

    def total(xv: float) -> float:
        return float(sum(intensity_measure(xv, ctx) for ctx in assoc))

    hi = max(b_max, k)
    if total(hi * 1e25) < _VOID_LOG:
        # measure saturates below the cutoff: beyond the last breakpoint
        # the serving density vanishes, so the integrand does too
        return b_max
    for _ in range(80):
        if total(hi) >= _VOID_LOG:
            break
        hi *= 10.0
    else:
        raise NumericalError("could not bracket the association cutoff")
    lo = hi * 1e-40
    ulo, uhi = math.log(lo), math.log(hi)
    root = brentq(lambda u: total(math.exp(u)) - _VOID_LOG, ulo, uhi,
                  xtol=1e-10, rtol=1e-12)
    return math.exp(root)


def _rate_component(serving_index: int, scenario: Scenario,
                    qc: QuadratureConfig, sharing: bool,
                    sharing_noise_bandwidth: str = "per_operator"
                    ) -> tuple[float, float, float]:
    """(spectral efficiency, error estimate, x cutoff) for one setup leg."""
    op = scenario.operator(serving_index)
    if op.density_per_m2 <= 0.0 or op.power_watts <= 0.0:
        return 0.0, 0.0, 0.0
    if sharing:
        sigma2 = _sharing_noise(scenario, serving_index, sharing_noise_bandwidth)
    else:
        sigma2 = (noise_power(op.bandwidth_hz, scenario.noise_figure_db)
                  if op.bandwidth_hz > 0.0 else 0.0)
    if sigma2 <= 0.0:
        return 0.0, 0.0, 0.0

    groups = _interferer_groups(scenario, serving_index, sharing)
    serv_ctx = IntensityContext.for_operator(scenario, serving_index)
    if sharing:
        assoc = tuple(IntensityContext.for_operator(scenario, j)
                      for j in (1, 2)
                      if scenario.operator(j).density_per_m2 > 0.0)
    else:
        assoc = (serv_ctx,)

    x_max = _association_cutoff(assoc, scenario.pathloss.k)
    bps = sorted({b for ctx in assoc for b in breakpoints(ctx) if b < x_max})

    def integrand(xv: np.ndarray) -> np.ndarray:
        j_val, j_err = _conditional_fading_average(
            xv, op.power_watts, sigma2, groups, scenario, qc)
        void = np.exp(-sum(intensity_measure(xv, ctx) for ctx in assoc))
        weight = void * intensity_density(xv, serv_ctx)
        return np.stack([j_val * weight, j_err * weight], axis=-1)

    (value, inner_err), gk_err = adaptive_quad(integrand, 0.0, x_max, qc,
                                               breakpoints=bps)
    ln2 = math.log(2.0)
    return float(value) / ln2, float(gk_err + inner_err) / ln2, x_max


def rate_nonsharing(operator_index: int, scenario: Scenario,
                    qc: QuadratureConfig = QuadratureConfig()) -> float:
    """Mean spectral efficiency (bit/s/Hz) on a dedicated band."""
    val, _err, _xm = _rate_component(operator_index, scenario, qc, sharing=False)
    return val


def rate_sharing(operator_index: int, scenario: Scenario,
                 qc: QuadratureConfig = QuadratureConfig(),
                 sharing_noise_bandwidth: str = "per_operator") -> float:
    """Mean spectral efficiency (bit/s/Hz) of one operator's users on pooled spectrum."""
    val, _err, _xm = _rate_component(operator_index, scenario, qc, sharing=True,
                                     sharing_noise_bandwidth=sharing_noise_bandwidth)
    return val


def throughput(scenario: Scenario, setup: str,
               qc: QuadratureConfig = QuadratureConfig(),
               sharing_noise_bandwidth: str = "per_operator") -> float:
    """Aggregate throughput (bit/s) of one setup only.

    ``setup`` is ``"nonsharing"`` (dedicated bands, W1 rbar1 + W2 rbar2)
    or ``"sharing"`` (pooled spectrum, 2 (W1+W2)(rtilde1 + rtilde2)).
    Cheaper than ``aggregate_rates`` when the other setup is not needed,
    and identical operators are folded into a single evaluation.
    """
    if setup not in ("nonsharing", "sharing"):
        raise ValueError("setup must be 'nonsharing' or 'sharing'")
    symmetric = scenario.operator1 == scenario.operator2
    sharing = setup == "sharing"
    r1, _e1, _x1 = _rate_component(1, scenario, qc, sharing=sharing,
                                   sharing_noise_bandwidth=sharing_noise_bandwidth)
    if symmetric:
        r2 = r1
    else:
        r2, _e2, _x2 = _rate_component(2, scenario, qc, sharing=sharing,
                                       sharing_noise_bandwidth=sharing_noise_bandwidth)
    w1 = scenario.operator1.bandwidth_hz
    w2 = scenario.operator2.bandwidth_hz
    if sharing:
        return 2.0 * (w1 + w2) * (r1 + r2)
    return w1 * r1 + w2 * r2


def aggregate_rates(scenario: Scenario,
                    qc: QuadratureConfig = QuadratureConfig(),
                    sharing_noise_bandwidth: str = "per_operator") -> RateReport:
    """All four spectral efficiencies and both aggregate throughputs.

    Aggregates follow the two-terminal accounting of the comparison:
    dedicated bands serve one terminal per operator on its own
    bandwidth, pooling serves both terminals on the union band, so

        r_nsh = W1 rbar1 + W2 rbar2
        r_sh  = 2 (W1 + W2) (rtilde1 + rtilde2)

    When the two operators have identical parameters the second leg
    reuses the first (the setups are exchange symmetric).
    """
    diag: dict = {"void_truncation": VOID_TRUNCATION,
                  "sharing_noise_bandwidth": sharing_noise_bandwidth}
    symmetric = scenario.operator1 == scenario.operator2

    rb1, eb1, xb1 = _rate_component(1, scenario, qc, sharing=False)
    if symmetric:
        rb2, eb2, xb2 = rb1, eb1, xb1
    else:
        rb2, eb2, xb2 = _rate_component(2, scenario, qc, sharing=False)
    rt1, et1, xt1 = _rate_component(1, scenario, qc, sharing=True,
                                    sharing_noise_bandwidth=sharing_noise_bandwidth)
    if symmetric:
        rt2, et2, xt2 = rt1, et1, xt1
    else:
        rt2, et2, xt2 = _rate_component(2, scenario, qc, sharing=True,
                                        sharing_noise_bandwidth=sharing_noise_bandwidth)

    w1 = scenario.operator1.bandwidth_hz
    w2 = scenario.operator2.bandwidth_hz
    r_nsh = w1 * rb1 + w2 * rb2
    r_sh = 2.0 * (w1 + w2) * (rt1 + rt2)

    diag.update(r_bar_1_err=eb1, r_bar_2_err=eb2,
                r_tilde_1_err=et1, r_tilde_2_err=et2,
                x_max_nonsharing_1=xb1, x_max_nonsharing_2=xb2,
                x_max_sharing_1=xt1, x_max_sharing_2=xt2)
    return RateReport(r_bar_1=rb1, r_bar_2=rb2, r_tilde_1=rt1, r_tilde_2=rt2,
                      r_nsh=r_nsh, r_sh=r_sh, diagnostics=diag)
