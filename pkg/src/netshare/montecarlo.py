"""Monte Carlo estimates of the same quantities the transforms give.

Each replicate draws both operators' stations on a finite disc, assigns
every station an independent link state by the two-ball probabilities
and an Exp(1) fading gain, serves the terminal at the origin from the
smallest path loss, and scores log2(1 + SINR).  Replicates are indexed:
replicate i always uses the stream spawned as (seed, spawn_key=(i,)),
so estimates are bit-identical however the work is chunked across
processes.

The disc is sized so that truncation is harmless twice over: its edge
path loss exceeds the 1 - 1e-6 quantile of the serving loss in every
link state (the serving station is essentially never outside), and the
mean interference shed beyond the edge is then orders of magnitude
below the nearest-interferer scale.  Empty realizations (possible at
low density, certain when an operator has no stations) count as rate
zero and are reported through ``no_coverage_fraction``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError
from .intensity import IntensityContext, intensity_measure
from .scenario import PathLossParams, Scenario, link_state_prob, noise_power

# serving-loss mass allowed beyond the window, before the safety factor
_WINDOW_TAIL_MASS = 1e-6
_WINDOW_QUANTILE_FACTOR = 3.0

_MODES = ("nonsharing_op1", "nonsharing_op2", "sharing")


@dataclass(frozen=True)
class SimConfig:
    """Replication plan: count, base seed, disc radius (None = auto), workers."""

    realizations: int
    seed: int = 0
    window_radius: float | None = None
    workers: int = 1

    def __post_init__(self):
        if int(self.realizations) != self.realizations or self.realizations < 1:
            raise ValueError("realizations must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.window_radius is not None and not self.window_radius > 0.0:
            raise ValueError("window_radius must be positive when given")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError("workers must be a positive integer")


@dataclass(frozen=True, eq=False)
class OperatorPoints:
    """One operator's stations: origin distances, LOS flags, fading gains."""

    distances: np.ndarray
    los: np.ndarray
    gains: np.ndarray


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    op1: OperatorPoints
    op2: OperatorPoints
    window_radius: float

    def operator(self, index: int) -> OperatorPoints:
        if index == 1:
            return self.op1
        if index == 2:
            return self.op2
        raise ValueError("operator index must be 1 or 2")


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    stderr: float
    no_coverage_fraction: float
    realizations: int
    mode: str


def default_window_radius(scenario: Scenario) -> float:
    """Disc radius covering the serving loss and the interference bulk."""
    ctxs = [IntensityContext.for_operator(scenario, i) for i in (1, 2)
            if scenario.operator(i).density_per_m2 > 0.0]
    d = scenario.link_state.d_meters
    if not ctxs:
        return 10.0 * d
    target = -math.log(_WINDOW_TAIL_MASS)

    def total(xv: float) -> float:
        return float(sum(intensity_measure(xv, c) for c in ctxs))

    hi = scenario.pathloss.k
    for _ in range(200):
        if total(hi) >= target:
            break
        hi *= 10.0
    else:
        raise NumericalError("could not bracket the window quantile")
    u = brentq(lambda lu: total(math.exp(lu)) - target,
               math.log(hi) - 300.0, math.log(hi), xtol=1e-9)
    x_q = math.exp(u)
    r_q = max((x_q / scenario.pathloss.k) ** (1.0 / scenario.pathloss.alpha_los),
              (x_q / scenario.pathloss.k) ** (1.0 / scenario.pathloss.alpha_nlos))
    lam_max = max(op.density_per_m2 for op in (scenario.operator1, scenario.operator2))
    nn = 10.0 / (2.0 * math.sqrt(lam_max))
    return max(_WINDOW_QUANTILE_FACTOR * r_q, nn, 2.0 * d)


def sample_network(scenario: Scenario, sim: SimConfig,
                   replicate_index: int) -> NetworkRealization:
    """Draw replicate ``replicate_index`` of the two-operator network."""
    ss = np.random.SeedSequence(sim.seed, spawn_key=(replicate_index,))
    rng = np.random.default_rng(ss)
    radius = sim.window_radius if sim.window_radius is not None \
        else default_window_radius(scenario)
    area = math.pi * radius * radius
    ops = []
    for idx in (1, 2):
        lam = scenario.operator(idx).density_per_m2
        n = int(rng.poisson(lam * area)) if lam > 0.0 else 0
        # sqrt maps uniforms to a uniform point's radial law on the disc;
        # the origin clip keeps a coincident station from yielding 1/0
        r = np.maximum(radius * np.sqrt(rng.random(n)), 1e-9)
        los = rng.random(n) < link_state_prob(r, scenario.link_state)
        gains = rng.standard_exponential(n)
        ops.append(OperatorPoints(distances=r, los=np.asarray(los, dtype=bool),
                                  gains=gains))
    return NetworkRealization(op1=ops[0], op2=ops[1], window_radius=radius)


def point_losses(points: OperatorPoints, pathloss: PathLossParams) -> np.ndarray:
    alpha = np.where(points.los, pathloss.alpha_los, pathloss.alpha_nlos)
    return pathloss.k * points.distances ** alpha


def min_pathloss(points: OperatorPoints, pathloss: PathLossParams) -> float:
    """Smallest path loss among the stations, inf when there are none."""
    if points.distances.size == 0:
        return math.inf
    return float(np.min(point_losses(points, pathloss)))


def _mode_rate(realization: NetworkRealization, mode: str, scenario: Scenario,
               sharing_noise_bandwidth: str = "per_operator") -> float:
    """Spectral efficiency scored by one replicate under one setup."""
    pl = scenario.pathloss
    if mode in ("nonsharing_op1", "nonsharing_op2"):
        idx = 1 if mode.endswith("1") else 2
        op = scenario.operator(idx)
        pts = realization.operator(idx)
        if pts.distances.size == 0 or op.power_watts <= 0.0:
            return 0.0
        losses = point_losses(pts, pl)
        rx = op.power_watts * pts.gains / losses
        s = int(np.argmin(losses))
        sigma2 = (noise_power(op.bandwidth_hz, scenario.noise_figure_db)
                  if op.bandwidth_hz > 0.0 else 0.0)
        denom = sigma2 + float(np.sum(rx)) - float(rx[s])
        if denom <= 0.0:
            return 0.0
        return math.log2(1.0 + float(rx[s]) / denom)

    if mode != "sharing":
        raise ValueError(f"mode must be one of {_MODES}")
    p1 = scenario.operator1.power_watts
    p2 = scenario.operator2.power_watts
    l1 = point_losses(realization.op1, pl)
    l2 = point_losses(realization.op2, pl)
    m1 = float(np.min(l1)) if l1.size else math.inf
    m2 = float(np.min(l2)) if l2.size else math.inf
    if not math.isfinite(min(m1, m2)):
        return 0.0
    serv = 1 if m1 <= m2 else 2
    rx1 = p1 * realization.op1.gains / l1 if l1.size else np.zeros(0)
    rx2 = p2 * realization.op2.gains / l2 if l2.size else np.zeros(0)
    if serv == 1:
        sig = float(rx1[int(np.argmin(l1))])
    else:
        sig = float(rx2[int(np.argmin(l2))])
    if sharing_noise_bandwidth == "combined":
        w = scenario.operator1.bandwidth_hz + scenario.operator2.bandwidth_hz
    elif sharing_noise_bandwidth == "per_operator":
        w = scenario.operator(serv).bandwidth_hz
    else:
        raise ValueError("sharing_noise_bandwidth must be 'per_operator' or 'combined'")
    sigma2 = noise_power(w, scenario.noise_figure_db) if w > 0.0 else 0.0
    denom = sigma2 + float(np.sum(rx1)) + float(np.sum(rx2)) - sig
    if denom <= 0.0:
        return 0.0
    return math.log2(1.0 + sig / denom)


def _coverage_gap(realization: NetworkRealization, mode: str) -> bool:
    if mode == "nonsharing_op1":
        return realization.op1.distances.size == 0
    if mode == "nonsharing_op2":
        return realization.op2.distances.size == 0
    return (realization.op1.distances.size == 0
            and realization.op2.distances.size == 0)


def _replicate_values(scenario: Scenario, sim: SimConfig, mode: str,
                      sharing_noise_bandwidth: str, start: int,
                      stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    gaps = np.zeros(stop - start, dtype=bool)
    for i in range(start, stop):
        real = sample_network(scenario, sim, i)
        out[i - start] = _mode_rate(real, mode, scenario, sharing_noise_bandwidth)
        gaps[i - start] = _coverage_gap(real, mode)
    return np.stack([out, gaps.astype(float)])


def estimate_rate(scenario: Scenario, sim: SimConfig, mode: str,
                  sharing_noise_bandwidth: str = "per_operator") -> RateEstimate:
    """Mean spectral efficiency of one setup, with its standard error.

    ``nonsharing_op1``/``nonsharing_op2`` score operator i's terminal on
    its own band; ``sharing`` scores the pooled-spectrum terminal, i.e.
    the sum of both per-operator pooled efficiencies.  The mean is taken
    over all replicates including uncovered ones, which score zero.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}")
    n = sim.realizations
    if sim.workers == 1 or n < 64:
        stacked = _replicate_values(scenario, sim, mode,
                                    sharing_noise_bandwidth, 0, n)
    else:
        chunk = max(16, -(-n // (sim.workers * 8)))
        spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
        parts: list[np.ndarray | None] = [None] * len(spans)
        with ProcessPoolExecutor(max_workers=sim.workers) as pool:
            futs = [pool.submit(_replicate_values, scenario, sim, mode,
                                sharing_noise_bandwidth, s, e)
                    for s, e in spans]
            for j, fut in enumerate(futs):
                parts[j] = fut.result()
        stacked = np.concatenate(parts, axis=1)
    values, gaps = stacked[0], stacked[1]
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return RateEstimate(mean=mean, stderr=stderr,
                        no_coverage_fraction=float(np.mean(gaps)),
                        realizations=n, mode=mode)


def estimate_interference_mgf(z: float, x: float, operator_index: int,
                              scenario: Scenario, sim: SimConfig
                              ) -> tuple[float, float]:
    """Empirical E[exp(-z I)] given the serving loss, via restriction.

    Conditioning the network on a serving loss of x leaves the
    remaining stations a Poisson process restricted to losses above x,
    so the estimate simply drops the stations below x in each draw.
    Interference is at unit transmit power, matching the transform's
    normalisation.  Returns (mean, standard error).
    """
    if not (z >= 0.0 and x > 0.0):
        raise ValueError("requires z >= 0 and x > 0")
    vals = np.empty(sim.realizations)
    for i in range(sim.realizations):
        real = sample_network(scenario, sim, i)
        pts = real.operator(operator_index)
        losses = point_losses(pts, scenario.pathloss)
        keep = losses >= x
        vals[i] = math.exp(-z * float(np.sum(pts.gains[keep] / losses[keep])))
    mean = float(np.mean(vals))
    stderr = (float(np.std(vals, ddof=1) / math.sqrt(sim.realizations))
              if sim.realizations > 1 else math.inf)
    return mean, stderr


def draw_min_pathloss(scenario: Scenario, sim: SimConfig,
                      which: str = "union") -> np.ndarray:
    """One serving-loss draw per replicate; inf marks an empty network."""
    if which not in ("op1", "op2", "union"):
        raise ValueError("which must be 'op1', 'op2' or 'union'")
    out = np.empty(sim.realizations)
    for i in range(sim.realizations):
        real = sample_network(scenario, sim, i)
        if which == "op1":
            out[i] = min_pathloss(real.op1, scenario.pathloss)
        elif which == "op2":
            out[i] = min_pathloss(real.op2, scenario.pathloss)
        else:
            out[i] = min(min_pathloss(real.op1, scenario.pathloss),
                         min_pathloss(real.op2, scenario.pathloss))
    return out
