"""Scenario description for a two-operator cellular downlink.

Both operators deploy base stations as independent homogeneous Poisson
point processes on the plane and serve a test terminal placed at the
origin.  Links are either line-of-sight or blocked, decided by a
two-ball model: one LOS probability inside a disc of radius
``d_meters``, another outside it.  Each state has its own power-law
distance loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

SPEED_OF_LIGHT = 299792458.0  # m/s, exact

# thermal noise density at 290 K, dBm per Hz
_NOISE_DENSITY_DBM_HZ = -174.0


class LinkState(Enum):
    LOS = "LOS"
    NLOS = "NLOS"


@dataclass(frozen=True)
class LinkStateModel:
    """Two-ball blockage model.

    Attributes:
        d_meters: radius separating the inner and outer regions.  The
            boundary distance itself belongs to the outer region.
        q_los_inner: LOS probability for link distance r < d_meters.
        q_los_outer: LOS probability for link distance r >= d_meters.

    NLOS probabilities are the complements, so the two states always
    sum to one in each region.
    """

    d_meters: float
    q_los_inner: float
    q_los_outer: float

    def __post_init__(self) -> None:
        if not (self.d_meters > 0.0 and math.isfinite(self.d_meters)):
            raise ValueError(f"d_meters must be positive and finite, got {self.d_meters}")
        for name in ("q_los_inner", "q_los_outer"):
            q = getattr(self, name)
            if not (0.0 <= q <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {q}")

    def q_inner(self, state: LinkState) -> float:
        return self.q_los_inner if state is LinkState.LOS else 1.0 - self.q_los_inner

    def q_outer(self, state: LinkState) -> float:
        return self.q_los_outer if state is LinkState.LOS else 1.0 - self.q_los_outer


@dataclass(frozen=True)
class PathLossParams:
    """Per-state power-law distance loss l(r) = k * r**alpha.

    Attributes:
        k: frequency-dependent loss at 1 m (see ``pathloss_constant``).
        alpha_los: LOS distance-loss exponent, must exceed 2.
        alpha_nlos: NLOS distance-loss exponent, must exceed 2.
    """

    k: float
    alpha_los: float
    alpha_nlos: float

    def __post_init__(self) -> None:
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise ValueError(f"k must be positive and finite, got {self.k}")
        for name in ("alpha_los", "alpha_nlos"):
            a = getattr(self, name)
            if not (a > 2.0 and math.isfinite(a)):
                raise ValueError(f"{name} must exceed 2 (got {a}); flatter exponents make "
                                 "the planar interference field diverge")

    def alpha(self, state: LinkState) -> float:
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos


@dataclass(frozen=True)
class OperatorParams:
    """One operator's deployment: BS density, licensed band, transmit power.

    Zero values are accepted so that degenerate single-operator setups
    (an operator with no stations, no spectrum, or muted transmitters)
    stay representable; negatives are rejected.
    """

    density_per_m2: float
    bandwidth_hz: float
    power_watts: float

    def __post_init__(self) -> None:
        for name in ("density_per_m2", "bandwidth_hz", "power_watts"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class Scenario:
    """Complete two-operator scenario shared by analysis and simulation."""

    operator1: OperatorParams
    operator2: OperatorParams
    link_state: LinkStateModel
    pathloss: PathLossParams
    noise_figure_db: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.noise_figure_db):
            raise ValueError(f"noise_figure_db must be finite, got {self.noise_figure_db}")

    def operator(self, index: int) -> OperatorParams:
        if index == 1:
            return self.operator1
        if index == 2:
            return self.operator2
        raise ValueError(f"operator index must be 1 or 2, got {index}")

    def noise_power(self, index: int) -> float:
        """Receiver noise power in watts over operator ``index``'s band."""
        return noise_power(self.operator(index).bandwidth_hz, self.noise_figure_db)

    def swapped(self) -> "Scenario":
        """The same scenario with the operator labels exchanged."""
        return Scenario(self.operator2, self.operator1, self.link_state,
                        self.pathloss, self.noise_figure_db)


def pathloss_constant(frequency_hz: float) -> float:
    """Free-space loss at 1 m: (4*pi*f/c)**2 with c = 299792458 m/s."""
    if not (frequency_hz > 0.0 and math.isfinite(frequency_hz)):
        raise ValueError(f"frequency_hz must be positive and finite, got {frequency_hz}")
    return (4.0 * math.pi * frequency_hz / SPEED_OF_LIGHT) ** 2


def link_state_prob(r, model: LinkStateModel, state: LinkState = LinkState.LOS):
    """Probability of ``state`` at link distance ``r`` (meters).

    Piecewise constant with the jump at model.d_meters; the boundary
    evaluates to the outer value.  Accepts scalars or arrays.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("link distance must be non-negative")
    p = np.where(r < model.d_meters, model.q_los_inner, model.q_los_outer)
    if state is LinkState.NLOS:
        p = 1.0 - p
    return float(p) if p.ndim == 0 else p


def path_loss(r, state: LinkState, p: PathLossParams):
    """Distance loss k * r**alpha_state for distance ``r`` in meters."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("link distance must be non-negative")
    out = p.k * r ** p.alpha(state)
    return float(out) if out.ndim == 0 else out


def noise_power(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise power in watts: -174 dBm/Hz + 10*log10(W) + NF."""
    if not (bandwidth_hz > 0.0 and math.isfinite(bandwidth_hz)):
        raise ValueError(f"bandwidth_hz must be positive and finite, got {bandwidth_hz}")
    if not math.isfinite(noise_figure_db):
        raise ValueError(f"noise_figure_db must be finite, got {noise_figure_db}")
    dbm = _NOISE_DENSITY_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)
