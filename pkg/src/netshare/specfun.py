"""Gauss hypergeometric evaluation for power-law interference fields.

The aggregate-interference transform of a Poisson field with exponent
``alpha`` reduces to 2F1(-2/alpha, 1; 1 - 2/alpha; w) at non-positive
arguments ``w``.  The routines here evaluate that family to full double
precision over the whole half line, switching representation by
argument size:

* ``|w| <= 0.5``      plain Gauss series,
* ``0.5 < |w| <= 2``  Pfaff transform onto 2F1(1, 1; c; w/(w-1)),
* ``|w| > 2``         inverse-argument connection formula, whose
                      correction series runs in 1/w.

The plain series alone stalls long before the ten-thousand-term cap
once ``w`` reaches a few hundred in magnitude, hence the third branch.
All branches stop when the running term drops below 1e-16 of the
partial sum.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError

_REL_EPS = 1e-16
_MAX_TERMS = 10_000
_SERIES_EDGE = 0.5  # |w| at or below: direct series
_INVERSE_EDGE = 2.0  # |w| above: inverse-argument formula


def _beta_of(alpha: float) -> float:
    if not (alpha > 2.0 and math.isfinite(alpha)):
        raise ValueError(f"alpha must exceed 2 and be finite, got {alpha}")
    return 2.0 / alpha


def hyp2f1_series(a: float, b: float, c: float, w: float, nmax: int = 2000) -> float:
    """Truncated Gauss series sum_{n<=nmax} (a)_n (b)_n / (c)_n w^n / n!.

    Reference implementation used as an independent check: it always
    sums exactly ``nmax + 1`` terms (or stops early only on an exactly
    zero term, as happens for polynomial cases).
    """
    if not all(math.isfinite(v) for v in (a, b, c, w)):
        raise ValueError("series parameters must be finite")
    if abs(w) >= 1.0:
        raise ValueError(f"series diverges for |w| >= 1, got w={w}")
    if c <= 0.0 and c == int(c):
        raise ValueError(f"c must not be a non-positive integer, got c={c}")
    if nmax < 0:
        raise ValueError(f"nmax must be non-negative, got {nmax}")
    total = 1.0
    term = 1.0
    for n in range(nmax):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w
        if term == 0.0:
            break
        total += term
    return total


def hyp2f1_ones(c: float, w: float) -> float:
    """2F1(1, 1; c; w) for w < 1, stable all the way up to w -> 1-.

    Only c in (0, 1) is supported; that is the range produced by the
    Pfaff transform of the interference family.  Close to the unit
    argument the series is exchanged for the connection formula in
    (1 - w), whose leading singular term is Gamma(c) Gamma(2-c)
    (1-w)^(c-2) w^(1-c).
    """
    if not (0.0 < c < 1.0):
        raise ValueError(f"c must lie in (0, 1), got {c}")
    if not (w < 1.0 and math.isfinite(w)):
        raise ValueError(f"argument must be finite and below 1, got {w}")
    if abs(w) <= 0.6:
        total = 1.0
        term = 1.0
        for n in range(_MAX_TERMS):
            term *= (n + 1.0) / (c + n) * w
            total += term
            if abs(term) <= _REL_EPS * abs(total):
                return total
        raise NumericalError(f"series for 2F1(1,1;{c};{w}) did not converge "
                             f"within {_MAX_TERMS} terms", estimate=total)
    onemw = 1.0 - w
    total = 1.0
    term = 1.0
    c3 = 3.0 - c
    for n in range(_MAX_TERMS):
        term *= (n + 1.0) / (c3 + n) * onemw
        total += term
        if abs(term) <= _REL_EPS * abs(total):
            break
    else:
        raise NumericalError(f"connection series for 2F1(1,1;{c};{w}) did not "
                             f"converge within {_MAX_TERMS} terms", estimate=total)
    lead = math.gamma(c) * math.gamma(2.0 - c) * onemw ** (c - 2.0) * w ** (1.0 - c)
    return (1.0 - c) / (2.0 - c) * total + lead


def _series_deficit(beta: float, u: np.ndarray) -> np.ndarray:
    """F(-u) - 1 by the direct series, for 0 <= u <= 0.5."""
    w = -u
    term = beta / (1.0 - beta) * u  # first series term, n = 1
    total = term.copy()
    n = 1
    while True:
        if np.all(np.abs(term) <= _REL_EPS * np.abs(total)):
            return total
        if n >= _MAX_TERMS:
            raise NumericalError("direct hypergeometric series stalled "
                                 f"(worst |w| = {np.max(u):g})")
        term = term * ((n - beta) / (n + 1.0 - beta)) * w
        total += term
        n += 1


def _pfaff_deficit(beta: float, u: np.ndarray) -> np.ndarray:
    """F(-u) - 1 via 2F1(1,1;1-beta;v) at v = u/(1+u), for 0.5 < u <= 2."""
    v = u / (1.0 + u)
    c = 1.0 - beta
    term = np.ones_like(v)
    total = np.ones_like(v)
    n = 0
    while True:
        term = term * ((n + 1.0) / (c + n)) * v
        total += term
        n += 1
        if np.all(term <= _REL_EPS * total):
            break
        if n >= _MAX_TERMS:
            raise NumericalError("Pfaff-transformed hypergeometric series stalled "
                                 f"(worst |w| = {np.max(u):g})")
    return (total - 1.0 - u) / (1.0 + u)


def _inverse_deficit(beta: float, u: np.ndarray) -> np.ndarray:
    """F(-u) - 1 via the inverse-argument connection formula, for u > 2.

    F(-u) = B(beta) u^beta + beta/(1+beta) u^-1 2F1(1,1+beta;2+beta;-1/u)
    with B(beta) = Gamma(1-beta) Gamma(1+beta) = pi beta / sin(pi beta).
    """
    winv = -1.0 / u
    term = np.ones_like(u)
    total = np.ones_like(u)
    n = 0
    while True:
        term = term * ((1.0 + beta + n) / (2.0 + beta + n)) * winv
        total += term
        n += 1
        if np.all(np.abs(term) <= _REL_EPS * np.abs(total)):
            break
        if n >= _MAX_TERMS:
            raise NumericalError("inverse-argument hypergeometric series stalled "
                                 f"(worst |w| = {np.max(u):g})")
    lead = math.pi * beta / math.sin(math.pi * beta)
    return lead * u ** beta - 1.0 + beta / (1.0 + beta) / u * total


def _deficit(beta: float, u: np.ndarray) -> np.ndarray:
    """F(-u) - 1 for u >= 0, branching on argument size."""
    out = np.zeros_like(u)
    small = u <= _SERIES_EDGE
    mid = (u > _SERIES_EDGE) & (u <= _INVERSE_EDGE)
    large = u > _INVERSE_EDGE
    if np.any(small):
        out[small] = _series_deficit(beta, u[small])
    if np.any(mid):
        out[mid] = _pfaff_deficit(beta, u[mid])
    if np.any(large):
        out[large] = _inverse_deficit(beta, u[large])
    return out


def hyp2f1_interference_deficit(alpha: float, w):
    """2F1(-2/alpha, 1; 1-2/alpha; w) - 1 for w <= 0, without cancellation.

    The aggregate-interference exponent multiplies exactly this
    difference, which vanishes linearly as w -> 0-; computing it
    directly keeps full relative accuracy there.  Accepts scalars or
    arrays.  Always non-negative.
    """
    beta = _beta_of(alpha)
    w = np.asarray(w, dtype=float)
    if np.any(w > 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("argument must be finite and non-positive")
    u = -w
    out = _deficit(beta, np.atleast_1d(u))
    return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)


def hyp2f1_interference(alpha: float, w):
    """2F1(-2/alpha, 1; 1-2/alpha; w) for alpha > 2 and w <= 0.

    Monotone non-increasing in w, equal to 1 at w = 0, and growing like
    |w|^(2/alpha) far out on the negative axis.  Accepts scalars or
    arrays.
    """
    return 1.0 + hyp2f1_interference_deficit(alpha, w)
