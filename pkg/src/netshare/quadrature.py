"""Vectorised adaptive quadrature with pairwise Gauss error estimates.

The rate integrals evaluated in this package are expensive per point
but cheap per extra point in a batch, because the integrands are numpy
expressions over arrays of abscissae.  The adaptive driver below is
therefore organised level-synchronously: every refinement round gathers
the nodes of all intervals awaiting evaluation into a single call of
the integrand.

Each interval is scored by a 15-point Gauss rule against a 7-point one;
intervals whose disagreement exceeds their share of the budget are
bisected.  The reported error estimate is the sum of the surviving
disagreements, which is conservative for smooth integrands.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError

_LO_RULE = 7
_HI_RULE = 15


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy targets for the analytic rate integrals.

    Attributes:
        rel_tol: relative tolerance on each one-dimensional integral.
        abs_tol: absolute floor, useful when the integral is near zero.
        max_subdivisions: cap on interval bisections before giving up
            with a NumericalError carrying the running estimate.
    """

    rel_tol: float = 1e-7
    abs_tol: float = 0.0
    max_subdivisions: int = 4000

    def __post_init__(self) -> None:
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.abs_tol < 0.0:
            raise ValueError(f"abs_tol must be non-negative, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise ValueError(f"max_subdivisions must be positive, got {self.max_subdivisions}")


@lru_cache(maxsize=None)
def gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _eval_intervals(f, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integrate f over each [lo_i, hi_i] by both rules in one f call.

    Returns (I_hi, disagreement) per interval; f may return shape (n,)
    or (n, k) and the first channel drives the error estimate.
    """
    x7, w7 = gauss_rule(_LO_RULE)
    x15, w15 = gauss_rule(_HI_RULE)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = np.concatenate([
        (mid[:, None] + half[:, None] * x15[None, :]).ravel(),
        (mid[:, None] + half[:, None] * x7[None, :]).ravel(),
    ])
    vals = f(pts)
    n15 = lo.size * _HI_RULE
    v15 = vals[:n15].reshape(lo.size, _HI_RULE, -1)
    v7 = vals[n15:].reshape(lo.size, _LO_RULE, -1)
    i15 = half[:, None] * np.einsum("ijk,j->ik", v15, w15)
    i7 = half[:, None] * np.einsum("ijk,j->ik", v7, w7)
    return i15, np.abs(i15[:, 0] - i7[:, 0])


def adaptive_quad(f, a: float, b: float, config: QuadratureConfig,
                  breakpoints=()) -> tuple[np.ndarray, float]:
    """Adaptively integrate ``f`` over [a, b].

    ``f`` maps an array of abscissae to values, either shape (n,) for a
    single integrand or (n, k) for k integrands sharing the refinement
    pattern (refinement and the error estimate follow channel 0).
    ``breakpoints`` lists interior abscissae where the integrand has
    kinks, so no quadrature panel straddles them.

    Returns (integral, error_estimate); integral has shape (k,), or is
    a float when f returned one channel.  Raises NumericalError when
    the budget of subdivisions runs out before the tolerance is met.
    """
    if not b > a:
        raise ValueError(f"integration bounds must satisfy a < b, got [{a}, {b}]")
    shape = {"scalar": False}

    def f2(x):
        v = np.asarray(f(x), dtype=float)
        if v.ndim == 1:
            shape["scalar"] = True
            return v[:, None]
        return v

    cuts = [a] + sorted(float(x) for x in breakpoints if a < x < b) + [b]
    lo = np.asarray(cuts[:-1], dtype=float)
    hi = np.asarray(cuts[1:], dtype=float)
    ivals, errs = _eval_intervals(f2, lo, hi)
    scalar = shape["scalar"]
    splits_left = config.max_subdivisions

    while True:
        total = ivals.sum(axis=0)
        err = float(errs.sum())
        tol = max(config.abs_tol, config.rel_tol * abs(float(total[0])))
        if err <= tol:
            break
        # bisect every interval holding more than its share of the budget,
        # always including the worst offender
        share = tol / max(len(errs), 1)
        refine = errs > share
        refine[np.argmax(errs)] = True
        n_ref = int(refine.sum())
        if n_ref > splits_left:
            raise NumericalError(
                f"quadrature did not reach rel_tol={config.rel_tol:g} within "
                f"{config.max_subdivisions} subdivisions (estimate {total[0]:.6e}, "
                f"error estimate {err:.2e})",
                estimate=float(total[0]), error_estimate=err)
        splits_left -= n_ref
        mid = 0.5 * (lo[refine] + hi[refine])
        new_lo = np.concatenate([lo[~refine], lo[refine], mid])
        new_hi = np.concatenate([hi[~refine], mid, hi[refine]])
        new_ivals, new_errs = _eval_intervals(f2, np.concatenate([lo[refine], mid]),
                                              np.concatenate([mid, hi[refine]]))
        ivals = np.concatenate([ivals[~refine], new_ivals])
        errs = np.concatenate([errs[~refine], new_errs])
        lo, hi = new_lo, new_hi

    result = total if not scalar else float(total[0])
    return result, err


def log_ladder(lo: float, hi: float, panels_per_decade: int) -> np.ndarray:
    """Panel edges [0, lo, ..., hi] geometrically spaced between lo and hi."""
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got lo={lo}, hi={hi}")
    n = max(1, int(np.ceil(panels_per_decade * np.log10(hi / lo))))
    edges = lo * (hi / lo) ** (np.arange(n + 1) / n)
    edges[-1] = hi
    return np.concatenate([[0.0], edges])
