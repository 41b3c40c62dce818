"""Adaptive Gauss quadrature driver and panel helpers."""
import math

import numpy as np
import pytest
from scipy.special import erf

from netshare.errors import NumericalError
from netshare.quadrature import (QuadratureConfig, adaptive_quad, gauss_rule,
                                 log_ladder)


def test_config_defaults_and_validation():
    qc = QuadratureConfig()
    assert qc.rel_tol == 1e-7 and qc.abs_tol == 0.0 and qc.max_subdivisions == 4000
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=1.5)
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=-1e-9)
    with pytest.raises(ValueError):
        QuadratureConfig(max_subdivisions=0)


def test_gauss_rule_exactness_and_cache():
    for n in (7, 15):
        x, w = gauss_rule(n)
        assert x.size == n and w.size == n
        assert w.sum() == pytest.approx(2.0, rel=1e-14)
        # exact through degree 2n-1
        for k in range(0, 2 * n, 3):
            exact = 0.0 if k % 2 else 2.0 / (k + 1)
            assert np.dot(w, x ** k) == pytest.approx(exact, abs=1e-14)
    assert gauss_rule(15) is gauss_rule(15)


def test_smooth_integrands():
    qc = QuadratureConfig(rel_tol=1e-12)
    val, err = adaptive_quad(np.sin, 0.0, math.pi, qc)
    assert isinstance(val, float)
    assert val == pytest.approx(2.0, rel=1e-12)
    assert abs(val - 2.0) <= max(err, 1e-13)

    val, err = adaptive_quad(lambda x: np.exp(-x * x), -6.0, 6.0, qc)
    assert val == pytest.approx(math.sqrt(math.pi) * erf(6.0), rel=1e-12)

    val, _ = adaptive_quad(lambda x: np.sin(3.0 * x), 0.0, 20.0, qc)
    assert val == pytest.approx((1.0 - math.cos(60.0)) / 3.0, rel=1e-10)


def test_kink_with_and_without_breakpoint():
    # integral of |x - 1/3| over [0, 1] is 5/18
    qc = QuadratureConfig(rel_tol=1e-12)
    f = lambda x: np.abs(x - 1.0 / 3.0)
    with_bp, err_bp = adaptive_quad(f, 0.0, 1.0, qc, breakpoints=(1.0 / 3.0,))
    without, _ = adaptive_quad(f, 0.0, 1.0, qc)
    assert with_bp == pytest.approx(5.0 / 18.0, rel=1e-13)
    assert without == pytest.approx(5.0 / 18.0, rel=1e-11)
    assert err_bp < 1e-13


def test_breakpoints_outside_range_are_ignored():
    qc = QuadratureConfig(rel_tol=1e-10)
    val, _ = adaptive_quad(np.cos, 0.0, 1.0, qc, breakpoints=(-3.0, 0.5, 7.0))
    assert val == pytest.approx(math.sin(1.0), rel=1e-10)


def test_integrable_endpoint_singularity():
    qc = QuadratureConfig(rel_tol=1e-9)
    val, err = adaptive_quad(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, qc)
    assert val == pytest.approx(2.0, rel=1e-8)
    assert err <= 1e-9 * 2.0 * 1.01


def test_multi_channel_shares_refinement():
    qc = QuadratureConfig(rel_tol=1e-11)
    f = lambda x: np.stack([np.sin(x), np.cos(x), np.ones_like(x)], axis=-1)
    val, err = adaptive_quad(f, 0.0, math.pi / 2.0, qc)
    assert val.shape == (3,)
    assert val[0] == pytest.approx(1.0, rel=1e-11)
    assert val[1] == pytest.approx(1.0, rel=1e-11)
    assert val[2] == pytest.approx(math.pi / 2.0, rel=1e-13)


def test_budget_exhaustion_reports_running_estimate():
    qc = QuadratureConfig(rel_tol=1e-13, max_subdivisions=3)
    with pytest.raises(NumericalError) as exc:
        adaptive_quad(lambda x: np.abs(x - math.sqrt(0.5)), 0.0, 1.0, qc)
    assert exc.value.error_estimate > 0.0
    # the carried estimate is already in the right neighbourhood:
    # integral of |x - c| over [0, 1] is c^2/2 + (1-c)^2/2 = 1 - sqrt(1/2)
    assert exc.value.estimate == pytest.approx(1.0 - math.sqrt(0.5), rel=0.05)


def test_bounds_guard():
    qc = QuadratureConfig()
    with pytest.raises(ValueError):
        adaptive_quad(np.sin, 1.0, 1.0, qc)
    with pytest.raises(ValueError):
        adaptive_quad(np.sin, 2.0, 1.0, qc)


def test_abs_tol_handles_vanishing_integrals():
    # net area zero; a pure relative target could never be met
    qc = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-12)
    val, err = adaptive_quad(np.sin, -1.0, 1.0, qc)
    assert abs(val) < 1e-12
    assert err <= 1e-12


def test_log_ladder_edges():
    edges = log_ladder(1e-6, 1e3, 4)
    assert edges[0] == 0.0
    assert edges[1] == 1e-6
    assert edges[-1] == 1e3
    assert np.all(np.diff(edges) > 0.0)
    interior = edges[1:]
    ratios = interior[1:] / interior[:-1]
    assert np.allclose(ratios, ratios[0], rtol=1e-9)
    # 9 decades at 4 panels per decade
    assert interior.size - 1 == 36
    with pytest.raises(ValueError):
        log_ladder(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        log_ladder(2.0, 1.0, 4)


def test_log_ladder_short_span_has_single_panel():
    edges = log_ladder(1.0, 1.0001, 3)
    assert edges.size == 3
    assert edges[1] == 1.0 and edges[2] == 1.0001
