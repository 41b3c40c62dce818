"""Parameter containers, propagation constants and their guard rails."""
import dataclasses
import math

import numpy as np
import pytest

from netshare.scenario import (SPEED_OF_LIGHT, LinkState, LinkStateModel,
                               OperatorParams, PathLossParams, Scenario,
                               link_state_prob, noise_power, path_loss,
                               pathloss_constant)
from helpers import URBAN_LINKSTATE, URBAN_PATHLOSS, urban_scenario


def test_speed_of_light_is_the_si_constant():
    assert SPEED_OF_LIGHT == 299_792_458.0


def test_pathloss_constant_against_definition():
    fc = 2.1e9
    expected = (4.0 * math.pi * fc / SPEED_OF_LIGHT) ** 2
    assert pathloss_constant(fc) == expected
    assert pathloss_constant(fc) == pytest.approx(7748.487052053933, rel=1e-15)


def test_pathloss_constant_rejects_nonpositive_frequency():
    with pytest.raises(ValueError):
        pathloss_constant(0.0)
    with pytest.raises(ValueError):
        pathloss_constant(-1e9)


def test_noise_power_matches_thermal_formula():
    # -174 dBm/Hz thermal floor plus bandwidth and noise figure, in watts
    for w_hz, nf in ((1e7, 10.0), (2e7, 10.0), (5e6, 3.0), (1.0, 0.0)):
        expected = 10.0 ** ((-174.0 + 10.0 * math.log10(w_hz) + nf - 30.0) / 10.0)
        assert noise_power(w_hz, nf) == pytest.approx(expected, rel=1e-14)
    assert noise_power(1e7, 10.0) == pytest.approx(3.981071705534969e-13, rel=1e-14)


def test_noise_power_rejects_nonpositive_bandwidth():
    with pytest.raises(ValueError):
        noise_power(0.0, 10.0)


def test_link_state_prob_two_ball_piecewise():
    m = LinkStateModel(d_meters=100.0, q_los_inner=0.7, q_los_outer=0.01)
    assert link_state_prob(50.0, m) == 0.7
    assert link_state_prob(99.999, m) == 0.7
    # the boundary belongs to the outer region
    assert link_state_prob(100.0, m) == 0.01
    assert link_state_prob(250.0, m) == 0.01


def test_link_state_prob_states_are_complementary():
    m = URBAN_LINKSTATE
    r = np.array([1.0, 80.0, 109.8517, 500.0])
    p_los = link_state_prob(r, m, LinkState.LOS)
    p_nlos = link_state_prob(r, m, LinkState.NLOS)
    assert np.all(p_los + p_nlos == 1.0)


def test_link_state_prob_vectorizes():
    m = URBAN_LINKSTATE
    r = np.linspace(1.0, 300.0, 7)
    vals = link_state_prob(r, m)
    assert vals.shape == r.shape
    assert all(vals[i] == link_state_prob(float(r[i]), m) for i in range(r.size))


def test_path_loss_power_law_per_state():
    p = URBAN_PATHLOSS
    assert path_loss(10.0, LinkState.LOS, p) == pytest.approx(
        p.k * 10.0 ** 2.5, rel=1e-15)
    assert path_loss(10.0, LinkState.NLOS, p) == pytest.approx(
        p.k * 10.0 ** 3.5, rel=1e-15)
    # loss grows with distance, NLOS above LOS beyond 1 m
    r = np.geomspace(1.5, 1e4, 25)
    los = path_loss(r, LinkState.LOS, p)
    nlos = path_loss(r, LinkState.NLOS, p)
    assert np.all(np.diff(los) > 0.0) and np.all(nlos > los)


def test_linkstate_model_validation():
    with pytest.raises(ValueError):
        LinkStateModel(d_meters=0.0, q_los_inner=0.5, q_los_outer=0.1)
    with pytest.raises(ValueError):
        LinkStateModel(d_meters=10.0, q_los_inner=1.2, q_los_outer=0.1)
    with pytest.raises(ValueError):
        LinkStateModel(d_meters=10.0, q_los_inner=0.5, q_los_outer=-0.1)


def test_linkstate_model_per_state_accessors():
    m = LinkStateModel(d_meters=10.0, q_los_inner=0.7, q_los_outer=0.2)
    assert m.q_inner(LinkState.LOS) == 0.7
    assert m.q_inner(LinkState.NLOS) == pytest.approx(0.3)
    assert m.q_outer(LinkState.LOS) == 0.2
    assert m.q_outer(LinkState.NLOS) == pytest.approx(0.8)


def test_pathloss_params_validation():
    with pytest.raises(ValueError):
        PathLossParams(k=-1.0, alpha_los=2.5, alpha_nlos=3.5)
    # exponents at or below 2 make the planar interference diverge
    with pytest.raises(ValueError):
        PathLossParams(k=1.0, alpha_los=2.0, alpha_nlos=3.5)
    with pytest.raises(ValueError):
        PathLossParams(k=1.0, alpha_los=2.5, alpha_nlos=1.9)
    p = PathLossParams(k=1.0, alpha_los=2.5, alpha_nlos=3.5)
    assert p.alpha(LinkState.LOS) == 2.5
    assert p.alpha(LinkState.NLOS) == 3.5


def test_operator_params_zeros_allowed_negatives_rejected():
    OperatorParams(density_per_m2=0.0, bandwidth_hz=0.0, power_watts=0.0)
    with pytest.raises(ValueError):
        OperatorParams(density_per_m2=-1e-5, bandwidth_hz=1e7, power_watts=1.0)
    with pytest.raises(ValueError):
        OperatorParams(density_per_m2=1e-5, bandwidth_hz=-1.0, power_watts=1.0)
    with pytest.raises(ValueError):
        OperatorParams(density_per_m2=1e-5, bandwidth_hz=1e7, power_watts=-0.5)


def test_scenario_operator_accessors_and_noise():
    sc = urban_scenario(w1=1e7, w2=2e7)
    assert sc.operator(1) is sc.operator1
    assert sc.operator(2) is sc.operator2
    with pytest.raises(ValueError):
        sc.operator(3)
    assert sc.noise_power(1) == noise_power(1e7, 10.0)
    assert sc.noise_power(2) == noise_power(2e7, 10.0)


def test_scenario_swapped_exchanges_operators_only():
    sc = urban_scenario(lam1=1e-4, lam2=3e-4, w1=1e7, w2=5e6, p1=1.0, p2=2.0)
    sw = sc.swapped()
    assert sw.operator1 == sc.operator2
    assert sw.operator2 == sc.operator1
    assert sw.link_state == sc.link_state
    assert sw.pathloss == sc.pathloss
    assert sw.swapped() == sc


def test_containers_are_frozen():
    sc = urban_scenario()
    with pytest.raises(dataclasses.FrozenInstanceError):
        sc.noise_figure_db = 3.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        sc.operator1.power_watts = 2.0
