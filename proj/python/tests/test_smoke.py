import math

import numpy as np
import pytest

import curvedfronts as cf

C03 = 0.263436171681677


def test_nonlinearity_values():
    nl = cf.Nonlinearity(0.3)
    assert nl.f(0.65) == pytest.approx(0.042875, rel=1e-13)
    assert nl.fprime(0.95) == pytest.approx(-0.3575, rel=1e-13)
    assert nl.gamma_star == pytest.approx(0.025, rel=1e-8)


def test_bad_theta_raises():
    with pytest.raises(ValueError):
        cf.Nonlinearity(1.5)


def test_wave_speed_and_profile():
    nl = cf.Nonlinearity(0.3)
    c = cf.find_wave_speed(nl)
    assert c == pytest.approx(C03, rel=1e-9)
    prof = cf.build_profile(nl, c)
    assert prof(0.0) == pytest.approx(0.3, rel=1e-12)
    D = prof.grid()
    U = prof.values()
    assert isinstance(U, np.ndarray) and U.shape == D.shape
    assert np.all(np.diff(U) <= 1e-15)
    chk = cf.check_profile(prof, nl)
    assert chk["ode_residual"] <= 1e-6
    assert chk["beta0_rel_error"] <= 0.01


def test_scaling():
    r = cf.check_scaling(cf.Nonlinearity(0.3), 2.0)
    assert r["speed_ratio"] == pytest.approx(2.0, rel=5e-3)


def test_surface_apex():
    cfg = cf.FrontConfiguration.symmetric(2, 2, math.pi / 3, C03)
    s = cf.Surface(cfg, 1.0)
    assert abs(s.phi(0.0, [0.0]) - math.log(2) / math.sin(math.pi / 3)) < 1e-12
    assert s.flatness(0.0, [0.0]) == pytest.approx(0.5, rel=1e-12)
    r = cf.check_surface(cfg, count=2000)
    assert r["max_residual"] <= 1e-12
    assert r["min_gap"] >= 0


def test_ridge_distance_above_apex():
    cfg = cf.FrontConfiguration.symmetric(2, 2, math.pi / 3, C03)
    ex = 1 / math.sqrt(1 + (C03 / math.sin(math.pi / 3)) ** 2)
    assert cfg.ridge_distance(0.0, [0.0, 1.0]) == pytest.approx(ex, rel=1e-12)
