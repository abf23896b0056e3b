import math

import numpy as np
import pytest
from scipy.optimize import brentq

from zetaladder.errors import DomainError
from zetaladder.rs import (RS_SWITCH, hardy_z, hardy_z_grid, riemann_siegel_theta,
                           rs_remainder, theta_prime, zeta_mod_sq)

from oracles import abs_zeta_em, hardy_z_ref, theta_loggamma


@pytest.mark.parametrize("t", [10.0, 20.0, 55.5, 300.0, 1000.0, 12345.6])
def test_theta_matches_loggamma(t):
    assert riemann_siegel_theta(t) == pytest.approx(theta_loggamma(t), rel=1e-14, abs=1e-12)


def test_theta_at_20():
    # the loggamma definition gives 1.1868948...; the series must agree
    assert riemann_siegel_theta(20.0) == pytest.approx(1.186894808444485, abs=1e-12)


def test_first_gram_point():
    g = brentq(riemann_siegel_theta, 17.0, 18.0, xtol=1e-12)
    assert g == pytest.approx(17.8455995, abs=1e-6)


def test_theta_prime_against_central_difference():
    t, h = 1000.0, 1e-3
    fd = (riemann_siegel_theta(t + h) - riemann_siegel_theta(t - h)) / (2 * h)
    assert theta_prime(t) == pytest.approx(fd, abs=1e-8)
    assert theta_prime(t) == pytest.approx(0.5 * math.log(1000 / (2 * math.pi)), abs=1e-4)


@pytest.mark.parametrize("t", [10.0, 14.0, 30.0, 123.4, 499.0, 501.0, 2000.0, 9876.5])
def test_hardy_z_against_siegelz(t):
    assert hardy_z(t) == pytest.approx(hardy_z_ref(t), abs=3e-9)


def test_abs_z_against_euler_maclaurin_at_30():
    assert abs(hardy_z(30.0)) == pytest.approx(abs_zeta_em(30.0), abs=1e-8)


def test_first_zero():
    z = brentq(hardy_z, 14.0, 15.0, xtol=1e-12)
    assert z == pytest.approx(14.134725, abs=1e-5)
    assert abs(hardy_z(14.134725141734693)) < 1e-9


def test_zeta_mod_sq_at_1000():
    assert zeta_mod_sq(1000.0) == pytest.approx(abs_zeta_em(1000.0) ** 2, rel=1e-7)


def test_vectorized_matches_scalar():
    ts = np.array([20.0, 400.0, 600.0, 5000.0])
    z = hardy_z(ts)
    assert z.shape == ts.shape
    assert [hardy_z(float(t)) for t in ts] == pytest.approx(list(z), abs=1e-13)


def test_grid_kernel_matches_pointwise():
    centers = np.array([1000.5, 2500.25, 70000.0])
    offsets = np.linspace(-0.4, 0.4, 9)
    grid = hardy_z_grid(centers, offsets)
    ref = hardy_z(centers[:, None] + offsets[None, :])
    assert np.max(np.abs(grid - ref)) < 1e-9


def test_grid_kernel_low_heights_fall_back():
    centers = np.array([50.0, RS_SWITCH - 1.0])
    offsets = np.array([-0.5, 0.0, 0.5])
    assert np.allclose(hardy_z_grid(centers, offsets), hardy_z(centers[:, None] + offsets), atol=1e-14)


def test_remainder_is_small_correction():
    r = rs_remainder(1000.0)
    assert abs(r) < 0.2


@pytest.mark.parametrize("bad", [9.99, -1.0, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        hardy_z(bad)
    with pytest.raises(DomainError):
        riemann_siegel_theta(bad)
