import math

import numpy as np
import pytest

from src.errors import ConfigInvalid, NearKink, NegativeArgument
from src.physics.potential import Potential
from src.physics.profile_1d import adaptive_integral, compute_cF_tilde
from src.physics.ramps import Ramp


# ---------- rampas ----------

def test_cubic_ramp_values():
    ramp = Ramp("cubic", 1.0, 0.5)
    assert ramp.f_eval(0.0) == pytest.approx((0.0, 12.0))
    assert ramp.f_eval(0.25) == pytest.approx((1.0, 0.0), abs=1e-15)
    assert ramp.f_eval(0.125)[0] == pytest.approx(0.875)
    assert ramp.f_eval(3.0) == (1.0, 0.0)


@pytest.mark.parametrize("kind", ["cubic", "quintic"])
def test_ramp_linear_bounds_and_junction(kind):
    ramp = Ramp(kind, 2.0, 0.4)
    s = np.linspace(1e-9, ramp.delta0**2, 500)
    value, _ = ramp.f_eval(s)
    assert np.all(value >= ramp.c1 * s - 1e-12)
    assert np.all(value <= ramp.c2 * s + 1e-12)
    # C² en la unión con la meseta
    assert ramp.f_second(ramp.delta0**2 * (1 - 1e-9)) == pytest.approx(0.0, abs=1e-6)
    assert ramp.f_eval(ramp.delta0**2 * (1 - 1e-9))[1] == pytest.approx(0.0, abs=1e-6)


def test_ramp_derivative_matches_finite_differences():
    ramp = Ramp("quintic", 1.0, 0.5)
    s = np.linspace(0.01, 0.24, 20)
    step = 1e-7
    fd = (ramp.value(s + step) - ramp.value(s - step)) / (2 * step)
    np.testing.assert_allclose(ramp.f_eval(s)[1], fd, rtol=1e-6)


def test_ramp_rejects_negative_argument():
    with pytest.raises(NegativeArgument):
        Ramp("cubic", 1.0, 0.5).f_eval(-1e-3)


# ---------- F y ∂F ----------

def test_F_and_gradient_reference_point(potential):
    assert potential.F_eval([1.25, 0.0]) == pytest.approx(0.578125)
    np.testing.assert_allclose(potential.grad_F([1.25, 0.0]), [3.375, 0.0], rtol=1e-12)


def test_F_vanishes_on_wells_and_saturates(potential):
    assert potential.F_eval([1.0, 0.0]) == 0.0
    np.testing.assert_allclose(potential.grad_F([-1.0, 0.0]), [0.0, 0.0], atol=1e-15)
    assert potential.F_eval([0.0, 0.0]) == pytest.approx(1.0)
    np.testing.assert_allclose(potential.grad_F([0.0, 0.0]), [0.0, 0.0])


def test_potential_rejects_bad_parameters(spheres):
    with pytest.raises(ConfigInvalid):
        Potential(spheres, c3=0.0)
    with pytest.raises(ConfigInvalid):
        Potential(spheres, delta0=1.5)


def test_hessian_bound_dominates_normal_slope(potential):
    assert potential.hessian_bound() >= 2 * potential.params.c4 - 1e-9


# ---------- c_F ----------

def test_cF_matches_centralized_formula(potential):
    tilde = compute_cF_tilde(potential.ramp, potential.manifold.gap)
    assert abs(tilde - potential.cF) <= 1e-8


def test_cF_scales_with_sqrt_c3(spheres):
    one = Potential(spheres, c3=1.0, delta0=0.5).cF
    two = Potential(spheres, c3=2.0, delta0=0.5).cF
    assert two / one == pytest.approx(math.sqrt(2.0), rel=1e-10)


def test_cF_approaches_constant_limit(spheres):
    # δ₀ → 0: c_F → √(2c3)·dist_m
    value = Potential(spheres, c3=1.0, delta0=1e-3).cF
    assert value == pytest.approx(math.sqrt(2.0) * 2.0, rel=2e-3)


# ---------- d_F ----------

def test_quasi_dist_on_wells_and_midset(potential):
    assert potential.quasi_dist([-1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert potential.quasi_dist([1.0, 0.0]) == pytest.approx(potential.cF, abs=1e-12)
    assert potential.quasi_dist([0.0, 0.0]) == pytest.approx(potential.cF / 2, abs=1e-9)
    # lejos de ambos pozos y fuera de U±
    assert potential.quasi_dist([0.0, 5.0]) == pytest.approx(potential.cF / 2)


def test_quasi_dist_reference_point(potential):
    integrand = lambda lam: math.sqrt(2.0 * potential.ramp.value(lam * lam))
    expected = potential.cF - adaptive_integral(integrand, 0.0, 0.25, tol=1e-12)
    assert potential.quasi_dist([1.25, 0.0]) == pytest.approx(expected, abs=1e-10)


def test_quasi_dist_range(potential):
    rng = np.random.default_rng(11)
    u = rng.uniform(-4, 4, size=(500, 2))
    psi = potential.quasi_dist(u)
    assert psi.min() >= -1e-12
    assert psi.max() <= potential.cF + 1e-12


def test_grad_quasi_dist_matches_finite_differences(potential):
    u = np.array([1.2, 0.1])
    step = 1e-6
    fd = np.array([
        (potential.quasi_dist(u + e) - potential.quasi_dist(u - e)) / (2 * step)
        for e in np.eye(2) * step
    ])
    np.testing.assert_allclose(potential.grad_quasi_dist(u), fd, rtol=1e-5)


def test_grad_quasi_dist_bounded_by_potential(potential):
    rng = np.random.default_rng(5)
    u = rng.uniform(-3, 3, size=(400, 2))
    grad = potential.grad_quasi_dist(u, strict=False)
    bound = np.sqrt(2.0 * potential.F_eval(u)) + 1e-10
    assert np.all(np.linalg.norm(grad, axis=-1) <= bound)


def test_grad_quasi_dist_constant_cases(potential):
    np.testing.assert_allclose(potential.grad_quasi_dist([0.0, 5.0]), [0.0, 0.0])
    np.testing.assert_allclose(potential.grad_quasi_dist([-1.0, 0.0]), [0.0, 0.0], atol=1e-15)


def test_grad_quasi_dist_near_kink(potential):
    # borde del semitubo de m₊ lejos del eje: d_F salta de rama
    theta = 2.0
    u = np.array([2.0 + 2.0 * math.cos(theta), 2.0 * math.sin(theta)])
    with pytest.raises(NearKink):
        potential.grad_quasi_dist(u)


def test_centralized_potential_even_and_zero_at_wells(potential):
    lam = np.linspace(-1.0, 1.0, 41)
    np.testing.assert_allclose(potential.centralized_potential(lam), potential.centralized_potential(-lam))
    assert potential.centralized_potential(1.0) == pytest.approx(0.0, abs=1e-15)
    assert potential.centralized_potential(0.0) == pytest.approx(potential.ramp.value(1.0))
