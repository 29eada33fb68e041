"""Tests for the Hermite basis, projection and moments."""

import math

import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermegauss
from numpy.testing import assert_allclose
from scipy.integrate import quad

from vphermite.core.exceptions import ConfigurationError
from vphermite.core.models import HermiteBasisSpec, HermiteState
from vphermite.discretization.grid import Mesh1D
from vphermite.discretization.hermite import (
    eval_basis,
    maxwellian,
    moments,
    project,
    project_cells,
    quadrature_rule,
    reconstruct,
)


def test_basis_values_at_known_points():
    """Test the first basis functions against closed forms."""
    spec = HermiteBasisSpec(T0=1.0, n_hermite=4)

    at_zero = eval_basis(0.0, spec)
    assert at_zero.shape == (5,)
    assert at_zero[0] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
    assert at_zero[1] == 0.0

    at_one = eval_basis(1.0, spec)
    assert at_one[1] == pytest.approx(math.exp(-0.5) / math.sqrt(2.0 * math.pi), rel=1e-14)
    assert at_one[1] == pytest.approx(0.241971, abs=1e-6)


def test_basis_recurrence_holds_with_temperature():
    """Test the weighted three-term recurrence at random velocities for T0 != 1."""
    T0 = 1.7
    spec = HermiteBasisSpec(T0=T0, n_hermite=12)
    v = np.random.default_rng(0).uniform(-4.0, 4.0, size=50)
    psi = eval_basis(v, spec)

    assert psi.shape == (13, 50)
    for k in range(1, 12):
        expected = (v * psi[k] - math.sqrt(k * T0) * psi[k - 1]) / math.sqrt((k + 1) * T0)
        assert_allclose(psi[k + 1], expected, rtol=1e-12, atol=1e-300)


def test_basis_rejects_non_finite_velocity():
    """Test that NaN velocities are rejected."""
    with pytest.raises(ValueError, match="finite"):
        eval_basis(np.array([0.0, np.nan]), HermiteBasisSpec())


def test_basis_requires_three_modes():
    """Test that fewer than three modes are rejected."""
    with pytest.raises(ConfigurationError, match="n_hermite"):
        HermiteBasisSpec(n_hermite=1)


def test_basis_orthonormal_for_inverse_maxwellian_weight():
    """Test orthonormality of Psi_k with weight 1/M using an exact quadrature."""
    spec = HermiteBasisSpec(T0=1.0, n_hermite=10)
    rule = quadrature_rule(22, 1.0)
    psi = eval_basis(rule.nodes, spec)
    weight = rule.weights / maxwellian(rule.nodes)
    gram = (psi * weight) @ psi.T

    assert_allclose(gram, np.eye(11), atol=1e-10)


def test_project_maxwellian_and_shifted_moment():
    """Test projection of M and v*M onto the basis."""
    spec = HermiteBasisSpec(T0=1.0, n_hermite=16)

    coeffs = project(maxwellian, spec)
    expected = np.zeros(17)
    expected[0] = 1.0
    assert_allclose(coeffs, expected, atol=1e-12)

    coeffs = project(lambda v: v * maxwellian(v), spec)
    expected = np.zeros(17)
    expected[1] = 1.0
    assert_allclose(coeffs, expected, atol=1e-12)


def test_project_hotter_maxwellian_matches_adaptive_quadrature():
    """Test C_2 of a Maxwellian with T = 1.1 against scipy's adaptive integration."""
    spec = HermiteBasisSpec(T0=1.0, n_hermite=8)
    coeffs = project(lambda v: maxwellian(v, 1.1), spec)

    def integrand(v: float) -> float:
        return float(maxwellian(np.array(v), 1.1)) * (v * v - 1.0) / math.sqrt(2.0)

    oracle, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)
    assert oracle == pytest.approx(0.1 / math.sqrt(2.0), rel=1e-10)
    assert coeffs[2] == pytest.approx(oracle, rel=1e-10)
    assert coeffs[0] == pytest.approx(1.0, rel=1e-12)
    assert abs(coeffs[1]) < 1e-14


def test_project_with_many_modes_stays_finite():
    """Test that tail weights underflowing does not produce NaNs for large N_H."""
    spec = HermiteBasisSpec(T0=1.0, n_hermite=400)
    coeffs = project(maxwellian, spec)

    assert np.all(np.isfinite(coeffs))
    assert coeffs[0] == pytest.approx(1.0, rel=1e-12)
    assert np.max(np.abs(coeffs[1:])) < 1e-8


def test_quadrature_rule_integrates_maxwellian():
    """Test that the rescaled Gauss rule integrates M to one."""
    for T0 in (0.5, 1.0, 2.0):
        rule = quadrature_rule(64, T0)
        assert float(np.dot(rule.weights, maxwellian(rule.nodes, T0))) == pytest.approx(1.0, rel=1e-13)


def test_quadrature_rule_matches_probabilists_gauss_hermite():
    """Test nodes and rescaled weights against numpy's hermegauss at T0 = 2."""
    x, w = hermegauss(20)
    rule = quadrature_rule(20, 2.0)
    assert_allclose(rule.nodes, math.sqrt(2.0) * x, rtol=1e-12, atol=1e-14)
    assert_allclose(rule.weights, math.sqrt(2.0) * w * np.exp(0.5 * x * x), rtol=1e-10)


def test_quadrature_order_below_twice_modes_rejected():
    """Test that a quadrature too coarse for the basis raises ConfigurationError."""
    spec = HermiteBasisSpec(n_hermite=40)
    with pytest.raises(ConfigurationError, match="alias"):
        project(maxwellian, spec, quadrature_order=60)


def test_project_cells_shape_and_moments():
    """Test per-cell projection of a local Maxwellian."""
    mesh = Mesh1D.uniform(-10.0, 10.0, 9)
    spec = HermiteBasisSpec(T0=1.0, n_hermite=20)
    temperature = 1.0 + 0.1 * np.cos(0.1 * np.pi * mesh.centers)

    coeffs = project_cells(
        lambda x, v: maxwellian(v, 1.0 + 0.1 * np.cos(0.1 * np.pi * x)), mesh.centers, spec, 64,
    )
    assert coeffs.shape == (21, 9)

    m = moments(HermiteState(coeffs, spec, mesh))
    assert_allclose(m.rho, 1.0, atol=1e-12)
    assert_allclose(m.current, 0.0, atol=1e-14)
    assert_allclose(m.kinetic, temperature, rtol=1e-12)
    assert_allclose(m.temperature, temperature, rtol=1e-12)


def test_moments_use_basis_temperature():
    """Test the moment formulas for a basis with T0 != 1."""
    mesh = Mesh1D.uniform(0.0, 1.0, 3)
    spec = HermiteBasisSpec(T0=2.0, n_hermite=3)
    coeffs = np.zeros((4, 3))
    coeffs[0] = 1.0
    coeffs[1] = 0.5
    coeffs[2] = 0.25

    m = moments(HermiteState(coeffs, spec, mesh))
    assert_allclose(m.current, math.sqrt(2.0) * 0.5)
    assert_allclose(m.kinetic, 2.0 * (math.sqrt(2.0) * 0.25 + 1.0))


def test_reconstruct_equilibrium_and_zero():
    """Test reconstruction of the equilibrium and of the zero state."""
    mesh = Mesh1D.uniform(-1.0, 1.0, 5)
    spec = HermiteBasisSpec(n_hermite=6)
    v = np.linspace(-3.0, 3.0, 13)

    f = reconstruct(HermiteState.equilibrium(spec, mesh), v)
    assert f.shape == (5, 13)
    assert_allclose(f, np.broadcast_to(maxwellian(v), (5, 13)), rtol=1e-14)
    assert f[0, 6] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))

    zero = HermiteState(np.zeros((7, 5)), spec, mesh)
    assert np.all(reconstruct(zero, v) == 0.0)


def test_truncation_error_decreases_with_modes():
    """Test spectral convergence of the reconstruction of a hotter Maxwellian."""
    mesh = Mesh1D.uniform(-1.0, 1.0, 3)
    v = np.linspace(-5.0, 5.0, 201)
    target = maxwellian(v, 1.2)

    errors = []
    for n_hermite in (4, 8, 16, 32):
        spec = HermiteBasisSpec(n_hermite=n_hermite)
        coeffs = np.repeat(project(lambda w: maxwellian(w, 1.2), spec)[:, np.newaxis], 3, axis=1)
        f = reconstruct(HermiteState(coeffs, spec, mesh), v)
        errors.append(float(np.max(np.abs(f[0] - target))))

    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
    assert errors[-1] < 1e-8


def test_state_is_read_only_and_validated():
    """Test HermiteState shape validation and immutability."""
    mesh = Mesh1D.uniform(0.0, 1.0, 3)
    spec = HermiteBasisSpec(n_hermite=2)
    state = HermiteState.equilibrium(spec, mesh)

    with pytest.raises(ValueError, match="read-only"):
        state.coeffs[0, 0] = 2.0
    with pytest.raises(ValueError, match="shape"):
        HermiteState(np.zeros((2, 3)), spec, mesh)
    with pytest.raises(ValueError, match="finite"):
        HermiteState(np.full((3, 3), np.inf), spec, mesh)
