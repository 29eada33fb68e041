"""Tests for observables, error functionals, the reformulated residual and series analysis."""

import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vphermite.core.experiment import TemporalStudyResult
from vphermite.core.models import (
    CaseId,
    DiagnosticsRecord,
    ErrorMode,
    FieldSolution,
    HermiteBasisSpec,
    HermiteState,
)
from vphermite.diagnostics.analysis import dominant_period, fit_slope, growth_rate, observed_orders
from vphermite.diagnostics.observables import (
    DiagnosticsCollector,
    capture_reference,
    compute_record,
    conservation_report,
    e_slow,
    energy_anomaly,
    error_functionals,
    oscillatory_parts,
    potential_energy,
    reformulated_residual,
)
from vphermite.discretization.field import solve_poisson
from vphermite.discretization.grid import Mesh1D, centered_symbol, l2_norm
from vphermite.scheme.integrators import run


@pytest.fixture
def mesh():
    return Mesh1D.uniform(-10.0, 10.0, 33)


def test_slow_field_of_constant_and_sine(mesh):
    """Test E_slow = sqrt(2) T0 d_h C_2."""
    basis = HermiteBasisSpec(T0=2.0, n_hermite=3)
    coeffs = np.zeros((4, 33))
    coeffs[0] = 1.0
    coeffs[2] = 0.4
    assert_allclose(e_slow(HermiteState(coeffs, basis, mesh)), 0.0, atol=1e-15)

    k = math.pi / 10.0
    coeffs[2] = np.sin(k * mesh.centers)
    expected = math.sqrt(2.0) * 2.0 * centered_symbol(k, mesh.h) * np.cos(k * mesh.centers)
    assert_allclose(e_slow(HermiteState(coeffs, basis, mesh)), expected, atol=1e-12)


def test_oscillatory_parts_rotate_with_plasma_phase(mesh):
    """Test the oscillatory pair at t = 0 and half a plasma period."""
    rng = np.random.default_rng(20)
    e0, c10 = rng.normal(size=33), rng.normal(size=33)
    lam, T0 = 0.1, 1.0
    state = HermiteState(np.vstack([np.ones(33), c10, np.zeros(33)]), HermiteBasisSpec(n_hermite=2), mesh)
    ref = capture_reference(state, FieldSolution(phi=np.zeros(33), E=e0, lam=lam))

    e_osc, c1_osc = oscillatory_parts(ref, 0.0)
    assert_allclose(e_osc, e0)
    assert_allclose(c1_osc, c10)

    e_osc, c1_osc = oscillatory_parts(ref, math.pi * lam)
    assert_allclose(e_osc, -e0, atol=1e-12)
    assert_allclose(c1_osc, -c10, atol=1e-12)

    e_osc, c1_osc = oscillatory_parts(ref, 0.5 * math.pi * lam)
    assert_allclose(e_osc, -(math.sqrt(T0) / lam) * c10, atol=1e-12)
    assert_allclose(c1_osc, (lam / math.sqrt(T0)) * e0, atol=1e-12)

    with pytest.raises(ValueError, match="t must be"):
        oscillatory_parts(ref, -1.0)


def test_oscillation_amplitude_depends_only_on_fast_time(mesh):
    """Test that ||E_osc|| is lambda-independent at fixed t / lambda when C_1(0) = 0."""
    e0 = np.sin(math.pi / 10.0 * mesh.centers)
    state = HermiteState.equilibrium(HermiteBasisSpec(n_hermite=2), mesh)
    norms = []
    for lam in (0.1, 0.01):
        ref = capture_reference(state, FieldSolution(phi=np.zeros(33), E=e0, lam=lam))
        norms.append(l2_norm(oscillatory_parts(ref, 0.3 * lam)[0], mesh))
    assert norms[0] == pytest.approx(norms[1], rel=1e-12)


def test_error_functionals_vanish_at_initial_time(make_setup):
    """Test that the continuous functionals are zero at t = 0 and need a reference."""
    cfg, initial = make_setup(CaseId.TEMPERATURE_PERTURBATION)
    field = solve_poisson(initial.coeffs[0], cfg.lam, cfg.mesh)
    ref = capture_reference(initial, field)

    err0, err1 = error_functionals(initial, field, ref, 0.0)
    assert err0 == pytest.approx(0.0, abs=1e-14)
    assert err1 == pytest.approx(0.0, abs=1e-14)

    with pytest.raises(ValueError, match="reference"):
        error_functionals(initial, field, None, 0.0)


def test_error_functionals_of_equilibrium(mesh):
    """Test both modes on the steady state."""
    state = HermiteState.equilibrium(HermiteBasisSpec(n_hermite=4), mesh)
    field = solve_poisson(state.coeffs[0], 0.1, mesh)
    ref = capture_reference(state, field)

    for mode in ErrorMode:
        err0, err1 = error_functionals(state, field, ref, 1.0, mode)
        assert err0 == pytest.approx(0.0, abs=1e-14)
        assert err1 == pytest.approx(0.0, abs=1e-14)


def test_discrete_error_functionals_use_h1_norm_of_flux(mesh):
    """Test the discrete pair on a state with C_1 = sin(kx)."""
    k = math.pi / 10.0
    coeffs = np.zeros((3, 33))
    coeffs[0] = 1.0
    coeffs[1] = np.sin(k * mesh.centers)
    state = HermiteState(coeffs, HermiteBasisSpec(n_hermite=2), mesh)
    field = FieldSolution(phi=np.zeros(33), E=np.full(33, 0.5), lam=0.1)

    err0, err1 = error_functionals(state, field, None, 0.0, ErrorMode.DISCRETE)
    assert err0 == pytest.approx(0.5 * math.sqrt(20.0))
    assert err1 == pytest.approx(math.sqrt(10.0 * (1.0 + centered_symbol(k, mesh.h) ** 2)), rel=1e-12)


def test_conservation_report_of_equilibrium_and_two_stream(mesh, make_setup):
    """Test mass, flux and energy of reference states."""
    state = HermiteState.equilibrium(HermiteBasisSpec(n_hermite=4), mesh)
    field = FieldSolution(phi=np.zeros(33), E=np.zeros(33), lam=0.1)
    report = conservation_report(state, field, mesh, 0.1)
    assert report.mass == pytest.approx(20.0, rel=1e-14)
    assert report.flux == 0.0
    assert report.total_energy == pytest.approx(10.0, rel=1e-14)
    assert potential_energy(field, mesh) == 0.0

    cfg, initial = make_setup(CaseId.TWO_STREAM, n_hermite=16)
    field = solve_poisson(initial.coeffs[0], cfg.lam, cfg.mesh)
    report = conservation_report(initial, field, cfg.mesh, cfg.lam)
    assert report.mass == pytest.approx(12.0, rel=1e-10)
    assert report.flux == pytest.approx(0.0, abs=1e-12)


def test_reformulated_residual_vanishes_on_first_order_trajectory(make_setup):
    """Test the discrete oscillator identity along a Lie run and its sensitivity."""
    cfg, initial = make_setup(lam=0.1, dt=0.05, t_final=0.5, order=1, n_cells=33)
    snapshots = []
    run(cfg, initial, [snapshots.append])

    residuals = []
    for n in range(2, len(snapshots)):
        prev, curr, nxt = snapshots[n - 2], snapshots[n - 1], snapshots[n]
        residuals.append(
            reformulated_residual(
                prev.field.E,
                curr.field.E,
                nxt.field.E,
                nxt.state.coeffs[0],
                nxt.c2_intermediate,
                cfg.dt,
                cfg.lam,
                cfg.mesh,
            ),
        )
    assert len(residuals) == 9
    assert max(residuals) <= 1e-10

    prev, curr, nxt = snapshots[2], snapshots[3], snapshots[4]
    perturbed = nxt.field.E + 1e-3 * np.cos(math.pi / 10.0 * cfg.mesh.centers)
    off_trajectory = reformulated_residual(
        prev.field.E, curr.field.E, perturbed, nxt.state.coeffs[0], nxt.c2_intermediate,
        cfg.dt, cfg.lam, cfg.mesh,
    )
    assert off_trajectory >= 1e-4

    with pytest.raises(ValueError, match="intermediate"):
        reformulated_residual(prev.field.E, curr.field.E, nxt.field.E, nxt.state.coeffs[0], None,
                              cfg.dt, cfg.lam, cfg.mesh)


def test_collector_records_every_level(make_setup):
    """Test record count, residual availability and reproducibility from the state."""
    cfg, initial = make_setup(dt=0.05, t_final=0.25, order=1)
    collector = DiagnosticsCollector()
    trajectory = run(cfg, initial, [collector])

    assert len(collector.records) == 6
    residuals = collector.series("reformulated_residual")
    assert np.all(np.isnan(residuals[:2]))
    assert np.all(np.isfinite(residuals[2:]))
    assert_allclose(collector.times, [0.0, 0.05, 0.1, 0.15, 0.2, 0.25])
    assert collector.records[0].t_over_lambda == 0.0

    recomputed = compute_record(
        trajectory.state, trajectory.field, collector.reference, trajectory.t, residuals[-1],
    )
    assert dataclasses.astuple(recomputed) == pytest.approx(dataclasses.astuple(collector.records[-1]))

    with pytest.raises(KeyError):
        collector.series("not_a_column")


def test_collector_has_no_residual_for_second_order(make_setup):
    """Test that Strang runs leave the residual column empty."""
    cfg, initial = make_setup(order=2, t_final=0.2)
    collector = DiagnosticsCollector()
    run(cfg, initial, [collector])
    assert np.all(np.isnan(collector.series("reformulated_residual")))
    assert math.isnan(collector.max_of("reformulated_residual"))


def test_energy_anomaly_flags_fast_growth():
    """Test the relative energy growth check on synthetic records."""
    template = dict.fromkeys(
        (
            "potential_energy", "mass", "flux", "err0_cont", "err1_cont", "err0_disc",
            "err1_disc", "reformulated_residual", "e_norm", "e_slow_norm", "t_over_lambda",
        ),
        0.0,
    )

    steady = [DiagnosticsRecord(t=t, total_energy=10.0, **template) for t in (0.0, 1.0, 2.0)]
    growing = [DiagnosticsRecord(t=t, total_energy=10.0 * (1 + 0.05 * t), **template) for t in (0.0, 1.0)]
    assert not energy_anomaly(steady)
    assert energy_anomaly(growing)
    assert not energy_anomaly(steady[:1])


def test_fit_slope_recovers_power_laws():
    """Test log-log fits of exact power laws and input validation."""
    lambdas = [0.32, 0.18, 0.1, 0.056, 0.032]
    fit = fit_slope(lambdas, [3.0 * lam**2 for lam in lambdas])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)

    with pytest.raises(ValueError, match="three"):
        fit_slope([0.1, 0.2], [1.0, 2.0])
    with pytest.raises(ValueError, match="positive"):
        fit_slope([0.1, 0.2, 0.3], [1.0, 0.0, 2.0])


def test_observed_orders_stay_aligned_with_step_sizes():
    """Test that pairs with a zero error give nan instead of shifting later orders."""
    assert observed_orders([0.04, 0.02], [4e-3, 1e-3]) == pytest.approx([2.0])

    orders = observed_orders([0.08, 0.04, 0.02, 0.01], [1.6e-2, 0.0, 1e-3, 2.5e-4])
    assert len(orders) == 3
    assert math.isnan(orders[0])
    assert math.isnan(orders[1])
    assert orders[2] == pytest.approx(2.0)

    assert observed_orders([0.1], [1e-3]) == []
    with pytest.raises(ValueError, match="same length"):
        observed_orders([0.1, 0.05], [1e-3])


def test_min_order_ignores_undefined_pairs():
    """Test that the minimum observed order skips nan entries."""
    study = TemporalStudyResult(0.001, [0.04, 0.02, 0.01], [0.0, 1e-3, 2.5e-4], [math.nan, 2.0])
    assert study.min_order == pytest.approx(2.0)
    assert math.isnan(TemporalStudyResult(0.001, [0.04, 0.02], [0.0, 0.0], [math.nan]).min_order)


def test_dominant_period_of_pure_tones():
    """Test the spectral period estimate on cos(t / lambda) and its square."""
    lam = 0.1
    t = np.arange(0.0, 20.0 * math.pi * lam, 1e-3)

    assert dominant_period(t, np.cos(t / lam)) == pytest.approx(2.0 * math.pi * lam, rel=0.02)
    assert dominant_period(t, np.cos(t / lam) ** 2) == pytest.approx(math.pi * lam, rel=0.02)


def test_dominant_period_errors():
    """Test constant series, short spans and irregular sampling."""
    t = np.linspace(0.0, 1.0, 101)
    with pytest.raises(ValueError, match="constant"):
        dominant_period(t, np.full(101, 2.0))
    with pytest.raises(ValueError, match="periods"):
        dominant_period(t, np.cos(2.0 * math.pi * t / 0.5))
    with pytest.raises(ValueError, match="uniformly"):
        dominant_period(t**2, np.cos(t))


def test_growth_rate_of_exponential():
    """Test the exponential fit with and without a window."""
    t = np.linspace(0.0, 5.0, 51)
    values = 1e-3 * np.exp(0.7 * t)
    assert growth_rate(t, values) == pytest.approx(0.7, rel=1e-10)
    assert growth_rate(t, values, window=(1.0, 3.0)) == pytest.approx(0.7, rel=1e-10)
    with pytest.raises(ValueError, match="three"):
        growth_rate(t, values, window=(10.0, 20.0))
