"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import pestctl


@pytest.fixture
def params():
    return pestctl.ModelParams()


def test_defaults_are_valid(params):
    params.validate()
    assert params.r == 0.05
    assert params.alpha == 0.025
    assert params.phi == 0.5


def test_rhs_vanishes_at_fixed_points(params):
    for X in (0.0, params.K):
        f = pestctl.rhs(params, pestctl.State(X, 0.0, 0.0, params.omega / params.eta))
        assert np.max(np.abs(f)) <= 1e-12


def test_unit_controls_recover_the_base_system(params):
    s = pestctl.State(0.2, 0.07, 0.05, 0.5)
    a = pestctl.rhs(params, s)
    b = pestctl.rhs_controlled(params, s, pestctl.ControlTriple(1.0, 1.0, 1.0))
    assert np.array_equal(a, b)


def test_jacobian_matches_finite_differences(params):
    s = pestctl.State(0.2, 0.07, 0.05, 0.5)
    J = np.asarray(pestctl.jacobian(params, s))
    h = 1e-7
    for j, name in enumerate("XSIA"):
        hi = pestctl.State(s.X, s.S, s.I, s.A)
        lo = pestctl.State(s.X, s.S, s.I, s.A)
        setattr(hi, name, getattr(s, name) + h)
        setattr(lo, name, getattr(s, name) - h)
        col = (np.asarray(pestctl.rhs(params, hi)) - np.asarray(pestctl.rhs(params, lo))) / (2 * h)
        assert np.allclose(J[:, j], col, rtol=1e-6, atol=1e-9)


def test_axial_point_is_unstable(params):
    c = pestctl.classify_E0(params)
    assert c.verdict == pestctl.StabilityVerdict.Unstable
    assert c.witness_eigenvalue == pytest.approx(params.r)


def test_thresholds(params):
    t = pestctl.thresholds(params)
    assert t.R0 == pytest.approx(24.0 / 23.0, rel=1e-12)
    assert pestctl.classify_E1(params).verdict == pestctl.StabilityVerdict.Unstable


def test_equilibria_and_sextic(params):
    eqs = pestctl.coexistence_equilibria(params)
    assert len(eqs) == 1
    e = eqs[0]
    assert e.kind == pestctl.EquilibriumKind.Coexistence
    assert e.residual_norm <= 1e-9
    sextic = pestctl.sextic_coefficients(params)
    assert abs(sextic.eval(e.state.A)) <= 1e-6 * sextic.max_coefficient_magnitude()


def test_forward_integration_stays_nonnegative(params):
    grid = pestctl.TimeGrid(0.0, 120.0, 2400)
    traj = pestctl.integrate_forward(params, pestctl.State(0.2, 0.07, 0.05, 0.5), grid)
    values = np.asarray(traj.values)
    assert values.shape == (2401, 4)
    assert values.min() >= 0.0
    cert = pestctl.bounds_certificate(params, traj)
    assert cert.bound_XSI == pytest.approx(1.8)
    assert cert.satisfied


def test_sweep_smoke(params):
    grid = pestctl.TimeGrid(0.0, 60.0, 600)
    sweep = pestctl.fbsm(params, pestctl.ObjectiveWeights(), pestctl.State(0.2, 0.07, 0.05, 0.5), grid)
    assert sweep.converged
    controls = np.asarray(sweep.control.values)
    assert controls.min() >= 0.0
    assert controls.max() <= 1.0
    assert math.isfinite(sweep.objective)
    # adjoint ends at the terminal condition
    assert np.allclose(np.asarray(sweep.adjoint.values)[-1], 0.0)


def test_hopf_scan_smoke(params):
    params.K = 3.0
    scan = pestctl.hopf_scan(params, 0.10, 0.25, 8)
    assert len(scan.points) == 1
    h = scan.points[0]
    assert 0.10 < h.alpha_star < 0.25
    assert h.imag_part_omega0 > 0.0
    assert h.eigen_crossing_verified


def test_no_coexistence_raises(params):
    with pytest.raises(pestctl.NoCoexistenceError):
        pestctl.psi(params, 0.002)


def test_branch_continuation(params):
    s = pestctl.track_interior_equilibrium(params, 0.12, None)
    assert s is not None
    s2 = pestctl.track_interior_equilibrium(params, 0.13, s)
    assert s2 is not None
    q = pestctl.ModelParams()
    q.alpha = 0.13
    assert pestctl.interior_crop_from_awareness(q, s2.A) == pytest.approx(s2.X, rel=1e-8)
    assert pestctl.track_interior_equilibrium(params, 0.002, None) is None
