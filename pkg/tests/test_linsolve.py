"""Step-operator and solver tests, including the dense 1D oracle.

The oracle assembles the step operator as a literal dense matrix from the
explicit stencil matrices (no transforms involved) and solves with LAPACK;
Krylov and direct solutions must match it to 1e-10.
"""

import numpy as np
import pytest

from cnls.linsolve import (
    SolveReport,
    SolverConfig,
    SolverError,
    StepOperator,
    apply_step_operator,
    cayley_propagator,
    cayley_step,
    solve,
)
from cnls.mesh import Field, RealField, make_mesh
from cnls.operators import inner, norm_l2, symbols

from conftest import MESHES, plane_wave, random_complex_field, random_real_field

TWO_PI = 2.0 * np.pi


def dense_step_matrix(m, sigma, kappa, tau, nu):
    """Dense 1D step matrix built from first principles."""
    n = m.points[0]
    h = m.spacings[0]
    avg = np.zeros((n, n))
    d2 = np.zeros((n, n))
    for i in range(n):
        avg[i, i] = 10 / 12
        avg[i, (i + 1) % n] = 1 / 12
        avg[i, (i - 1) % n] = 1 / 12
        d2[i, i] = -2 / h**2
        d2[i, (i + 1) % n] = 1 / h**2
        d2[i, (i - 1) % n] = 1 / h**2
    mat = np.eye(n, dtype=complex) - 1j * sigma * kappa * tau * (np.linalg.inv(avg) @ d2)
    if nu is not None:
        mat -= 1j * sigma * tau * np.diag(nu)
    return mat


class TestApplyStepOperator:
    def test_zero_tau_is_identity(self, rng):
        m = MESHES["2d8"]
        op = StepOperator(m, 0.5, 1.0, 0.0, random_real_field(m, rng))
        w = random_complex_field(m, rng)
        out = apply_step_operator(op, w)
        assert np.array_equal(out.values, w.values)

    def test_plane_wave_symbol(self):
        m = make_mesh(1, ((0, TWO_PI),), (16,))
        sigma, kappa, tau = 0.5, 0.7, 0.01
        op = StepOperator(m, sigma, kappa, tau)
        q = symbols(m).ratio
        for k in (0, 1, 5, 8):
            w = plane_wave(m, (k,))
            out = apply_step_operator(op, w)
            expect = (1.0 - 1j * sigma * kappa * tau * q[k]) * w.values
            assert np.allclose(out.values, expect, atol=1e-13)

    def test_real_part_identity(self, prop_mesh, rng):
        # Re (L w, w) = ||w||^2 for any potential
        for _ in range(50):
            sigma = rng.choice([0.25, 0.5])
            kappa = rng.normal()
            tau = abs(rng.normal()) * 0.1
            nu = random_real_field(prop_mesh, rng)
            op = StepOperator(prop_mesh, sigma, kappa, tau, nu)
            w = random_complex_field(prop_mesh, rng)
            lhs = inner(apply_step_operator(op, w), w).real
            assert lhs == pytest.approx(norm_l2(w) ** 2, rel=1e-11)

    def test_requires_real_potential(self, rng):
        m = MESHES["1d8"]
        with pytest.raises(TypeError, match="RealField"):
            StepOperator(m, 0.5, 1.0, 0.1, random_complex_field(m, rng))

    def test_mesh_mismatch(self, rng):
        op = StepOperator(MESHES["1d8"], 0.5, 1.0, 0.1)
        with pytest.raises(ValueError, match="mesh"):
            apply_step_operator(op, Field.zeros(MESHES["2d8"]))


class TestSolve:
    def test_plane_wave_closed_form(self):
        m = make_mesh(1, ((0, TWO_PI),), (16,))
        sigma, kappa, tau = 0.5, 1.0, 0.05
        op = StepOperator(m, sigma, kappa, tau)
        q = symbols(m).ratio
        k = 3
        rhs = plane_wave(m, (k,))
        w, report = solve(op, rhs, tol=1e-12)
        expect = rhs.values / (1.0 - 1j * sigma * kappa * tau * q[k])
        assert np.allclose(w.values, expect, atol=1e-12)
        assert report.converged and report.iterations <= 2

    def test_zero_tau_returns_rhs(self, rng):
        m = MESHES["2d8"]
        op = StepOperator(m, 0.5, 1.0, 0.0)
        rhs = random_complex_field(m, rng)
        w, report = solve(op, rhs, tol=1e-12)
        assert np.allclose(w.values, rhs.values, atol=1e-13)
        assert report.iterations <= 1

    def test_zero_rhs(self):
        m = MESHES["1d8"]
        op = StepOperator(m, 0.5, 1.0, 0.1)
        w, report = solve(op, Field.zeros(m), tol=1e-12)
        assert np.all(w.values == 0.0)
        assert report.iterations == 0 and report.converged

    @pytest.mark.parametrize("method", ["bicgstab", "gmres", "direct1d"])
    def test_random_potential_matches_dense_oracle(self, method, rng):
        m = make_mesh(1, ((0, TWO_PI),), (16,))
        sigma, kappa, tau = 0.5, 1.0, 0.1
        for _ in range(10):
            nu_vals = rng.uniform(-4.0, 4.0, m.shape)
            nu = RealField(m, nu_vals)
            op = StepOperator(m, sigma, kappa, tau, nu)
            rhs = random_complex_field(m, rng)
            dense = dense_step_matrix(m, sigma, kappa, tau, nu_vals)
            expect = np.linalg.solve(dense, rhs.values)
            w, report = solve(op, rhs, tol=1e-13, method=method)
            assert report.converged
            assert np.linalg.norm(w.values - expect) <= 1e-10 * np.linalg.norm(expect)

    def test_preconditioner_exactness(self, prop_mesh, rng):
        # potential-free systems are preconditioned to the identity
        op = StepOperator(prop_mesh, 0.5, 2.0, 0.2)
        for _ in range(5):
            rhs = random_complex_field(prop_mesh, rng)
            w, report = solve(op, rhs, tol=1e-12)
            assert report.converged and report.iterations <= 2

    def test_residual_contract_rechecked(self, prop_mesh, rng):
        tol = 1e-12
        for _ in range(10):
            nu = random_real_field(prop_mesh, rng)
            op = StepOperator(prop_mesh, 0.5, 1.0, 0.05, nu)
            rhs = random_complex_field(prop_mesh, rng)
            w, report = solve(op, rhs, tol=tol)
            resid = norm_l2(rhs - apply_step_operator(op, w)) / norm_l2(rhs)
            assert resid <= tol
            assert report.converged and report.residual <= tol

    def test_nonconvergence_raises(self, rng):
        m = MESHES["2d8"]
        nu = RealField(m, 50.0 * rng.standard_normal(m.shape))
        op = StepOperator(m, 0.5, 1.0, 1.0, nu)
        rhs = random_complex_field(m, rng)
        with pytest.raises(SolverError) as exc:
            solve(op, rhs, tol=1e-14, max_iter=1)
        assert isinstance(exc.value.report, SolveReport)
        assert not exc.value.report.converged

    def test_direct1d_rejects_2d(self, rng):
        op = StepOperator(MESHES["2d8"], 0.5, 1.0, 0.1)
        with pytest.raises(ValueError, match="1D"):
            solve(op, random_complex_field(MESHES["2d8"], rng), method="direct1d")

    def test_bad_tol(self):
        op = StepOperator(MESHES["1d8"], 0.5, 1.0, 0.1)
        with pytest.raises(ValueError, match="tol"):
            solve(op, Field.zeros(MESHES["1d8"]), tol=0.0)


class TestCayleyStep:
    def test_matches_explicit_rhs_path(self, rng):
        m = make_mesh(1, ((0, TWO_PI),), (32,))
        nu = random_real_field(m, rng)
        op = StepOperator(m, 0.5, 1.0, 0.05, nu)
        w = random_complex_field(m, rng)
        rhs = 2.0 * w - apply_step_operator(op, w)
        expect, _ = solve(op, rhs, tol=1e-13)
        for method in ("bicgstab", "direct1d"):
            got, rep = cayley_step(op, w, config=SolverConfig(method=method, tol=1e-13))
            assert np.allclose(got.values, expect.values, atol=1e-11)

    def test_linear_in_state(self, rng):
        # the frozen-potential step map is linear in the wavefield
        m = MESHES["2d8"]
        nu = random_real_field(m, rng)
        op = StepOperator(m, 0.5, 0.7, 0.02, nu)
        a, b = rng.normal() + 1j * rng.normal(), rng.normal()
        w1 = random_complex_field(m, rng)
        w2 = random_complex_field(m, rng)
        cfg = SolverConfig(tol=1e-13)
        lhs, _ = cayley_step(op, a * w1 + b * w2, config=cfg)
        r1, _ = cayley_step(op, w1, config=cfg)
        r2, _ = cayley_step(op, w2, config=cfg)
        rhs = a * r1 + b * r2
        scale = max(norm_l2(lhs), 1.0)
        assert norm_l2(lhs - rhs) <= 1e-10 * scale


class TestCayleyPropagator:
    def test_isometry(self, prop_mesh, rng):
        for _ in range(100):
            w = random_complex_field(prop_mesh, rng)
            out = cayley_propagator(w, kappa=1.3, tau=0.07)
            assert norm_l2(out) == pytest.approx(norm_l2(w), rel=1e-13)

    def test_constant_unchanged(self):
        m = MESHES["2d8"]
        c = Field(m, np.full(m.shape, 2.0 + 1.0j))
        out = cayley_propagator(c, kappa=1.0, tau=0.1)
        assert np.allclose(out.values, c.values, atol=1e-13)

    def test_zero_tau_identity(self, rng):
        m = MESHES["1d8"]
        w = random_complex_field(m, rng)
        out = cayley_propagator(w, kappa=1.0, tau=0.0)
        assert np.array_equal(out.values, w.values)


class TestSolverConfig:
    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError, match="method"):
            SolverConfig(method="cg")

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError, match="tol"):
            SolverConfig(tol=-1.0)
