"""Invariant and error-norm diagnostics."""

import numpy as np
import pytest

from cnls.diagnostics import (
    energy,
    energy_reduced_initial,
    error_norms,
    mass,
    relaxation_mass,
)
from cnls.linsolve import SolverConfig
from cnls.mesh import Field, RealField, TimeGrid, make_mesh, sample
from cnls.stepper import RelaxState, SchemeParams, relax_update, run

from conftest import MESHES, random_complex_field

TWO_PI = 2.0 * np.pi
TIGHT = SolverConfig(tol=1e-13)


def _state(mesh, U, V, Phi, Psi, n=0):
    return RelaxState(n, U, V, Phi, Psi)


def _smooth_run(T=0.1, N=10, M=32):
    mesh = make_mesh(1, ((0, TWO_PI),), (M,))
    params = SchemeParams(0.7, 1.3)
    states = []
    run(lambda x: np.exp(1j * x) * np.exp(-np.cos(x)),
        lambda x: 0.5 * np.exp(-np.sin(x)) + 0.0j,
        params, mesh, TimeGrid(T=T, N=N), solver=TIGHT,
        observer=lambda st, t: states.append(st))
    return mesh, params, states


class TestMass:
    def test_constant_field(self):
        mesh = make_mesh(2, ((-10, 10), (-10, 10)), (50, 50))
        U = Field(mesh, np.full(mesh.shape, 0.5))
        st = _state(mesh, U, Field.zeros(mesh), U.abs2(), RealField.zeros(mesh))
        m_u, m_v = mass(st)
        assert m_u == pytest.approx(100.0, rel=1e-13)
        assert m_v == 0.0

    def test_zero_field(self):
        mesh = MESHES["2d8"]
        st = _state(mesh, Field.zeros(mesh), Field.zeros(mesh),
                    RealField.zeros(mesh), RealField.zeros(mesh))
        assert mass(st) == (0.0, 0.0)

    def test_gaussian_matches_quadrature(self):
        # continuum integral of 0.25 exp(-2(x^2+y^2)) is pi/8; the periodic
        # trapezoid rule on the fast-decaying tail is exact to roundoff
        from cnls.cases import gaussian_conservation_2d

        case = gaussian_conservation_2d()
        mesh = case.make_mesh()
        U = sample(mesh, case.u0).to_complex()
        st = _state(mesh, U, Field.zeros(mesh), U.abs2(), RealField.zeros(mesh))
        m_u, _ = mass(st)
        assert m_u == pytest.approx(np.pi / 8.0, rel=1e-14)
        assert m_u == pytest.approx(3.9269908169872425e-01, rel=1e-15)


class TestRelaxationMass:
    def test_initial_constant(self):
        mesh = MESHES["2d8"]
        st = _state(mesh, Field.zeros(mesh), Field.zeros(mesh),
                    RealField(mesh, np.ones(mesh.shape)), RealField.zeros(mesh))
        r_u, r_v = relaxation_mass(st)
        assert r_u == pytest.approx(4 * np.pi**2, rel=1e-13)
        assert r_v == 0.0

    def test_equals_node_mass_along_run(self):
        mesh, params, states = _smooth_run()
        for st in states[1:-1]:
            phi_next, psi_next = relax_update(st)
            r_u, r_v = relaxation_mass(st, phi_next, psi_next)
            m_u, m_v = mass(st)
            assert r_u == pytest.approx(m_u, rel=1e-13)
            assert r_v == pytest.approx(m_v, rel=1e-13)

    def test_rejected_at_final_node(self):
        mesh, params, states = _smooth_run()
        final = states[-1]
        phi_next, psi_next = relax_update(final)
        with pytest.raises(ValueError, match="final"):
            relaxation_mass(final, phi_next, psi_next, n_final=final.n)

    def test_needs_next_half_level(self):
        mesh, params, states = _smooth_run()
        with pytest.raises(ValueError, match="half"):
            relaxation_mass(states[2])


class TestEnergy:
    def test_all_zero(self):
        mesh = MESHES["2d8"]
        z = _state(mesh, Field.zeros(mesh), Field.zeros(mesh),
                   RealField.zeros(mesh), RealField.zeros(mesh))
        e = energy(z, SchemeParams(1.0, 1.0), "initial",
                   phi_half=RealField.zeros(mesh), psi_half=RealField.zeros(mesh))
        assert e == 0.0

    def test_initial_branch_arithmetic(self):
        # kappa=0, U=1, V=0, Phi_half=Phi0=1 on (0,2pi)^2: E = -1/2 (1,1)
        mesh = make_mesh(2, ((0, TWO_PI), (0, TWO_PI)), (8, 8))
        ones = RealField(mesh, np.ones(mesh.shape))
        st = _state(mesh, Field(mesh, np.ones(mesh.shape)), Field.zeros(mesh),
                    ones, RealField.zeros(mesh))
        e = energy(st, SchemeParams(kappa=0.0, beta=3.0), "initial",
                   phi_half=ones, psi_half=RealField.zeros(mesh))
        assert e == pytest.approx(-2 * np.pi**2, rel=1e-13)

    def test_reduced_initial_arithmetic(self):
        mesh = make_mesh(2, ((0, TWO_PI), (0, TWO_PI)), (8, 8))
        one = Field(mesh, np.ones(mesh.shape))
        st = _state(mesh, one, one.copy(), one.abs2(), one.abs2())
        e = energy_reduced_initial(st, SchemeParams(kappa=0.0, beta=1.0))
        assert e == pytest.approx(-8 * np.pi**2, rel=1e-13)

    def test_reduced_equals_initial_branch_when_collapsed(self, rng):
        mesh = MESHES["2d8"]
        U = random_complex_field(mesh, rng)
        V = random_complex_field(mesh, rng)
        st = _state(mesh, U, V, U.abs2(), V.abs2())
        params = SchemeParams(0.6, 1.4)
        via_branch = energy(st, params, "initial", phi_half=U.abs2(), psi_half=V.abs2())
        assert energy_reduced_initial(st, params) == pytest.approx(via_branch, rel=1e-12)

    def test_interior_branch_conserved_along_run(self):
        mesh, params, states = _smooth_run(T=0.2, N=20)
        e0 = energy(states[0], params, "initial",
                    phi_half=states[1].Phi, psi_half=states[1].Psi)
        interior = [energy(st, params, "interior") for st in states[1:-1]]
        e_final = energy(states[-1], params, "final")
        for e in interior + [e_final]:
            assert e == pytest.approx(e0, rel=1e-11)

    def test_branch_requirements(self):
        mesh, params, states = _smooth_run()
        with pytest.raises(ValueError, match="n=0"):
            energy(states[2], params, "initial",
                   phi_half=states[1].Phi, psi_half=states[1].Psi)
        with pytest.raises(ValueError, match="half"):
            energy(states[0], params, "initial")
        with pytest.raises(ValueError, match="n >= 1"):
            energy(states[0], params, "interior")
        with pytest.raises(ValueError, match="branch"):
            energy(states[1], params, "afterward")


class TestErrorNorms:
    def test_exact_state_has_zero_errors(self):
        from cnls.cases import manufactured_2d

        case = manufactured_2d()
        mesh = case.make_mesh((8, 8))
        tau = 1.0 / 64
        T = 1.0
        U = sample(mesh, lambda x, y: case.exact_u(x, y, T)).to_complex()
        V = sample(mesh, lambda x, y: case.exact_v(x, y, T)).to_complex()
        # stationary squared moduli: the stored half level equals |u|^2
        st = RelaxState(64, U, V, U.abs2(), V.abs2())
        rec = error_norms(st, case.exact_u, case.exact_v,
                          case.exact_phi, case.exact_psi, t_node=T, tau=tau)
        for val in (rec.err_u_l2, rec.err_u_h1, rec.err_v_l2,
                    rec.err_v_h1, rec.err_phi_l2, rec.err_psi_l2):
            assert val <= 1e-13

    def test_matches_published_coarse_values(self):
        from cnls.cases import manufactured_2d
        from cnls.harness import StudyPlan, convergence_study

        plan = StudyPlan(case=manufactured_2d(), ladder=(8, 16), order_floor=None)
        recs = convergence_study(plan)
        assert recs[0].err_u_l2 == pytest.approx(1.1791e-02, rel=1e-2)
        assert recs[0].err_u_h1 == pytest.approx(1.9367e-02, rel=1e-2)
        assert recs[0].err_phi_l2 == pytest.approx(1.5688e-02, rel=1e-2)
        assert recs[1].err_psi_l2 == pytest.approx(1.9866e-04, rel=1e-2)
