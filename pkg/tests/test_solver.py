"""Numerical fluxes, semidiscrete residual, and time stepping."""

import numpy as np
import pytest

from gfswme import mesh as M, models, quadrature, solver, weno
from gfswme.models import PhysicalParams, PrimitiveState

from util import make_case, random_primitive, smooth_state


class TestCentralFlux:
    def test_consistency_on_random_states(self):
        rng = np.random.default_rng(3)
        for model in models.MODEL_IDS:
            p = PhysicalParams(g=9.812)
            for _ in range(200):
                w = random_primitive(rng, model, moment_scale=0.3)
                G = rng.standard_normal(models.n_vars(model))
                out = solver.numerical_flux_central(G, G, w, w, model, p)
                assert np.max(np.abs(out - G)) <= 1e-12 * max(1.0, np.max(np.abs(G)))

    def test_hand_evaluated_swe_value(self):
        # h*=1, u*=0, g=1: A = [[0,1],[1,0]], |lam|=1, so
        # Ghat = mean - A (GR - GL): worked by hand
        p = PhysicalParams(g=1.0)
        w = PrimitiveState(h=1.0, u_m=0.0)
        GL = np.array([1.0, 2.0])
        GR = np.array([3.0, 8.0])
        expect = np.array([0.5 * 4 - 6.0, 0.5 * 10 - 2.0])
        out = solver.numerical_flux_central(GL, GR, w, w, "swe", p)
        assert out == pytest.approx(expect, rel=1e-14)

    def test_degenerate_state_rejected(self, monkeypatch):
        # admissible states always have sqrt(g h) > 0; exercise the guard
        # by stubbing the spectral radius
        p = PhysicalParams(g=1.0)
        w = PrimitiveState(h=1.0, u_m=0.0, alpha=(0.0,))
        monkeypatch.setattr(models, "spectral_radius", lambda *a: 0.0)
        with pytest.raises(solver.DegenerateStateError):
            solver.numerical_flux_central(np.zeros(3), np.zeros(3), w, w, "swme1", p)


class TestUpwindFlux:
    def test_consistency_on_random_states(self):
        rng = np.random.default_rng(4)
        p = PhysicalParams(g=9.812)
        for model in ("swe", "swme1"):
            for _ in range(200):
                w = random_primitive(rng, model)
                G = rng.standard_normal(models.n_vars(model))
                out = solver.numerical_flux_upwind(G, G, w, w, model, p)
                assert np.max(np.abs(out - G)) <= 1e-12 * max(1.0, np.max(np.abs(G)))

    def test_full_upwinding_when_supercritical(self):
        p = PhysicalParams(g=9.812)
        w = PrimitiveState(h=2.0, u_m=12.0, alpha=(-0.25,))
        assert np.min(models.eigenvalues("swme1", w, p)) > 0
        GL = np.array([1.0, 2.0, 3.0])
        GR = np.array([-1.0, 5.0, 0.0])
        out = solver.numerical_flux_upwind(GL, GR, w, w, "swme1", p)
        assert out == pytest.approx(GL, rel=1e-12)

    def test_matches_projector_oracle(self):
        # independent route: numeric left eigenvectors of A from scipy
        rng = np.random.default_rng(8)
        p = PhysicalParams(g=9.812)
        for model in ("swe", "swme1"):
            for _ in range(100):
                wl = random_primitive(rng, model)
                wr = random_primitive(rng, model)
                m = models.n_vars(model)
                GL = rng.standard_normal(m)
                GR = rng.standard_normal(m)
                ws = PrimitiveState(h=0.5 * (wl.h + wr.h), u_m=0.5 * (wl.u_m + wr.u_m),
                                    alpha=tuple(0.5 * (np.array(wl.alpha) + np.array(wr.alpha))))
                A = models.system_matrix(model, ws, p)
                lam, V = np.linalg.eig(A.T)
                idx = np.argsort(lam.real)[::-1]
                L = V[:, idx].T.real
                w_char = np.where(lam.real[idx] >= 0, L @ GL, L @ GR)
                expect = np.linalg.solve(L, w_char)
                out = solver.numerical_flux_upwind(GL, GR, wl, wr, model, p)
                assert np.max(np.abs(out - expect)) <= 1e-9 * max(1.0, np.max(np.abs(expect)))

    def test_capability_error(self):
        p = PhysicalParams(g=9.812)
        w = PrimitiveState(h=1.0, u_m=0.0, alpha=(0.0, 0.0))
        with pytest.raises(models.CapabilityError):
            solver.numerical_flux_upwind(np.zeros(4), np.zeros(4), w, w, "swme2", p)

    def test_scheme_config_rejects_unsupported_model(self):
        mesh, p, scheme, bathy, bc, init = make_case("supercritical", model="swme2", N=16)
        bad = solver.SchemeConfig(flux_kind="upwind")
        with pytest.raises(models.CapabilityError):
            solver.SchemeTables("swme2", mesh, bad, p, bathy, bc)


class TestSemidiscreteResidual:
    @pytest.mark.parametrize("model", models.MODEL_IDS)
    @pytest.mark.parametrize("flux", ["central", "upwind"])
    @pytest.mark.parametrize("order", [1, 3, 5])
    def test_lake_at_rest_residual(self, model, flux, order):
        if flux == "upwind" and model not in models.EIGENSYSTEM_MODELS:
            pytest.skip("upwind needs a closed-form eigensystem")
        mesh, p, scheme, bathy, bc, init = make_case("lake_at_rest", model=model,
                                                     N=100, order=order, flux=flux)
        r = solver.semidiscrete_residual(init, model, p, bathy, scheme, mesh, bc)
        assert np.max(np.abs(r)) <= 1e-13

    def test_constant_state_flat_bottom(self):
        from gfswme import bathymetry
        mesh = M.Mesh(0.0, 25.0, 50)
        p = PhysicalParams(g=9.812)
        scheme = solver.SchemeConfig()
        bc = M.BoundarySpec.transmissive()
        U = np.tile([2.0, 3.0, 0.4], (mesh.n_total, 1))
        st = M.StateField(mesh, U)
        r = solver.semidiscrete_residual(st, "swme1", p, bathymetry.flat(), scheme, mesh, bc)
        assert np.max(np.abs(r)) <= 1e-12

    def test_positivity_error_carries_cell(self):
        mesh, p, scheme, bathy, bc, init = make_case("lake_at_rest", N=50)
        init.values[:, 0] = 1e-3 - bathy.cell_averages(mesh, quadrature.build_table(5, mesh.dx))
        with pytest.raises(weno.PositivityError) as err:
            solver.semidiscrete_residual(init, "swme1", p, bathy, scheme, mesh, bc)
        assert err.value.cell is not None


class TestAdvance:
    def test_zero_horizon_returns_input(self):
        mesh, p, scheme, bathy, bc, init = make_case("lake_at_rest", N=50)
        res = solver.advance(init.copy(), 0.0, "swme1", p, bathy, scheme, mesh, bc)
        assert res.n_steps == 0
        assert res.t == 0.0
        assert np.array_equal(res.state.interior, init.interior)

    def test_lake_at_rest_flags_steady_immediately(self):
        mesh, p, scheme, bathy, bc, init = make_case("lake_at_rest", N=100)
        res = solver.advance(init.copy(), 1.0, "swme1", p, bathy, scheme, mesh, bc)
        assert res.steady
        assert res.n_steps == 1
        assert res.residual_history[-1] <= scheme.steady_residual_tol

    def test_max_steps_guard(self):
        from dataclasses import replace
        mesh, p, scheme, bathy, bc, init = make_case("supercritical", N=50)
        scheme = replace(scheme, max_steps=2)
        with pytest.raises(solver.StepLimitError):
            solver.advance(init.copy(), 50.0, "swme1", p, bathy, scheme, mesh, bc)

    def test_nan_detection(self):
        mesh, p, scheme, bathy, bc, init = make_case("supercritical", N=50)
        bad = init.copy()
        bad.values[mesh.n_ghost + 10, 1] = np.nan
        with pytest.raises(solver.NotFiniteError):
            solver.advance(bad, 1.0, "swme1", p, bathy, scheme, mesh, bc)

    @pytest.mark.parametrize("integrator", ["ssprk3", "rk4"])
    def test_periodic_mass_conservation(self, integrator):
        # flat bottom, no friction: the mass flux is periodic and the total
        # water volume is conserved to round-off each step
        from gfswme import bathymetry
        mesh = M.Mesh(0.0, 25.0, 64, n_ghost=5)
        p = PhysicalParams(g=9.812)
        scheme = solver.SchemeConfig(time_integrator=integrator,
                                     steady_residual_tol=0.0)
        bc = M.BoundarySpec.periodic()
        table = quadrature.build_table(5, mesh.dx)
        st = smooth_state(mesh, "swme1", table)
        flat = bathymetry.flat()
        mass = [np.sum(st.interior[:, 0]) * mesh.dx]
        state = st
        t = 0.0
        for _ in range(40):
            res = solver.advance(state, t + 0.01, "swme1", p, flat, scheme, mesh, bc, t0=t)
            state, t = res.state, res.t
            mass.append(np.sum(state.interior[:, 0]) * mesh.dx)
        drift = np.max(np.abs(np.diff(mass)))
        assert drift <= 1e-12 * mass[0]

    def test_periodic_mass_conservation_swe_upwind(self):
        from gfswme import bathymetry
        mesh = M.Mesh(0.0, 25.0, 64, n_ghost=5)
        p = PhysicalParams(g=9.812)
        scheme = solver.SchemeConfig(flux_kind="upwind", steady_residual_tol=0.0)
        bc = M.BoundarySpec.periodic()
        table = quadrature.build_table(5, mesh.dx)
        st = smooth_state(mesh, "swe", table)
        flat = bathymetry.flat()
        m0 = np.sum(st.interior[:, 0]) * mesh.dx
        res = solver.advance(st, 0.5, "swe", p, flat, scheme, mesh, bc)
        m1 = np.sum(res.state.interior[:, 0]) * mesh.dx
        assert abs(m1 - m0) <= 1e-12 * m0 * res.n_steps

    def test_cfl_monotone_residual(self):
        # halving the CFL never worsens the residual on this smooth transient
        finals = {}
        for cfl in (0.4, 0.2):
            mesh, p, scheme, bathy, bc, init = make_case("supercritical", N=50, cfl=cfl)
            res = solver.advance(init.copy(), 5.0, "swme1", p, bathy, scheme, mesh, bc)
            r = solver.semidiscrete_residual(res.state, "swme1", p, bathy, scheme, mesh, bc)
            finals[cfl] = np.max(np.abs(r))
        assert finals[0.2] <= finals[0.4] * (1 + 1e-9)

    def test_rk4_reaches_same_steady_state(self):
        results = {}
        for integ in ("ssprk3", "rk4"):
            mesh, p, scheme, bathy, bc, init = make_case("supercritical", N=50)
            from dataclasses import replace
            scheme = replace(scheme, time_integrator=integ)
            res = solver.advance(init.copy(), 50.0, "swme1", p, bathy, scheme, mesh, bc)
            results[integ] = res.state.interior
        assert np.max(np.abs(results["ssprk3"] - results["rk4"])) <= 1e-9


class TestSteadyInterfaceFluxes:
    def test_converged_state_has_matching_G_traces(self):
        mesh, p, scheme, bathy, bc, init = make_case("supercritical", N=100)
        res = solver.advance(init.copy(), 50.0, "swme1", p, bathy, scheme, mesh, bc)
        layer = solver.global_flux_layer(res.state, "swme1", p, bathy, scheme, mesh, bc)
        gap = np.max(np.abs(layer.G_right - layer.G_left))
        assert gap <= 1e-11 * max(1.0, np.max(np.abs(layer.G_left)))
        assert np.max(np.abs(layer.dUdt)) <= 1e-11
