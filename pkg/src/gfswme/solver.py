"""Numerical global fluxes, semidiscrete residual, and explicit time stepping."""

from dataclasses import dataclass, field

import numpy as np

from . import global_flux, kernels, mesh as meshmod, models, quadrature, weno
from .weno import WenoConfig, PositivityError


class DegenerateStateError(Exception):
    """All wave speeds vanished; the central flux dissipation is undefined."""


class NotFiniteError(Exception):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class StepLimitError(Exception):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    flux_kind: str = "central"           # "central" or "upwind"
    weno: WenoConfig = field(default_factory=WenoConfig)
    cfl: float = 0.4
    time_integrator: str = "ssprk3"      # "ssprk3" or "rk4"
    steady_residual_tol: float = 1e-14
    max_steps: int = 50_000_000

    def __post_init__(self):
        if self.flux_kind not in ("central", "upwind"):
            raise ValueError("flux_kind must be 'central' or 'upwind'")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if self.time_integrator not in ("ssprk3", "rk4"):
            raise ValueError("time_integrator must be 'ssprk3' or 'rk4'")


@dataclass
class RunResult:
    state: "meshmod.StateField"
    t: float
    steady: bool
    residual_history: np.ndarray
    n_steps: int


def numerical_flux_central(GL, GR, wL, wR, model, p):
    """Central global flux with matrix dissipation scaled by the spectral radius."""
    ws = models.PrimitiveState(
        h=0.5 * (wL.h + wR.h),
        u_m=0.5 * (wL.u_m + wR.u_m),
        alpha=tuple(0.5 * (np.array(wL.alpha) + np.array(wR.alpha))))
    lam = models.spectral_radius(model, ws, p)
    if lam <= 0.0:
        raise DegenerateStateError("spectral radius vanished at the interface state")
    A = models.system_matrix(model, ws, p)
    GL = np.asarray(GL, dtype=float)
    GR = np.asarray(GR, dtype=float)
    return 0.5 * (GL + GR) - A @ (GR - GL) / lam


def numerical_flux_upwind(GL, GR, wL, wR, model, p):
    """Characteristic upwind selection of the global flux."""
    if model not in models.EIGENSYSTEM_MODELS:
        raise models.CapabilityError(f"upwind flux needs a closed-form eigensystem; {model} has none")
    ws = models.PrimitiveState(
        h=0.5 * (wL.h + wR.h),
        u_m=0.5 * (wL.u_m + wR.u_m),
        alpha=tuple(0.5 * (np.array(wL.alpha) + np.array(wR.alpha))))
    L, lam = models.left_eigensystem(model, ws, p)
    GL = np.asarray(GL, dtype=float)
    GR = np.asarray(GR, dtype=float)
    w_char = np.where(lam >= 0.0, L @ GL, L @ GR)
    return np.linalg.solve(L, w_char)


class SchemeTables:
    """Precomputed arrays handed to the compiled kernels."""

    def __init__(self, model, mesh, scheme, params, bathy, bc):
        cfg = scheme.weno
        self.model = model
        self.mesh = mesh
        self.scheme = scheme
        self.params = params
        self.m = models.n_vars(model)
        if mesh.n_ghost < cfg.r:
            raise ValueError("mesh needs at least r ghost cells")
        if bc.is_periodic and mesh.n_ghost < 2 * cfg.r - 1:
            # exact wrap needs full-order reconstructions in every ghost cell
            raise ValueError(f"periodic runs need n_ghost >= {2 * cfg.r - 1} at order {cfg.order}")
        if scheme.flux_kind == "upwind" and model not in models.EIGENSYSTEM_MODELS:
            raise models.CapabilityError(
                f"upwind flux needs a closed-form eigensystem; {model} has none")
        self.table = quadrature.build_table(cfg.order, mesh.dx)
        self.bbar = bathy.cell_averages(mesh, self.table)
        tn = weno.point_tables(cfg.r, tuple(self.table.nodes))
        te = weno.point_tables(cfg.r, (-0.5, 0.5))
        self.nodal = tn
        self.edges = te
        mask_l, vals_l = (np.zeros(self.m, dtype=bool), np.zeros(self.m))
        mask_r, vals_r = (np.zeros(self.m, dtype=bool), np.zeros(self.m))
        if not bc.is_periodic:
            mask_l, vals_l = bc.left.prescribed(self.m)
            mask_r, vals_r = bc.right.prescribed(self.m)
        self.bc_args = (1 if bc.is_periodic else 0,
                        mask_l, vals_l, mask_r, vals_r)
        self.kernel_args = (
            mesh.dx, mesh.n_ghost, params.g, params.nu_over_lambda,
            params.lambda_slip, models.KERNEL_CODE[model],
            kernels.FLUX_UPWIND if scheme.flux_kind == "upwind" else kernels.FLUX_CENTRAL,
            self.table.weights, self.table.D, self.table.Rmat, self.table.Rfull,
            self.table.edge_left, self.table.edge_right,
            tn.cand, tn.d_pos, tn.d_neg, tn.sig_pos, tn.sig_neg,
            te.cand, te.d_pos, te.d_neg, te.sig_pos, te.sig_neg,
            cfg.epsilon, 1 if cfg.nodal_weights == "nonlinear" else 0,
        )


def _raise_kernel_error(err, idx, model=None):
    if err == kernels.ERR_POSITIVITY:
        raise PositivityError(f"reconstructed water height <= 0 in cell {idx}", cell=idx)
    if err == kernels.ERR_COMPLEX_EIG:
        raise models.HyperbolicityError(f"complex eigenvalues near cell {idx}")
    if err == kernels.ERR_ZERO_SPEED:
        raise DegenerateStateError(f"vanishing wave speed near cell {idx}")
    if err == kernels.ERR_NOT_FINITE:
        raise NotFiniteError(f"non-finite state in cell {idx}")


def semidiscrete_residual(state, model, p, bathy, scheme, mesh, bc, tables=None):
    """dU/dt of the interior cells for the current state (ghosts get filled)."""
    tables = tables or SchemeTables(model, mesh, scheme, p, bathy, bc)
    meshmod.fill_ghosts(state, bc)
    out = kernels.pipeline_nb(state.values, tables.bbar, *tables.kernel_args)
    err, idx = out[21], out[22]
    if err != kernels.ERR_OK:
        _raise_kernel_error(err, idx, model)
    return out[0]


def global_flux_layer(state, model, p, bathy, scheme, mesh, bc, tables=None):
    """Full pipeline diagnostics as a GlobalFluxLayer (kernel-backed)."""
    tables = tables or SchemeTables(model, mesh, scheme, p, bathy, bc)
    meshmod.fill_ghosts(state, bc)
    out = kernels.pipeline_nb(state.values, tables.bbar, *tables.kernel_args)
    err, idx = out[21], out[22]
    if err != kernels.ERR_OK:
        _raise_kernel_error(err, idx, model)
    (dUdt, Unod, eta_nod, b_nod, trL, trR, etaL, etaR, bL, bR,
     W, incr, jump, RstartL, RL, RR, Rnod, Gbar, GL, GR, Ghat, _, _) = out
    layer = global_flux.GlobalFluxLayer(
        W=W, incr=incr, jumps=jump, R_start=RstartL, R_left=RL, R_right=RR,
        R_nodes=Rnod, G_bar=Gbar, G_left=GL, G_right=GR)
    layer.G_hat = Ghat
    layer.dUdt = dUdt
    return layer


def max_wave_speed(state, model, p):
    lam, err, idx = kernels.max_wave_speed_nb(
        state.values, state.mesh.n_ghost, models.KERNEL_CODE[model], p.g)
    if err != kernels.ERR_OK:
        _raise_kernel_error(err, idx, model)
    return lam


def advance(state, t_end, model, p, bathy, scheme, mesh, bc, t0=0.0, tables=None):
    """Integrate to t_end with CFL-adaptive explicit steps.

    Stops early (and flags steady) once the Linf semidiscrete residual falls
    below scheme.steady_residual_tol.  The returned state is a new field;
    the input is not modified beyond its ghost cells.
    """
    tables = tables or SchemeTables(model, mesh, scheme, p, bathy, bc)
    U = state.values.copy()
    t = float(t0)
    residuals = []
    steady = False
    integrator = 0 if scheme.time_integrator == "ssprk3" else 1
    n_steps = 0
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        if n_steps >= scheme.max_steps:
            raise StepLimitError(f"exceeded max_steps={scheme.max_steps} at t={t}")
        lam, err, idx = kernels.max_wave_speed_nb(
            U, mesh.n_ghost, models.KERNEL_CODE[model], p.g)
        if err != kernels.ERR_OK:
            _raise_kernel_error(err, idx, model)
        if lam <= 0.0:
            raise DegenerateStateError("zero wave speed; cannot set a time step")
        dt = min(scheme.cfl * mesh.dx / lam, t_end - t)
        Unew, resid, err, idx = kernels.step_nb(
            U, tables.bbar, dt, integrator, *tables.kernel_args, *tables.bc_args)
        if err == kernels.ERR_NOT_FINITE:
            raise NotFiniteError(f"non-finite state at step {n_steps}", step=n_steps)
        if err != kernels.ERR_OK:
            _raise_kernel_error(err, idx, model)
        U = Unew
        t += dt
        n_steps += 1
        residuals.append(resid)
        if resid <= scheme.steady_residual_tol:
            steady = True
            break
    out = meshmod.StateField(mesh, U)
    return RunResult(state=out, t=t, steady=steady,
                     residual_history=np.asarray(residuals), n_steps=n_steps)


def advance_n_steps(state, n_steps, model, p, bathy, scheme, mesh, bc, tables=None):
    """Take exactly n_steps CFL-sized steps; no early exit, no time horizon."""
    tables = tables or SchemeTables(model, mesh, scheme, p, bathy, bc)
    U = state.values.copy()
    integrator = 0 if scheme.time_integrator == "ssprk3" else 1
    t = 0.0
    for k in range(n_steps):
        lam, err, idx = kernels.max_wave_speed_nb(
            U, mesh.n_ghost, models.KERNEL_CODE[model], p.g)
        if err != kernels.ERR_OK:
            _raise_kernel_error(err, idx, model)
        dt = scheme.cfl * mesh.dx / lam
        U, resid, err, idx = kernels.step_nb(
            U, tables.bbar, dt, integrator, *tables.kernel_args, *tables.bc_args)
        if err != kernels.ERR_OK:
            _raise_kernel_error(err, idx, model)
        t += dt
    return meshmod.StateField(mesh, U), t


def semidiscrete_residual_reference(state, model, p, bathy, scheme, mesh, bc):
    """Pure-numpy composition of the pipeline; the kernel's test oracle."""
    cfg = scheme.weno
    table = quadrature.build_table(cfg.order, mesh.dx)
    bbar = bathy.cell_averages(mesh, table)
    meshmod.fill_ghosts(state, bc)
    recon = weno.reconstruct_field(state.values, bbar, cfg, table)
    layer = global_flux.accumulate_R(recon, model, p, table)
    global_flux.cell_average_G(recon, layer, model, p, table)
    GLa, GRa = global_flux.reconstruct_G_interfaces(layer.G_bar, cfg, mesh.n_ghost)
    nif = mesh.n_cells + 1
    m = state.m
    Ghat = np.empty((nif, m))
    fluxfn = numerical_flux_central if scheme.flux_kind == "central" else numerical_flux_upwind
    for k in range(nif):
        jl = mesh.n_ghost - 1 + k
        wL = models.cons_to_prim(model, recon.trace_right[jl])
        wR = models.cons_to_prim(model, recon.trace_left[jl + 1])
        Ghat[k] = fluxfn(GLa[k], GRa[k], wL, wR, model, p)
    return -(Ghat[1:] - Ghat[:-1]) / mesh.dx
