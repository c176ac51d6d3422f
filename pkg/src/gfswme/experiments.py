"""Scenario catalogue, convergence/perturbation/eigenvalue runners, CSV emission."""

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import bathymetry, figures, mesh as meshmod, models, quadrature, solver, steady
from .mesh import BoundarySpec, SideCondition, StateField
from .weno import WenoConfig

SCENARIOS = ("lake_at_rest", "lar_perturbation", "supercritical", "subcritical",
             "supercritical_friction", "perturbation_comparison", "eigenvalue_report",
             "custom")

SNAPSHOTS_LAR = (0.0, 0.66, 1.33, 2.0)
SNAPSHOTS_SUPER = (0.225, 0.45, 0.675, 0.9)
COMPARE_MODELS = ("swme1", "swlme2", "hswme2", "swme2")

# early-exit residual threshold; the round-off floor of the g~10 scenarios
# sits above 1e-14, so those runs integrate to the scenario's full t_end
STEADY_TOL_DEFAULT = 1e-14


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "supercritical"
    model: str = "swme1"
    compare_models: tuple = COMPARE_MODELS
    order: int = 5
    flux: str = "central"
    n_cells: int = 100
    mesh_sizes: tuple = (100, 200, 400, 600, 800)
    g: float = None
    nu: float = 0.05
    lambda_slip: float = 1.0
    friction: bool = None
    t_end: float = None
    cfl: float = 0.4
    time_integrator: str = "ssprk3"
    nodal_weights: str = "linear"
    steady_tol: float = None
    perturb_amplitude: float = None
    perturb_center: float = 9.5
    perturb_width_factor: float = 4.0
    snapshot_times: tuple = None
    bathymetry: str = "bump"
    eta0: float = 1.0
    x_sample: float = 23.0
    out_dir: str = "out"
    init_csv: str = None
    equilibrium_csv: str = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if tuple(self.mesh_sizes) != tuple(sorted(self.mesh_sizes)):
            raise ValueError("mesh_sizes must be ascending")


@dataclass
class Case:
    """One resolved scenario instance: model, mesh, physics, and initial data."""
    cfg: ExperimentConfig
    model: str
    mesh: meshmod.Mesh
    params: models.PhysicalParams
    scheme: solver.SchemeConfig
    bathy: bathymetry.BathymetryField
    bc: BoundarySpec
    init: StateField
    t_end: float
    table: quadrature.QuadratureTable


_PRESET = {
    # scenario: (g, friction, t_end, amplitude, snapshots)
    "lake_at_rest": (1.0, True, 1.0, None, None),
    "lar_perturbation": (9.8, True, 2.0, 0.1, SNAPSHOTS_LAR),
    "supercritical": (9.812, False, 50.0, None, SNAPSHOTS_SUPER),
    "subcritical": (9.812, False, 400.0, None, SNAPSHOTS_SUPER),
    "supercritical_friction": (9.812, True, 50.0, None, SNAPSHOTS_SUPER),
    "perturbation_comparison": (9.812, True, 50.0, 1e-3, SNAPSHOTS_SUPER),
    "eigenvalue_report": (9.812, True, 50.0, None, None),
    "custom": (9.812, False, 1.0, None, None),
}


def _inflow_values(model):
    """Supercritical inflow data: h, hu_m (, h alpha_1, h alpha_2)."""
    return (2.0, 24.0, -0.5, -0.2)[:models.n_vars(model)]


def resolve_case(cfg, model=None, n_cells=None):
    """Fill in the scenario presets and build mesh, BCs, and initial data."""
    model = model or cfg.model
    models.check_model(model)
    n = n_cells or cfg.n_cells
    g0, fric0, t0, _, _ = _PRESET[cfg.scenario]
    g = cfg.g if cfg.g is not None else g0
    friction = cfg.friction if cfg.friction is not None else fric0
    t_end = cfg.t_end if cfg.t_end is not None else t0
    tol = cfg.steady_tol if cfg.steady_tol is not None else STEADY_TOL_DEFAULT

    mesh = meshmod.Mesh(0.0, 25.0, n)
    params = models.PhysicalParams(g=g, nu=cfg.nu, lambda_slip=cfg.lambda_slip,
                                   friction_enabled=friction)
    scheme = solver.SchemeConfig(
        flux_kind=cfg.flux,
        weno=WenoConfig(order=cfg.order, nodal_weights=cfg.nodal_weights),
        cfl=cfg.cfl, time_integrator=cfg.time_integrator, steady_residual_tol=tol)
    bathy = bathymetry.from_name(cfg.bathymetry)
    table = quadrature.build_table(cfg.order, mesh.dx)
    m = models.n_vars(model)
    bbar = bathy.cell_averages(mesh, table)

    scen = cfg.scenario
    if scen in ("lake_at_rest", "lar_perturbation"):
        init = steady.lake_at_rest(mesh, bathy, cfg.eta0, model, table=table)
        presc = (0.0,) * (m - 1)
        bc = BoundarySpec(SideCondition("subcritical_inlet", presc),
                          SideCondition("subcritical_outlet", (cfg.eta0,)))
    elif scen == "subcritical":
        U = np.zeros((mesh.n_total, m))
        U[:, 0] = 2.0 - bbar
        if m > 2:
            U[:, 2] = 0.1
        init = StateField(mesh, U)
        bc = BoundarySpec(SideCondition("subcritical_inlet", (4.42,) + (0.1, 0.0)[:m - 2]),
                          SideCondition("subcritical_outlet", (2.0,)))
    elif scen == "custom":
        if cfg.init_csv is None:
            raise ValueError("scenario 'custom' needs init_csv")
        init = load_state_csv(cfg.init_csv, mesh, m)
        bc = BoundarySpec.transmissive()
    else:
        # supercritical family (with or without friction)
        vals = _inflow_values(model)
        U = np.zeros((mesh.n_total, m))
        U[:, 0] = 2.0 - bbar
        if m > 2:
            U[:, 2] = vals[2]
        if m > 3:
            U[:, 3] = vals[3]
        init = StateField(mesh, U)
        bc = BoundarySpec(SideCondition("supercritical_inflow", vals),
                          SideCondition("transmissive"))
    return Case(cfg=cfg, model=model, mesh=mesh, params=params, scheme=scheme,
                bathy=bathy, bc=bc, init=init, t_end=t_end, table=table)


_steady_cache = {}


def steady_state(cfg, model=None, n_cells=None):
    """Advance the scenario to its (discrete) steady state, with caching."""
    case = resolve_case(cfg, model=model, n_cells=n_cells)
    key = (cfg.scenario, case.model, case.mesh.n_cells, cfg.order, cfg.flux,
           cfg.nodal_weights, case.params, case.t_end, cfg.cfl, cfg.time_integrator,
           case.scheme.steady_residual_tol, cfg.bathymetry, cfg.eta0)
    if key not in _steady_cache:
        result = solver.advance(case.init.copy(), case.t_end, case.model, case.params,
                                case.bathy, case.scheme, case.mesh, case.bc)
        _steady_cache[key] = result
    return case, _steady_cache[key]


def reference_profile(cfg, case):
    """Analytic steady reference for scenarios that have one."""
    g = case.params.g
    b_at = case.bathy
    if cfg.scenario in ("lake_at_rest", "lar_perturbation"):
        return case.init.copy()
    if cfg.scenario == "supercritical":
        consts = steady.EquilibriumConstants(C0=24.0, C1=(-0.5 / 2.0) / 2.0,
                                             h_ref=2.0, b_ref=float(b_at(0.0)), g=g)
        return steady.swme1_exact_profile(case.mesh, b_at, consts, "supercritical",
                                          table=case.table)
    if cfg.scenario == "subcritical":
        consts = steady.EquilibriumConstants(C0=4.42, C1=(0.1 / 2.0) / 2.0,
                                             h_ref=2.0, b_ref=float(b_at(25.0)), g=g)
        return steady.swme1_exact_profile(case.mesh, b_at, consts, "subcritical",
                                          table=case.table)
    raise ValueError(f"no analytic reference for scenario {cfg.scenario!r}")


def run_convergence(cfg, emit=True):
    """Error table over cfg.mesh_sizes against the analytic steady reference.

    Returns rows of (N, errors (m,), eoas (m,) with None in the first row
    and at noise-floor entries).
    """
    if cfg.scenario not in ("lake_at_rest", "supercritical", "subcritical"):
        raise ValueError("run_convergence needs a scenario with an analytic reference")
    rows = []
    prev = None
    for N in cfg.mesh_sizes:
        case, result = steady_state(cfg, n_cells=N)
        ref = reference_profile(cfg, case)
        err = meshmod.l2_error(result.state, ref, case.mesh)
        if not result.steady and result.t < case.t_end * (1.0 - 1e-12):
            raise RuntimeError(f"run at N={N} ended early without reaching steadiness")
        eoas = [None] * err.size
        if prev is not None:
            ratio = N / prev[0]
            eoas = [meshmod.estimated_order(pe, e, ratio) for pe, e in zip(prev[1], err)]
        rows.append((N, err, eoas))
        prev = (N, err)
    if emit:
        emit_convergence(cfg, rows)
    return rows


def _bump_profile(cfg):
    A = cfg.perturb_amplitude
    c = cfg.perturb_center
    wf = cfg.perturb_width_factor

    def bump(x):
        r = wf * (np.asarray(x, dtype=float) - c) ** 2
        out = np.zeros_like(r)
        inside = r < 1.0
        out[inside] = A * np.exp(1.0 - 1.0 / (1.0 - r[inside]) ** 2)
        return out
    return bump


def equilibrium_for_perturbation(cfg, model=None):
    """Converged background state: computed, loaded, or the exact rest state."""
    case = resolve_case(cfg, model=model)
    if cfg.equilibrium_csv is not None:
        eq = load_state_csv(cfg.equilibrium_csv, case.mesh, models.n_vars(case.model))
    elif cfg.scenario in ("lake_at_rest", "lar_perturbation"):
        eq = case.init.copy()
    else:
        _, result = steady_state(cfg, model=model)
        eq = result.state.copy()
    return case, eq


def run_perturbation(cfg, model=None, emit=True):
    """Evolve a compact water-height bump on top of a converged equilibrium.

    Returns (case, equilibrium, snapshots) with snapshots a list of
    (time, deviation-array) over the interior cells.
    """
    if cfg.perturb_amplitude is None:
        raise ValueError("perturb_amplitude is not set")
    case, eq = equilibrium_for_perturbation(cfg, model=model)
    resid = np.abs(solver.semidiscrete_residual(
        eq.copy(), case.model, case.params, case.bathy, case.scheme, case.mesh, case.bc)).max()
    if resid > 1e-8:
        raise RuntimeError(f"equilibrium is not steady (residual {resid:.2e})")
    times = tuple(cfg.snapshot_times or _PRESET[cfg.scenario][4] or SNAPSHOTS_SUPER)

    bump = _bump_profile(cfg)
    xc = case.mesh.centers(with_ghosts=True)
    nodes = xc[:, None] + case.table.nodes[None, :] * case.mesh.dx
    dh = bump(nodes) @ case.table.weights

    state = eq.copy()
    state.values[:, 0] += dh
    snapshots = []
    t = 0.0
    if times[0] == 0.0:
        snapshots.append((0.0, state.interior - eq.interior))
    for tk in times:
        if tk <= t:
            continue
        result = solver.advance(state, tk, case.model, case.params, case.bathy,
                                replace(case.scheme, steady_residual_tol=0.0),
                                case.mesh, case.bc, t0=t)
        state, t = result.state, result.t
        snapshots.append((tk, state.interior - eq.interior))
    if emit:
        emit_perturbation(cfg, case, eq, snapshots)
    return case, eq, snapshots


def run_compare(cfg, emit=True):
    """Perturbation evolution for several models on one mesh."""
    out = {}
    for model in cfg.compare_models:
        out[model] = run_perturbation(cfg, model=model, emit=False)
    if emit:
        emit_comparison(cfg, out)
    return out


def eigen_row(model, w, params):
    """Table row of descending eigenvalues, padded with None like the report."""
    lam = models.eigenvalues(model, w, params)
    if model == "swme1":
        return (lam[0], lam[1], None, lam[2])
    if model == "swlme2":
        return (lam[0], lam[1], None, lam[3])
    return tuple(lam)


def run_eigen_report(cfg, emit=True):
    """Eigenvalues of all comparison models at the x_sample station."""
    rows = []
    for model in cfg.compare_models:
        case, result = steady_state(cfg, model=model)
        i = int(np.argmin(np.abs(case.mesh.centers() - cfg.x_sample)))
        w = models.cons_to_prim(model, result.state.interior[i])
        try:
            lams = eigen_row(model, w, case.params)
        except models.HyperbolicityError:
            lams = ("hyperbolicity lost",) * 4
        rows.append((model, case.mesh.centers()[i], w, lams))
    if emit:
        emit_eigen_report(cfg, rows)
    return rows


def run_single(cfg, emit=True):
    """One steady (or perturbed) run on cfg.n_cells; emits solution files."""
    if cfg.perturb_amplitude is not None:
        return run_perturbation(cfg, emit=emit)
    case, result = steady_state(cfg)
    if emit:
        emit_solution(cfg, case, result.state, tag=f"{cfg.scenario}_{case.model}")
        figures.steady_profile(
            os.path.join(cfg.out_dir, f"profile_{cfg.scenario}_{case.model}.png"),
            case, result.state)
    return case, result


# ---------------------------------------------------------------------------
# file emission: comma-separated, 17 significant digits, LF line endings
# ---------------------------------------------------------------------------

def _fmt(v):
    return "--" if v is None else format(float(v), ".17g")


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def solution_columns(model):
    nm = models.n_moments(model)
    cols = ["x", "b", "h", "eta", "u_m"]
    cols += [f"alpha_{k+1}" for k in range(nm)]
    cols += ["hu"]
    cols += [f"halpha_{k+1}" for k in range(nm)]
    return cols


def emit_solution(cfg, case, state, tag):
    x = case.mesh.centers()
    b = np.asarray(case.bathy(x), dtype=float)
    U = state.interior
    h = U[:, 0]
    nm = models.n_moments(case.model)
    row_data = [x, b, h, h + b, U[:, 1] / h]
    row_data += [U[:, 2 + k] / h for k in range(nm)]
    row_data += [U[:, 1]]
    row_data += [U[:, 2 + k] for k in range(nm)]
    rows = np.column_stack(row_data)
    return write_csv(os.path.join(cfg.out_dir, f"solution_{tag}_N{case.mesh.n_cells}.csv"),
                     solution_columns(case.model), rows)


def load_state_csv(path, mesh, m):
    """Rebuild a StateField from a solution CSV written by emit_solution."""
    with open(path) as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",")
    if data.shape[0] != mesh.n_cells:
        raise ValueError(f"{path} has {data.shape[0]} rows, mesh needs {mesh.n_cells}")
    col = {name: k for k, name in enumerate(header)}
    U = np.zeros((mesh.n_total, m))
    U[mesh.interior, 0] = data[:, col["h"]]
    U[mesh.interior, 1] = data[:, col["hu"]]
    for k in range(m - 2):
        U[mesh.interior, 2 + k] = data[:, col[f"halpha_{k+1}"]]
    return StateField(mesh, U)


def convergence_columns(model):
    nm = models.n_moments(model)
    cols = ["N_e", "err_h", "eoa_h", "err_hu", "eoa_hu"]
    for k in range(nm):
        cols += [f"err_ha{k+1}", f"eoa_ha{k+1}"]
    return cols


def emit_convergence(cfg, rows):
    out = []
    for N, err, eoas in rows:
        row = [N]
        for e, o in zip(err, eoas):
            row += [e, o]
        out.append(row)
    path = write_csv(
        os.path.join(cfg.out_dir,
                     f"convergence_{cfg.scenario}_{cfg.model}_w{cfg.order}_{cfg.flux}.csv"),
        convergence_columns(cfg.model), out)
    figures.convergence_plot(
        os.path.join(cfg.out_dir,
                     f"convergence_{cfg.scenario}_{cfg.model}_w{cfg.order}_{cfg.flux}.png"),
        cfg, rows)
    return path


def emit_perturbation(cfg, case, eq, snapshots):
    x = case.mesh.centers()
    nm = models.n_moments(case.model)
    header = ["x", "dev_h", "dev_hu"] + [f"dev_ha{k+1}" for k in range(nm)]
    for t, dev in snapshots:
        rows = np.column_stack([x] + [dev[:, c] for c in range(dev.shape[1])])
        write_csv(os.path.join(cfg.out_dir,
                               f"perturbation_{cfg.scenario}_{case.model}_N{case.mesh.n_cells}_t{t:g}.csv"),
                  header, rows)
    figures.deviation_snapshots(
        os.path.join(cfg.out_dir,
                     f"perturbation_{cfg.scenario}_{case.model}_N{case.mesh.n_cells}.png"),
        case, snapshots)


def emit_comparison(cfg, results):
    for model, (case, eq, snapshots) in results.items():
        x = case.mesh.centers()
        nm = models.n_moments(model)
        header = ["x", "dev_h", "dev_hu"] + [f"dev_ha{k+1}" for k in range(nm)]
        for t, dev in snapshots:
            rows = np.column_stack([x] + [dev[:, c] for c in range(dev.shape[1])])
            write_csv(os.path.join(cfg.out_dir,
                                   f"compare_{model}_N{case.mesh.n_cells}_t{t:g}.csv"),
                      header, rows)
    figures.comparison_snapshots(
        os.path.join(cfg.out_dir, f"compare_N{next(iter(results.values()))[0].mesh.n_cells}.png"),
        results)


def emit_eigen_report(cfg, rows):
    header = ["model", "x", "h", "u_m", "alpha_1", "alpha_2",
              "lambda_1", "lambda_2", "lambda_3", "lambda_4"]
    path = os.path.join(cfg.out_dir, "eigenvalues.csv")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for (model, x, w, lams) in rows:
            cells = [model, _fmt(x), _fmt(w.h), _fmt(w.u_m), _fmt(w.a1), _fmt(w.a2)]
            cells += [v if isinstance(v, str) else _fmt(v) for v in lams]
            f.write(",".join(cells) + "\n")
    return path
