"""Acceptance suite: one test per criterion, printing a PASS/FAIL line each.

Runs the full steady-state sweeps of the benchmark campaign; expect roughly
an hour on one core.  Steady states are cached and shared across criteria
within the session.
"""

import numpy as np
import pytest
from scipy.signal import find_peaks

from gfswme import experiments, mesh as M, models, solver, steady
from gfswme.experiments import ExperimentConfig

MESHES = (100, 200, 400, 600, 800)

# published L2 errors of h for the supercritical steady state
PAPER_SUPER_H = {
    ("upwind", 1): {100: 8.424e-06, 200: 2.133e-06, 400: 5.321e-07, 600: 2.364e-07, 800: 1.329e-07},
    ("upwind", 3): {100: 5.616e-08, 200: 1.660e-08, 400: 2.058e-09, 600: 5.990e-10, 800: 2.680e-10},
    ("upwind", 5): {100: 8.482e-09, 200: 2.666e-10, 400: 1.007e-11, 600: 1.100e-12, 800: 2.147e-13},
    ("central", 1): {100: 8.424e-06, 200: 2.133e-06, 400: 5.321e-07, 600: 2.364e-07, 800: 1.329e-07},
    ("central", 3): {100: 5.620e-08, 200: 1.662e-08, 400: 2.059e-09, 600: 5.992e-10, 800: 2.681e-10},
    ("central", 5): {100: 8.479e-09, 200: 2.665e-10, 400: 1.007e-11, 600: 1.102e-12, 800: 2.061e-13},
}

# published L2 errors of h for the subcritical steady state
PAPER_SUB_H = {
    ("upwind", 1): {100: 7.195e-05, 200: 1.825e-05, 400: 4.552e-06, 600: 2.022e-06, 800: 1.137e-06},
    ("upwind", 3): {100: 9.071e-07, 200: 1.208e-07, 400: 1.883e-08, 600: 4.358e-09, 800: 1.527e-09},
    ("upwind", 5): {100: 1.229e-07, 200: 2.583e-09, 400: 4.001e-11, 600: 5.703e-12, 800: 1.251e-12},
    ("central", 1): {100: 7.223e-05, 200: 1.832e-05, 400: 4.570e-06, 600: 2.030e-06, 800: 1.142e-06},
    ("central", 3): {100: 8.989e-07, 200: 1.242e-07, 400: 1.937e-08, 600: 4.500e-09, 800: 1.577e-09},
    ("central", 5): {100: 1.228e-07, 200: 2.582e-09, 400: 3.996e-11, 600: 5.711e-12, 800: 1.262e-12},
}

PAPER_EIGEN = {
    "swme1": (16.15, 11.32, None, 6.49),
    "swlme2": (16.19, 11.32, None, 6.46),
    "hswme2": (16.15, 12.03, 10.61, 6.49),
    "swme2": (16.17, 11.20, 9.82, 6.21),
}


def report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    print(line, flush=True)
    assert ok, line


def finest_pair_eoa(rows, component=0):
    (N1, e1, _), (N2, e2, _) = rows[-2], rows[-1]
    return np.log(e1[component] / e2[component]) / np.log(N2 / N1)


def run_sweep(scenario, order, flux, meshes=MESHES):
    cfg = ExperimentConfig(scenario=scenario, order=order, flux=flux,
                           mesh_sizes=tuple(meshes))
    return experiments.run_convergence(cfg, emit=False)


def check_order_thresholds(rows, order):
    eoa = finest_pair_eoa(rows)
    if order == 1:
        return abs(eoa - 2.0) <= 0.1, eoa
    if order == 3:
        return eoa >= 2.7, eoa
    return eoa >= 4.5, eoa


def test_criterion_1_lake_at_rest_exactness():
    worst = 0.0
    for flux in ("upwind", "central"):
        for order in (1, 3, 5):
            for N in MESHES:
                cfg = ExperimentConfig(scenario="lake_at_rest", order=order,
                                       flux=flux, n_cells=N)
                case, result = experiments.steady_state(cfg)
                err = M.l2_error(result.state, case.init, case.mesh)
                worst = max(worst, float(np.max(err)))
    report("criterion 1 (lake-at-rest exactness, both fluxes, orders 1/3/5)",
           worst <= 1e-12, f"worst L2 error {worst:.2e} <= 1e-12")


def test_criterion_2_supercritical_convergence():
    details = []
    ok = True
    for flux in ("upwind", "central"):
        for order in (1, 3, 5):
            rows = run_sweep("supercritical", order, flux)
            good, eoa = check_order_thresholds(rows, order)
            ok &= good
            hu_worst = max(e[1] for _, e, _ in rows)
            ok &= hu_worst <= 1e-9
            ratio_worst = max(e[0] / PAPER_SUPER_H[(flux, order)][N] for N, e, _ in rows)
            ok &= ratio_worst <= 10.0
            details.append(f"{flux}/W{order}: EOA={eoa:.2f} hu<={hu_worst:.1e} h<= {ratio_worst:.2f}x paper")
    report("criterion 2 (supercritical convergence Tables 3-4)", ok, "; ".join(details))


def test_criterion_3_subcritical_convergence():
    details = []
    ok = True
    for order in (1, 3, 5):
        rows = run_sweep("subcritical", order, "central")
        good, eoa = check_order_thresholds(rows, order)
        ok &= good
        hu_worst = max(e[1] for _, e, _ in rows)
        ok &= hu_worst <= 1e-9
        ratio_worst = max(e[0] / PAPER_SUB_H[("central", order)][N] for N, e, _ in rows)
        ok &= ratio_worst <= 10.0
        if order == 5:
            e400 = dict((N, e[0]) for N, e, _ in rows)[400]
            ok &= e400 <= 1e-9
            details.append(f"W5 h(N=400)={e400:.2e}<=1e-9")
        details.append(f"central/W{order}: EOA={eoa:.2f} hu<={hu_worst:.1e} h<= {ratio_worst:.2f}x")
    # upwind spot check on the finest pair
    rows = run_sweep("subcritical", 5, "upwind", meshes=(600, 800))
    good, eoa = check_order_thresholds(rows, 5)
    ok &= good
    ok &= max(e[0] / PAPER_SUB_H[("upwind", 5)][N] for N, e, _ in rows) <= 10.0
    details.append(f"upwind/W5: EOA={eoa:.2f}")
    report("criterion 3 (subcritical convergence Tables 5-6)", ok, "; ".join(details))


STEADY_CASES = [("supercritical", "swe"), ("supercritical", "swme1"),
                ("supercritical_friction", "swme1"),
                ("supercritical_friction", "swme2"),
                ("supercritical_friction", "hswme2"),
                ("supercritical_friction", "swlme2")]


def test_criterion_4_steady_state_preservation():
    worst = 0.0
    for scenario, model in STEADY_CASES:
        cfg = ExperimentConfig(scenario=scenario, model=model, n_cells=100, order=5)
        case, result = experiments.steady_state(cfg)
        restarted, _ = solver.advance_n_steps(result.state, 100, case.model, case.params,
                                              case.bathy, case.scheme, case.mesh, case.bc)
        drift = float(np.max(np.abs(restarted.interior - result.state.interior)))
        worst = max(worst, drift)
    report("criterion 4 (steady restart, 100 steps, all five models)",
           worst <= 1e-12, f"worst per-cell change {worst:.2e} <= 1e-12")


def test_criterion_5_eigenvalue_comparison():
    cfg = ExperimentConfig(scenario="eigenvalue_report", n_cells=100, order=5)
    rows = experiments.run_eigen_report(cfg, emit=False)
    ok = True
    worst = 0.0
    for model, x, w, lams in rows:
        for got, want in zip(lams, PAPER_EIGEN[model]):
            if want is None:
                ok &= got is None
            else:
                ok &= got is not None and abs(got - want) <= 0.15
                worst = max(worst, abs(got - want))
    report("criterion 5 (eigenvalue table at x~23)", ok,
           f"worst |deviation| {worst:.3f} <= 0.15")


def umwave_position(case, dev, component):
    """Sub-cell position of the contact-like wave near x = 9.5 + u t."""
    x = case.mesh.centers()
    a = np.abs(dev[:, component])
    sel = (x >= 18.0) & (x <= 22.0)
    i = np.flatnonzero(sel)[0] + int(np.argmax(a[sel]))
    denom = a[i - 1] - 2 * a[i] + a[i + 1]
    delta = 0.5 * (a[i - 1] - a[i + 1]) / denom if denom < 0 else 0.0
    return x[i] + delta * case.mesh.dx


def test_criterion_6_perturbation_structure():
    ok = True
    details = []

    # zero-amplitude bumps stay on the equilibrium for every preset
    worst = 0.0
    zero_cases = ([("lar_perturbation", "swme1"), ("supercritical", "swme1")]
                  + [("perturbation_comparison", m) for m in experiments.COMPARE_MODELS])
    for scenario, model in zero_cases:
        cfg = ExperimentConfig(scenario=scenario, model=model, n_cells=100, order=5,
                               perturb_amplitude=0.0, snapshot_times=(0.45, 0.9))
        case, eq, snaps = experiments.run_perturbation(cfg, model=model, emit=False)
        worst = max(worst, max(float(np.max(np.abs(d))) for _, d in snaps))
    ok &= worst <= 1e-12
    details.append(f"zero-amplitude dev {worst:.1e}<=1e-12")

    # the contact waves of swme1 and swlme2 superimpose at N=800
    pos = {}
    for model in ("swme1", "swlme2"):
        cfg = ExperimentConfig(scenario="perturbation_comparison", model=model,
                               n_cells=800, order=5, perturb_amplitude=1e-3,
                               snapshot_times=(0.9,))
        case, eqs, snaps = experiments.run_perturbation(cfg, model=model, emit=False)
        pos[model] = umwave_position(case, snaps[0][1], 0)
    gap = abs(pos["swme1"] - pos["swlme2"])
    ok &= gap <= case.mesh.dx
    details.append(f"swme1/swlme2 peak gap {gap:.4f}<=dx={case.mesh.dx}")

    # four distinct waves (including the double bump) for hswme2
    cfg = ExperimentConfig(scenario="perturbation_comparison", model="hswme2",
                           n_cells=800, order=5, perturb_amplitude=1e-3,
                           snapshot_times=(0.9,))
    case, eqs, snaps = experiments.run_perturbation(cfg, model="hswme2", emit=False)
    a = np.abs(snaps[0][1][:, 2])
    peaks, _ = find_peaks(a, height=0.05 * a.max(), prominence=0.03 * a.max())
    ok &= len(peaks) == 4
    details.append(f"hswme2 features {len(peaks)}==4 at x={np.round(case.mesh.centers()[peaks], 2)}")

    report("criterion 6 (perturbation structure)", ok, "; ".join(details))


def test_criterion_7_unit_oracles():
    from scipy.optimize import brentq
    from gfswme import bathymetry, quadrature, weno
    import sys
    sys.path.insert(0, __file__.rsplit("/", 1)[0])
    from util import make_case, random_primitive, smooth_state
    from test_steady import bisection_root, super_consts

    checks = []

    # WENO polynomial exactness
    worst = 0.0
    for order in (3, 5):
        cfg_l = weno.WenoConfig(order=order, nodal_weights="linear")
        r = cfg_l.r
        x8, w8 = np.polynomial.legendre.leggauss(8)
        offs = np.arange(-(r - 1), r)
        win_full = ((offs[:, None] + x8[None, :] / 2) ** (2 * r - 2)) @ (w8 / 2)
        win_cand = ((offs[:, None] + x8[None, :] / 2) ** (r - 1)) @ (w8 / 2)
        pts = (-0.5, 0.31, 0.5)
        for xi in pts:
            worst = max(worst, abs(weno.reconstruct_scalar(win_full, cfg_l, [xi])[0]
                                   - xi ** (2 * r - 2)))
            cfg_n = weno.WenoConfig(order=order, nodal_weights="nonlinear")
            worst = max(worst, abs(weno.reconstruct_scalar(win_cand, cfg_n, [xi])[0]
                                   - xi ** (r - 1)))
    checks.append(("weno exactness", worst <= 1e-12, worst))

    # Gauss / Lagrange exactness
    worst = 0.0
    for p in (1, 3, 5):
        t = quadrature.build_table(p, 1.0)
        for deg in range(2 * t.n_q):
            exact = (0.5 ** (deg + 1) - (-0.5) ** (deg + 1)) / (deg + 1)
            worst = max(worst, abs(t.weights @ t.nodes ** deg - exact))
        worst = max(worst, abs(np.sum(t.Rfull) - 1.0))
        if t.n_q > 1:
            worst = max(worst, np.max(np.abs(t.D @ np.ones(t.n_q))))
    checks.append(("gauss/lagrange exactness", worst <= 1e-13, worst))

    # Jacobian vs finite differences
    from test_models import fd_jacobian
    rng = np.random.default_rng(77)
    p = models.PhysicalParams(g=9.812)
    worst = 0.0
    for model in models.MODEL_IDS:
        for _ in range(100):
            w = random_primitive(rng, model)
            A = models.system_matrix(model, w, p)
            ref = fd_jacobian(model, w, p) - models.noncons_matrix(model, w)
            worst = max(worst, np.max(np.abs(A - ref)) / (np.max(np.abs(ref)) or 1.0))
    checks.append(("jacobian vs fd", worst <= 1e-5, worst))

    # analytic vs numeric eigenvalues
    worst = 0.0
    for model in ("swe", "swme1", "hswme2", "swlme2"):
        for _ in range(100):
            w = random_primitive(rng, model)
            lam = models.eigenvalues(model, w, p)
            num = np.sort(np.linalg.eigvals(models.system_matrix(model, w, p)).real)[::-1]
            worst = max(worst, np.max(np.abs(lam - num)) / max(1.0, np.max(np.abs(num))))
    checks.append(("analytic vs numeric eigenvalues", worst <= 1e-10, worst))

    # quartic roots with bisection cross-check
    consts = super_consts()
    worst_res, worst_gap = 0.0, 0.0
    for _ in range(100):
        b = -0.05 + 0.1 * rng.random()
        guess = 1.8 + 0.4 * rng.random()
        h = steady.swme1_exact_height(b, consts, guess)
        worst_res = max(worst_res, abs(consts.quartic(h, b)))
        worst_gap = max(worst_gap, abs(h - bisection_root(consts, b, guess)))
    checks.append(("quartic residual", worst_res <= 1e-12, worst_res))
    checks.append(("quartic vs bisection", worst_gap <= 1e-10, worst_gap))

    # telescoping identity of the R layer
    from gfswme import global_flux
    mesh, pp, scheme, bathy_f, bc, init = make_case("supercritical", model="swme1",
                                                    N=48, order=5, friction=True)
    table = quadrature.build_table(5, mesh.dx)
    st = smooth_state(mesh, "swme1", table)
    st.values[:, 1] += 2.0
    M.fill_ghosts(st, bc)
    recon = weno.reconstruct_field(st.values, bathy_f.cell_averages(mesh, table),
                                   scheme.weno, table)
    layer = global_flux.accumulate_R(recon, "swme1", pp, table)
    Hbar = -np.einsum("q,cqk->ck", table.weights, layer.W)
    Hbar[:, 1] += 0.5 * pp.g * (recon.b_trace_right ** 2 - recon.b_trace_left ** 2) / mesh.dx
    tele = np.max(np.abs(layer.R_left - layer.R_start[:-1] + mesh.dx * Hbar[:-1]))
    tele /= max(1.0, np.max(np.abs(layer.R_left)))
    checks.append(("telescoping identity", tele <= 1e-14, tele))

    # jump consistency limit
    from gfswme.global_flux import InterfaceTrace, interface_jump
    base = np.array([2.0, 4.0, 0.6, -0.2])
    left = InterfaceTrace(eta=2.05, b=0.05, U=base)
    norms = []
    for epsn in (1e-3, 1e-6):
        right = InterfaceTrace(eta=2.05 + epsn, b=0.05 + epsn, U=base + epsn)
        norms.append(np.linalg.norm(interface_jump("swme2", left, right, p)))
    checks.append(("jump consistency", norms[1] <= 2e-3 * norms[0], norms[1] / norms[0]))

    # periodic mass conservation
    mesh = M.Mesh(0.0, 25.0, 64, n_ghost=5)
    scheme = solver.SchemeConfig(steady_residual_tol=0.0)
    bc = M.BoundarySpec.periodic()
    st = smooth_state(mesh, "swme1", quadrature.build_table(5, mesh.dx))
    flat = bathymetry.flat()
    m0 = np.sum(st.interior[:, 0]) * mesh.dx
    res = solver.advance(st, 0.5, "swme1", p, flat, scheme, mesh, bc)
    m1 = np.sum(res.state.interior[:, 0]) * mesh.dx
    drift = abs(m1 - m0) / (m0 * res.n_steps)
    checks.append(("periodic mass conservation", drift <= 1e-12, drift))

    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{n}={v:.1e}" for n, good, v in checks)
    report("criterion 7 (unit-level oracle suites)", ok, detail)
