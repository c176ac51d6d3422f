"""Shared builders for test scenarios."""

import numpy as np

from gfswme import bathymetry, mesh as M, models, quadrature, solver
from gfswme.mesh import BoundarySpec, SideCondition, StateField
from gfswme.weno import WenoConfig

DOMAIN = (0.0, 25.0)


def make_case(scenario, model="swme1", N=100, order=5, flux="central",
              nodal="linear", g=None, friction=None, cfl=0.4):
    """(mesh, params, scheme, bathy, bc, init) for the paper's scenarios."""
    mesh = M.Mesh(*DOMAIN, N)
    m = models.n_vars(model)
    bathy_f = bathymetry.gaussian_bump()
    table = quadrature.build_table(order, mesh.dx)
    bbar = bathy_f.cell_averages(mesh, table)
    U = np.zeros((mesh.n_total, m))
    if scenario == "lake_at_rest":
        g = 1.0 if g is None else g
        friction = True if friction is None else friction
        U[:, 0] = 1.0 - bbar
        bc = BoundarySpec(SideCondition("subcritical_inlet", (0.0,) * (m - 1)),
                          SideCondition("subcritical_outlet", (1.0,)))
    elif scenario == "supercritical":
        g = 9.812 if g is None else g
        friction = False if friction is None else friction
        vals = (2.0, 24.0, -0.5, -0.2)[:m]
        U[:, 0] = 2.0 - bbar
        if m > 2:
            U[:, 2] = vals[2]
        if m > 3:
            U[:, 3] = vals[3]
        bc = BoundarySpec(SideCondition("supercritical_inflow", vals),
                          SideCondition("transmissive"))
    elif scenario == "subcritical":
        g = 9.812 if g is None else g
        friction = False if friction is None else friction
        U[:, 0] = 2.0 - bbar
        if m > 2:
            U[:, 2] = 0.1
        bc = BoundarySpec(SideCondition("subcritical_inlet", (4.42,) + (0.1, 0.0)[:m - 2]),
                          SideCondition("subcritical_outlet", (2.0,)))
    else:
        raise ValueError(scenario)
    params = models.PhysicalParams(g=g, nu=0.05, lambda_slip=1.0,
                                   friction_enabled=bool(friction))
    scheme = solver.SchemeConfig(flux_kind=flux,
                                 weno=WenoConfig(order=order, nodal_weights=nodal),
                                 cfl=cfl)
    return mesh, params, scheme, bathy_f, bc, StateField(mesh, U)


def random_primitive(rng, model, moment_scale=0.5):
    m = models.n_vars(model)
    h = 0.5 + 3.0 * rng.random()
    u = -5.0 + 10.0 * rng.random()
    alpha = tuple(moment_scale * (2.0 * rng.random() - 1.0) for _ in range(m - 2))
    return models.PrimitiveState(h=h, u_m=u, alpha=alpha)


def smooth_state(mesh, model, table, amp=0.1):
    """Manufactured smooth cell averages via the table's Gauss rule."""
    m = models.n_vars(model)
    xc = mesh.centers(with_ghosts=True)
    nodes = xc[:, None] + table.nodes[None, :] * mesh.dx

    def avg(f):
        return f(nodes) @ table.weights

    U = np.zeros((mesh.n_total, m))
    U[:, 0] = avg(lambda x: 2.0 + amp * np.sin(2 * np.pi * x / 25.0))
    U[:, 1] = avg(lambda x: 1.0 + amp * np.cos(2 * np.pi * x / 25.0))
    if m > 2:
        U[:, 2] = avg(lambda x: 0.2 * amp * np.sin(4 * np.pi * x / 25.0 + 0.3))
    if m > 3:
        U[:, 3] = avg(lambda x: 0.1 * amp * np.cos(4 * np.pi * x / 25.0 + 1.1))
    return StateField(mesh, U)
