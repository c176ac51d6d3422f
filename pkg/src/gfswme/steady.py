"""Analytic reference states: lake at rest and exact moving equilibria.

Moving equilibria of the first-order moment model satisfy a quartic in the
water height once the discharge C0 = h*u_m, the moment ratio C1 = alpha_1/h,
and the total head are fixed from an anchor station.  Profiles are built by
branch continuation, seeding each root solve with the previous node's root.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import models, quadrature
from .mesh import StateField


class RootFindingError(Exception):
    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


@dataclass(frozen=True)
class EquilibriumConstants:
    """Invariants of a moving equilibrium, anchored at (h_ref, b_ref)."""
    C0: float            # discharge h*u_m
    C1: float            # alpha_1 / h
    h_ref: float
    b_ref: float
    g: float

    def __post_init__(self):
        if self.h_ref <= 0 or self.g <= 0:
            raise ValueError("need h_ref > 0 and g > 0")
        if self.C0 == 0.0:
            raise ValueError("moving equilibria need a nonzero discharge")

    @property
    def head(self):
        """Total head: C0^2/(2 g h^2) + h + b + C1^2 h^2/(2 g) at the anchor."""
        return (self.C0 ** 2 / (2.0 * self.g * self.h_ref ** 2)
                + self.h_ref + self.b_ref
                + self.C1 ** 2 * self.h_ref ** 2 / (2.0 * self.g))

    def quartic(self, h, b):
        """C1^2/(2g) h^4 + h^3 + (b - E) h^2 + C0^2/(2g)."""
        return (self.C1 ** 2 / (2.0 * self.g) * h ** 4 + h ** 3
                + (b - self.head) * h ** 2 + self.C0 ** 2 / (2.0 * self.g))

    def quartic_derivative(self, h, b):
        return (2.0 * self.C1 ** 2 / self.g * h ** 3 + 3.0 * h ** 2
                + 2.0 * (b - self.head) * h)


def lake_at_rest(mesh, bathy, eta0, model, table=None, order=5):
    """Cell averages of the rest state h = eta0 - b, momenta zero.

    Averages use the scheme's own Gauss rule so the discrete free surface is
    exactly constant.
    """
    table = table or quadrature.build_table(order, mesh.dx)
    bbar = bathy.cell_averages(mesh, table)
    if np.any(eta0 - bbar <= 0.0):
        raise ValueError(f"eta0={eta0} does not submerge the bathymetry")
    U = np.zeros((mesh.n_total, models.n_vars(model)))
    U[:, 0] = eta0 - bbar
    return StateField(mesh, U)


def _bracket_roots(consts, b, h_max):
    """All sign-change brackets of the quartic on (1e-6, h_max)."""
    hs = np.linspace(1e-6, h_max, 2000)
    vals = consts.quartic(hs, b)
    roots = []
    for i in range(len(hs) - 1):
        if vals[i] == 0.0:
            roots.append(hs[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(lambda x: consts.quartic(x, b),
                                hs[i], hs[i + 1], xtol=1e-15, rtol=8.9e-16))
    return roots


def swme1_exact_height(b, consts, branch_guess, residual_tol=1e-12):
    """Positive quartic root nearest the branch guess.

    Newton from the guess, safeguarded by a bisection pass over brackets
    found by a sign-change scan on (1e-6, 4 h_ref) when Newton leaves the
    branch or stalls.
    """
    h = float(branch_guess)
    ok = False
    for _ in range(60):
        f = consts.quartic(h, b)
        df = consts.quartic_derivative(h, b)
        if df == 0.0:
            break
        step = f / df
        h_new = h - step
        if h_new <= 0.0 or abs(h_new - branch_guess) > 0.5 * branch_guess:
            break
        h = h_new
        if abs(step) < 1e-14 * max(1.0, h):
            ok = True
            break
    if ok and abs(consts.quartic(h, b)) <= residual_tol:
        return h
    roots = _bracket_roots(consts, b, 4.0 * consts.h_ref)
    roots = [r for r in roots if r > 0.0]
    if not roots:
        raise RootFindingError(f"no positive root of the equilibrium quartic at b={b}")
    h = min(roots, key=lambda r: abs(r - branch_guess))
    for _ in range(5):
        df = consts.quartic_derivative(h, b)
        if df == 0.0:
            break
        h -= consts.quartic(h, b) / df
    if abs(consts.quartic(h, b)) > residual_tol:
        raise RootFindingError(f"quartic residual {consts.quartic(h, b):.2e} above tolerance at b={b}")
    return h


def froude(consts, h):
    """|u_m| / sqrt(g h + alpha_1^2) on the equilibrium manifold."""
    u = consts.C0 / h
    a1 = consts.C1 * h
    return abs(u) / np.sqrt(consts.g * h + a1 ** 2)


def swme1_exact_profile(mesh, bathy, consts, regime, table=None, order=5):
    """Exact steady cell averages for the first-order moment model.

    Heights are solved at every Gauss node by branch continuation along x;
    cell averages use the scheme's Gauss rule, so the convergence study
    measures scheme error rather than quadrature mismatch.
    """
    if regime not in ("supercritical", "subcritical"):
        raise ValueError("regime must be 'supercritical' or 'subcritical'")
    fr = froude(consts, consts.h_ref)
    if regime == "supercritical" and fr <= 1.0:
        raise RootFindingError(f"anchor state has Froude {fr:.3f} <= 1, not supercritical")
    if regime == "subcritical" and fr >= 1.0:
        raise RootFindingError(f"anchor state has Froude {fr:.3f} >= 1, not subcritical")
    table = table or quadrature.build_table(order, mesh.dx)
    U = np.zeros((mesh.n_total, 3))
    guess = consts.h_ref
    xc = mesh.centers(with_ghosts=True)
    for j, x in enumerate(xc):
        hq = np.empty(table.n_q)
        for q, xi in enumerate(table.nodes):
            xq = x + xi * mesh.dx
            try:
                hq[q] = swme1_exact_height(float(bathy(xq)), consts, guess)
            except RootFindingError as exc:
                raise RootFindingError(f"{exc} (at x={xq})", x=xq) from exc
            guess = hq[q]
        U[j, 0] = table.weights @ hq
        U[j, 1] = consts.C0
        U[j, 2] = consts.C1 * (table.weights @ hq ** 2)
    return StateField(mesh, U)


def equilibrium_invariants(state, model, bathy, g):
    """Per-cell equilibrium invariants at cell centers, for diagnostics.

    Closed forms exist for swe, swme1, and swlme2 only.
    """
    if model not in ("swe", "swme1", "swlme2"):
        raise models.CapabilityError(f"no closed-form equilibrium invariants for {model}")
    U = state.interior
    x = state.mesh.centers()
    b = np.asarray(bathy(x), dtype=float)
    h = U[:, 0]
    u = U[:, 1] / h
    out = {"discharge": U[:, 1].copy()}
    head = 0.5 * u ** 2 + g * (h + b)
    if model in ("swme1", "swlme2"):
        a1 = U[:, 2] / h
        head = head + 0.5 * a1 ** 2
        out["moment_ratio_1"] = a1 / h
    if model == "swlme2":
        a2 = U[:, 3] / h
        head = head + 0.3 * a2 ** 2
        out["moment_ratio_2"] = a2 / h
    out["head"] = head
    return out
