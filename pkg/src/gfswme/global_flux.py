"""Assembly of the global flux G = F + R.

R is the running antiderivative of the negated right-hand side (bathymetry
and friction sources plus non-conservative products), accumulated cell by
cell with exact partial integrals of the nodal Lagrange basis, and linked
across interfaces by linear-path jump terms.  This module is the plain
numpy implementation; kernels.py carries the compiled twin.
"""

from dataclasses import dataclass

import numpy as np

from . import models, weno


@dataclass(frozen=True)
class InterfaceTrace:
    """One-sided limits at a cell interface from the nodal interpolant."""
    eta: float
    b: float
    U: np.ndarray     # conserved components (m,)


@dataclass
class GlobalFluxLayer:
    """The R integral layer and the derived global-flux data, per padded cell."""
    W: np.ndarray           # (C, n_q, m) quadratured part of the R-integrand
    incr: np.ndarray        # (C, m) full-cell increment of R
    jumps: np.ndarray       # (C-1, m) interface jumps [[R]]
    R_start: np.ndarray     # (C, m) R at the left edge of each cell (= R^R of that interface)
    R_left: np.ndarray      # (C-1, m) R^L at interface j+1/2
    R_right: np.ndarray     # (C-1, m) R^R at interface j+1/2
    R_nodes: np.ndarray     # (C, n_q, m)
    G_bar: np.ndarray = None          # (C, m)
    G_left: np.ndarray = None         # (n_if, m) reconstructed G at flux interfaces
    G_right: np.ndarray = None


def _nodal_primitives(recon, m):
    h = recon.U_nodes[:, :, 0]
    u = recon.U_nodes[:, :, 1] / h
    a1 = recon.U_nodes[:, :, 2] / h if m > 2 else np.zeros_like(h)
    a2 = recon.U_nodes[:, :, 3] / h if m > 3 else np.zeros_like(h)
    return h, u, a1, a2


def _trace_primitives(trace_U, m):
    h = trace_U[:, 0]
    u = trace_U[:, 1] / h
    a1 = trace_U[:, 2] / h if m > 2 else np.zeros_like(h)
    a2 = trace_U[:, 3] / h if m > 3 else np.zeros_like(h)
    return h, u, a1, a2


def accumulate_R(recon, model, p, table):
    """Build the R layer from a field reconstruction (see GlobalFluxLayer).

    The scan starts from zero at the left edge of the leftmost ghost cell.
    """
    C, nq, m = recon.U_nodes.shape
    g = p.g
    nuol = p.nu_over_lambda
    h, u, a1, a2 = _nodal_primitives(recon, m)

    W = np.zeros((C, nq, m))
    dbdx = np.einsum("qs,cs->cq", table.D, recon.b_nodes)
    W[:, :, 1] = g * recon.eta_nodes * dbdx
    if nuol > 0.0:
        fr = models.friction_arrays(model, h, u, a1, a2, p.lambda_slip)
        for c in range(1, m):
            W[:, :, c] += nuol * fr[c - 1]
    if m > 2:
        b33, b34, b43, b44 = models.moment_block_arrays(model, u, a1, a2)
        du3 = np.einsum("qs,cs->cq", table.D, recon.U_nodes[:, :, 2])
        du4 = np.einsum("qs,cs->cq", table.D, recon.U_nodes[:, :, 3]) if m > 3 else 0.0
        W[:, :, 2] -= b33 * du3 + b34 * du4
        if m > 3:
            W[:, :, 3] -= b43 * du3 + b44 * du4

    incr = np.einsum("q,cqk->ck", table.Rfull, W)
    incr[:, 1] -= 0.5 * g * (recon.b_trace_right ** 2 - recon.b_trace_left ** 2)

    etaR, etaL = recon.eta_trace_right[:-1], recon.eta_trace_left[1:]
    bR, bL = recon.b_trace_right[:-1], recon.b_trace_left[1:]
    jumps = np.zeros((C - 1, m))
    jumps[:, 1] = 0.5 * g * (etaR + etaL) * (bL - bR) - 0.5 * g * (bL ** 2 - bR ** 2)
    if m > 2:
        hl, ul, a1l, a2l = _trace_primitives(recon.trace_right[:-1], m)
        hr, ur, a1r, a2r = _trace_primitives(recon.trace_left[1:], m)
        b33l, b34l, b43l, b44l = models.moment_block_arrays(model, ul, a1l, a2l)
        b33r, b34r, b43r, b44r = models.moment_block_arrays(model, ur, a1r, a2r)
        d3 = recon.trace_left[1:, 2] - recon.trace_right[:-1, 2]
        d4 = recon.trace_left[1:, 3] - recon.trace_right[:-1, 3] if m > 3 else 0.0
        jumps[:, 2] = -(0.5 * (b33l + b33r) * d3 + 0.5 * (b34l + b34r) * d4)
        if m > 3:
            jumps[:, 3] = -(0.5 * (b43l + b43r) * d3 + 0.5 * (b44l + b44r) * d4)

    R_start = np.zeros((C, m))
    R_start[1:] = np.cumsum(incr[:-1] + jumps, axis=0)
    R_left = R_start[:-1] + incr[:-1]
    R_right = R_left + jumps

    R_nodes = R_start[:, None, :] + np.einsum("qt,ctk->cqk", table.Rmat, W)
    R_nodes[:, :, 1] -= 0.5 * g * (recon.b_nodes ** 2 - recon.b_trace_left[:, None] ** 2)

    return GlobalFluxLayer(W=W, incr=incr, jumps=jumps, R_start=R_start,
                           R_left=R_left, R_right=R_right, R_nodes=R_nodes)


def interface_jump(model, left, right, p):
    """Linear-path jump of R across one interface.

    `left`/`right` are InterfaceTrace objects; the momentum row carries the
    bathymetry source jump, the moment rows the non-conservative one.  The
    mass row is zero.
    """
    m = left.U.shape[0]
    g = p.g
    out = np.zeros(m)
    out[1] = 0.5 * g * (left.eta + right.eta) * (right.b - left.b) \
        - 0.5 * g * (right.b ** 2 - left.b ** 2)
    if m > 2:
        wl = models.cons_to_prim(model, left.U)
        wr = models.cons_to_prim(model, right.U)
        Bl = models.noncons_matrix(model, wl)
        Br = models.noncons_matrix(model, wr)
        dU = right.U - left.U
        for row in range(2, m):
            out[row] = -0.5 * ((Bl[row] + Br[row]) @ dU)
    return out


def cell_average_G(recon, layer, model, p, table):
    """Cell averages of the global flux, Gbar = sum_q w_q (F + R)(x_q)."""
    C, nq, m = recon.U_nodes.shape
    h, u, a1, a2 = _nodal_primitives(recon, m)
    F = models.flux_arrays(model, p.g, h, u, a1, a2)
    layer.G_bar = np.einsum("q,cqk->ck", table.weights, F + layer.R_nodes)
    return layer.G_bar


def reconstruct_G_interfaces(G_bar, config, n_ghost):
    """Componentwise WENO values of Gbar at both sides of every flux interface.

    Interface k separates cells (n_ghost-1+k, n_ghost+k); returns arrays of
    shape (N+1, m) where N is the interior cell count.
    """
    C, m = G_bar.shape
    r = config.r
    nif = C - 2 * n_ghost + 1
    GL = np.empty((nif, m))
    GR = np.empty((nif, m))
    for c in range(m):
        left_vals, right_vals = weno.batch_edge_values(G_bar[:, c], config)
        # cell j has full-window index j - (r-1)
        jl = np.arange(n_ghost - 1, n_ghost - 1 + nif)
        GL[:, c] = right_vals[jl - (r - 1)]
        GR[:, c] = left_vals[jl + 1 - (r - 1)]
    return GL, GR
