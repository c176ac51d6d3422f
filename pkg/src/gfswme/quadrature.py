"""Gauss-Legendre cell quadrature and Lagrange-basis machinery on those nodes."""

import numpy as np
from numpy.polynomial import polynomial as npoly

SUPPORTED_ORDERS = (1, 3, 5)


class QuadratureTable:
    """Per-cell quadrature data for a reconstruction of order p.

    Nodes live on the reference cell [-1/2, 1/2]; `weights` are the
    cell-average weights (they sum to one).  Integral-valued entries
    (`Rmat`, `Rfull`) and the derivative matrix `D` are scaled to a
    physical cell of width `dx`.
    """

    def __init__(self, p, dx):
        if p not in SUPPORTED_ORDERS:
            raise ValueError(f"unsupported reconstruction order {p}, expected one of {SUPPORTED_ORDERS}")
        if dx <= 0:
            raise ValueError("dx must be positive")
        self.p = p
        self.dx = float(dx)
        self.n_q = (p + 1) // 2

        x, w = np.polynomial.legendre.leggauss(self.n_q)
        self.nodes = x / 2.0            # reference coords in [-1/2, 1/2]
        self.weights = w / 2.0          # sum to 1 on the reference cell

        # Lagrange basis polynomials through the nodes, as coefficient arrays.
        basis = []
        for s in range(self.n_q):
            c = np.array([1.0])
            for j in range(self.n_q):
                if j == s:
                    continue
                c = npoly.polymul(c, np.array([-self.nodes[j], 1.0]))
                c /= (self.nodes[s] - self.nodes[j])
            basis.append(c)

        nq = self.n_q
        D = np.zeros((nq, nq))
        Rmat = np.zeros((nq, nq))
        Rfull = np.zeros(nq)
        edge_left = np.zeros(nq)
        edge_right = np.zeros(nq)
        for s, c in enumerate(basis):
            dc = npoly.polyder(c)
            ic = npoly.polyint(c)
            for q in range(nq):
                D[q, s] = npoly.polyval(self.nodes[q], dc) / self.dx
                Rmat[q, s] = (npoly.polyval(self.nodes[q], ic) - npoly.polyval(-0.5, ic)) * self.dx
            Rfull[s] = (npoly.polyval(0.5, ic) - npoly.polyval(-0.5, ic)) * self.dx
            edge_left[s] = npoly.polyval(-0.5, c)
            edge_right[s] = npoly.polyval(0.5, c)

        self.D = D                      # D[q, s] = L_s'(x_q), physical (1/dx) scaling
        self.Rmat = Rmat                # Rmat[q, s] = int_{x_{i-1/2}}^{x_{i,q}} L_s dx
        self.Rfull = Rfull              # full-cell integrals, sum equals dx
        self.edge_left = edge_left      # interpolant evaluation rows at the cell edges
        self.edge_right = edge_right

    def physical_nodes(self, x_center):
        """Quadrature node positions for a cell centered at x_center."""
        return x_center + self.nodes * self.dx


def build_table(p, dx):
    """Quadrature table for reconstruction order p on cells of width dx."""
    return QuadratureTable(p, dx)


def lagrange_eval_at_interfaces(samples, table):
    """Evaluate the nodal Lagrange interpolant at both cell edges.

    Returns (left, right) = interpolant at x_{i-1/2} and x_{i+1/2}.
    """
    samples = np.asarray(samples, dtype=float)
    return float(table.edge_left @ samples), float(table.edge_right @ samples)


def derivative_at_nodes(samples, table):
    """Derivative of the nodal interpolant at each quadrature node."""
    return table.D @ np.asarray(samples, dtype=float)
