"""Analytic bathymetries and their cell-average discretization."""

import numpy as np


class BathymetryField:
    """Point-sampled bottom elevation b(x) with Gauss-rule cell averages.

    The solver only consumes the cell averages (the nodal values used in
    the source quadrature are reconstructed from them); the sampler itself
    is kept for initialization and output.
    """

    def __init__(self, func, name="custom"):
        self.func = func
        self.name = name

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def cell_averages(self, mesh, table):
        """Gauss-rule averages over every padded cell."""
        xc = mesh.centers(with_ghosts=True)
        nodes = xc[:, None] + table.nodes[None, :] * mesh.dx
        return self(nodes) @ table.weights


def gaussian_bump(amplitude=0.05, x0=12.5):
    """The smooth sine-modulated bump, machine-precision small at x=0 and x=25."""
    def b(x):
        return amplitude * np.sin(x - x0) * np.exp(1.0 - (x - x0) ** 2)
    return BathymetryField(b, name="bump")


def flat():
    return BathymetryField(lambda x: np.zeros_like(np.asarray(x, dtype=float)), name="flat")


CATALOGUE = {"bump": gaussian_bump, "flat": flat}


def from_name(name):
    if name not in CATALOGUE:
        raise ValueError(f"unknown bathymetry {name!r}, expected one of {tuple(CATALOGUE)}")
    return CATALOGUE[name]()
