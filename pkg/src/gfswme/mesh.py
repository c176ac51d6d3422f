"""Uniform 1D mesh, cell-averaged state with ghost regions, boundary filling, norms."""

from dataclasses import dataclass, field

import numpy as np

from . import models

N_GHOST = 3   # covers the WENO5 stencil radius; lower orders ignore the extra cells

BC_KINDS = ("supercritical_inflow", "subcritical_inlet", "subcritical_outlet",
            "transmissive", "periodic")


@dataclass(frozen=True)
class Mesh:
    x_left: float
    x_right: float
    n_cells: int
    n_ghost: int = N_GHOST

    def __post_init__(self):
        if self.n_cells <= 0 or self.x_right <= self.x_left:
            raise ValueError("need n_cells > 0 and x_right > x_left")

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def n_total(self):
        return self.n_cells + 2 * self.n_ghost

    def centers(self, with_ghosts=False):
        if with_ghosts:
            i = np.arange(-self.n_ghost, self.n_cells + self.n_ghost)
        else:
            i = np.arange(self.n_cells)
        return self.x_left + (i + 0.5) * self.dx

    @property
    def interior(self):
        return slice(self.n_ghost, self.n_ghost + self.n_cells)


@dataclass
class StateField:
    """Cell averages of the m conserved variables on the padded mesh."""
    mesh: Mesh
    values: np.ndarray     # (n_total, m)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=float)
        if self.values.shape[0] != self.mesh.n_total:
            raise ValueError("state row count does not match the padded mesh")

    @property
    def m(self):
        return self.values.shape[1]

    @property
    def interior(self):
        return self.values[self.mesh.interior]

    def copy(self):
        return StateField(self.mesh, self.values.copy())

    @classmethod
    def zeros(cls, mesh, m):
        return cls(mesh, np.zeros((mesh.n_total, m)))


@dataclass(frozen=True)
class SideCondition:
    kind: str
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    def expected_count(self, m):
        return {"supercritical_inflow": m,
                "subcritical_inlet": m - 1,
                "subcritical_outlet": 1,
                "transmissive": 0,
                "periodic": 0}[self.kind]

    def prescribed(self, m):
        """(mask, full-length value vector) for the ghost fill."""
        if len(self.values) != self.expected_count(m):
            raise ValueError(f"{self.kind} needs {self.expected_count(m)} values, got {len(self.values)}")
        mask = np.zeros(m, dtype=bool)
        vals = np.zeros(m)
        if self.kind == "supercritical_inflow":
            mask[:] = True
            vals[:] = self.values
            if vals[0] <= 0:
                raise ValueError("prescribed boundary height must be positive")
        elif self.kind == "subcritical_inlet":
            mask[1:] = True
            vals[1:] = self.values
        elif self.kind == "subcritical_outlet":
            mask[0] = True
            vals[0] = self.values[0]
            if vals[0] <= 0:
                raise ValueError("prescribed boundary height must be positive")
        return mask, vals


@dataclass(frozen=True)
class BoundarySpec:
    left: SideCondition
    right: SideCondition

    def __post_init__(self):
        if (self.left.kind == "periodic") != (self.right.kind == "periodic"):
            raise ValueError("periodic boundaries must be set on both sides")

    @property
    def is_periodic(self):
        return self.left.kind == "periodic"

    @classmethod
    def periodic(cls):
        return cls(SideCondition("periodic"), SideCondition("periodic"))

    @classmethod
    def transmissive(cls):
        return cls(SideCondition("transmissive"), SideCondition("transmissive"))


def fill_ghosts(state, bc, bathymetry=None):
    """Fill the ghost rows in place and return the state.

    Prescribed components take the boundary data; the rest copy the nearest
    interior cell (constant extrapolation).  Periodic wraps indices.
    """
    U = state.values
    ng = state.mesh.n_ghost
    n = state.mesh.n_cells
    m = state.m
    if bc.is_periodic:
        U[:ng] = U[n:n + ng]
        U[ng + n:] = U[ng:2 * ng]
        return state
    mask_l, vals_l = bc.left.prescribed(m)
    mask_r, vals_r = bc.right.prescribed(m)
    U[:ng] = np.where(mask_l, vals_l, U[ng])
    U[ng + n:] = np.where(mask_r, vals_r, U[ng + n - 1])
    return state


def l2_error(state, reference, mesh=None):
    """Per-component discrete L2 norm sqrt(sum_i dx (U_i - Uref_i)^2), interior cells."""
    mesh = mesh or state.mesh
    d = state.interior - reference.interior
    return np.sqrt(mesh.dx * np.sum(d * d, axis=0))


def estimated_order(errors_coarse, errors_fine, ratio):
    """Experimental order of accuracy; None when either error sits at the noise floor."""
    if ratio <= 1:
        raise ValueError("refinement ratio must exceed 1")
    if errors_coarse < 1e-14 or errors_fine < 1e-14:
        return None
    return float(np.log(errors_coarse / errors_fine) / np.log(ratio))
