"""Closed-form model definitions for the five balance-law systems.

Each model supplies its conservative flux F, the matrix of non-conservative
products B, the friction vector P, the full system matrix A = dF/dU - B, and
its eigenstructure.  States are (h, h*u_m, h*alpha_1, ..., h*alpha_N).
"""

from dataclasses import dataclass, field

import numpy as np

MODEL_IDS = ("swe", "swme1", "swme2", "hswme2", "swlme2")
N_VARS = {"swe": 2, "swme1": 3, "swme2": 4, "hswme2": 4, "swlme2": 4}
KERNEL_CODE = {"swe": 0, "swme1": 1, "swme2": 2, "hswme2": 3, "swlme2": 4}

# closed-form left eigensystems exist for these (used by the upwind flux)
EIGENSYSTEM_MODELS = ("swe", "swme1")


class HyperbolicityError(Exception):
    """System matrix has complex eigenvalues (loss of hyperbolicity)."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class CapabilityError(Exception):
    """Requested operation is not available for this model."""


@dataclass(frozen=True)
class PhysicalParams:
    g: float = 9.812
    nu: float = 0.0                 # kinematic viscosity
    lambda_slip: float = 1.0        # slip length
    friction_enabled: bool = False

    def __post_init__(self):
        if self.g <= 0:
            raise ValueError("g must be positive")
        if self.friction_enabled and (self.nu < 0 or self.lambda_slip <= 0):
            raise ValueError("friction requires nu >= 0 and lambda_slip > 0")

    @property
    def nu_over_lambda(self):
        return self.nu / self.lambda_slip if self.friction_enabled else 0.0


@dataclass(frozen=True)
class PrimitiveState:
    h: float
    u_m: float
    alpha: tuple = ()

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"water height must be positive, got {self.h}")

    @property
    def a1(self):
        return self.alpha[0] if len(self.alpha) > 0 else 0.0

    @property
    def a2(self):
        return self.alpha[1] if len(self.alpha) > 1 else 0.0


def check_model(model):
    if model not in MODEL_IDS:
        raise ValueError(f"unknown model {model!r}, expected one of {MODEL_IDS}")


def n_vars(model):
    check_model(model)
    return N_VARS[model]


def n_moments(model):
    return n_vars(model) - 2


def prim_to_cons(model, w):
    check_model(model)
    m = N_VARS[model]
    U = np.empty(m)
    U[0] = w.h
    U[1] = w.h * w.u_m
    for k in range(m - 2):
        U[2 + k] = w.h * w.alpha[k]
    return U


def cons_to_prim(model, U):
    check_model(model)
    U = np.asarray(U, dtype=float)
    h = U[0]
    if h <= 0:
        raise ValueError(f"water height must be positive, got {h}")
    return PrimitiveState(h=h, u_m=U[1] / h, alpha=tuple(U[2:] / h))


def flux(model, w, p):
    """Conservative flux F(U)."""
    check_model(model)
    g, h, u, a1, a2 = p.g, w.h, w.u_m, w.a1, w.a2
    if model == "swe":
        return np.array([h * u, h * u ** 2 + 0.5 * g * h ** 2])
    if model == "swme1":
        return np.array([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0,
                         2.0 * h * u * a1])
    if model == "swme2":
        return np.array([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0 + h * a2 ** 2 / 5.0,
                         2.0 * h * u * a1 + 0.8 * h * a1 * a2,
                         2.0 * h * u * a2 + 2.0 / 3.0 * h * a1 ** 2 + 2.0 / 7.0 * h * a2 ** 2])
    if model == "hswme2":
        return np.array([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0,
                         2.0 * h * u * a1,
                         2.0 / 3.0 * h * a1 ** 2])
    # swlme2
    return np.array([h * u,
                     h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0 + h * a2 ** 2 / 5.0,
                     2.0 * h * u * a1,
                     2.0 * h * u * a2])


def noncons_matrix(model, w):
    """Matrix B of non-conservative products; mass/momentum rows are zero."""
    check_model(model)
    m = N_VARS[model]
    u, a1, a2 = w.u_m, w.a1, w.a2
    B = np.zeros((m, m))
    if model == "swme1":
        B[2, 2] = u
    elif model == "swme2":
        B[2, 2] = u - a2 / 5.0
        B[2, 3] = a1 / 5.0
        B[3, 2] = a1
        B[3, 3] = u + a2 / 7.0
    elif model == "hswme2":
        B[2, 2] = u
        B[2, 3] = -0.6 * a1
        B[3, 2] = a1
        B[3, 3] = -u
    elif model == "swlme2":
        B[2, 2] = u
        B[3, 3] = u
    return B


def friction_vector(model, w, p):
    """Newtonian slip-law friction vector P(U)."""
    check_model(model)
    h, u, a1, a2 = w.h, w.u_m, w.a1, w.a2
    ls = p.lambda_slip
    if model == "swe":
        return np.array([0.0, u])
    if model == "swme1":
        return np.array([0.0,
                         u + a1,
                         3.0 * (u + a1 + 4.0 * ls / h * a1)])
    # the three N=2 models share the friction vector
    return np.array([0.0,
                     u + a1 + a2,
                     3.0 * (u + a1 + a2 + 4.0 * ls / h * a1),
                     5.0 * (u + a1 + a2 + 12.0 * ls / h * a2)])


def source(model, w, db_dx, p):
    """Full source: bathymetry slope in the momentum row, minus friction."""
    check_model(model)
    m = N_VARS[model]
    S = np.zeros(m)
    S[1] = -p.g * w.h * db_dx
    if p.friction_enabled:
        S -= p.nu_over_lambda * friction_vector(model, w, p)
    return S


def system_matrix(model, w, p):
    """Closed-form system matrix A = dF/dU - B."""
    check_model(model)
    g, h, u, a1, a2 = p.g, w.h, w.u_m, w.a1, w.a2
    if model == "swe":
        return np.array([[0.0, 1.0],
                         [g * h - u ** 2, 2.0 * u]])
    if model == "swme1":
        return np.array([[0.0, 1.0, 0.0],
                         [g * h - u ** 2 - a1 ** 2 / 3.0, 2.0 * u, 2.0 * a1 / 3.0],
                         [-2.0 * u * a1, 2.0 * a1, u]])
    if model == "swme2":
        return np.array([
            [0.0, 1.0, 0.0, 0.0],
            [g * h - u ** 2 - a1 ** 2 / 3.0 - a2 ** 2 / 5.0, 2.0 * u, 2.0 * a1 / 3.0, 2.0 * a2 / 5.0],
            [-2.0 * u * a1 - 0.8 * a1 * a2, 2.0 * a1, u + a2, 0.6 * a1],
            [-2.0 * u * a2 - 2.0 / 3.0 * a1 ** 2 - 2.0 / 7.0 * a2 ** 2, 2.0 * a2, a1 / 3.0, u + 3.0 * a2 / 7.0],
        ])
    if model == "hswme2":
        return np.array([
            [0.0, 1.0, 0.0, 0.0],
            [g * h - u ** 2 - a1 ** 2 / 3.0, 2.0 * u, 2.0 * a1 / 3.0, 0.0],
            [-2.0 * u * a1, 2.0 * a1, u, 0.6 * a1],
            [-2.0 / 3.0 * a1 ** 2, 0.0, a1 / 3.0, u],
        ])
    # swlme2
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [g * h - u ** 2 - a1 ** 2 / 3.0 - a2 ** 2 / 5.0, 2.0 * u, 2.0 * a1 / 3.0, 2.0 * a2 / 5.0],
        [-2.0 * u * a1, 2.0 * a1, u, 0.0],
        [-2.0 * u * a2, 2.0 * a2, 0.0, u],
    ])


def eigenvalues(model, w, p):
    """Eigenvalues of the system matrix, sorted in descending order.

    Analytic formulas except for the full second-order model, whose 4x4
    system matrix is diagonalized numerically; a complex pair there raises
    HyperbolicityError carrying the offending state.
    """
    check_model(model)
    g, h, u, a1, a2 = p.g, w.h, w.u_m, w.a1, w.a2
    if model == "swe":
        c = np.sqrt(g * h)
        return np.array([u + c, u - c])
    if model == "swme1":
        c = np.sqrt(g * h + a1 ** 2)
        return np.array([u + c, u, u - c])
    if model == "hswme2":
        c = np.sqrt(g * h + a1 ** 2)
        s = abs(a1) / np.sqrt(5.0)
        return np.array([u + c, u + s, u - s, u - c])
    if model == "swlme2":
        c = np.sqrt(g * h + a1 ** 2 + 0.6 * a2 ** 2)
        return np.array([u + c, u, u, u - c])
    # swme2: numeric 4x4
    ev = np.linalg.eigvals(system_matrix(model, w, p))
    scale = max(1.0, np.max(np.abs(ev.real)))
    if np.max(np.abs(ev.imag)) > 1e-9 * scale:
        raise HyperbolicityError(
            f"complex eigenvalues for swme2 at h={h}, u_m={u}, a1={a1}, a2={a2}", state=w)
    return np.sort(ev.real)[::-1]


def spectral_radius(model, w, p):
    return float(np.max(np.abs(eigenvalues(model, w, p))))


def left_eigensystem(model, w, p):
    """Left eigenvector matrix L and eigenvalue vector with L @ A = diag(lam) @ L.

    Available in closed form for the models the upwind flux supports.
    """
    check_model(model)
    if model not in EIGENSYSTEM_MODELS:
        raise CapabilityError(f"no closed-form left eigensystem for {model}")
    g, h, u, a1 = p.g, w.h, w.u_m, w.a1
    if model == "swe":
        c = np.sqrt(g * h)
        lam = np.array([u + c, u - c])
        L = np.array([[-(u - c), 1.0],
                      [-(u + c), 1.0]])
        return L, lam
    c = np.sqrt(g * h + a1 ** 2)
    lam = np.array([u + c, u, u - c])
    L = np.array([
        [(c - u) - 4.0 * a1 ** 2 / (3.0 * c), 1.0, 2.0 * a1 / (3.0 * c)],
        [-2.0 * a1, 0.0, 1.0],
        [(-c - u) + 4.0 * a1 ** 2 / (3.0 * c), 1.0, -2.0 * a1 / (3.0 * c)],
    ])
    return L, lam


def velocity_profile(w, zeta):
    """Vertical velocity profile u(zeta) on the scaled water column [0, 1]."""
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta < 0) or np.any(zeta > 1):
        raise ValueError("zeta must lie in [0, 1]")
    u = w.u_m + (1.0 - 2.0 * zeta) * w.a1
    if len(w.alpha) > 1:
        u = u + (6.0 * zeta ** 2 - 6.0 * zeta + 1.0) * w.a2
    return u


# ---------------------------------------------------------------------------
# array-valued variants used by the vectorized reference pipeline and tests
# ---------------------------------------------------------------------------

def flux_arrays(model, g, h, u, a1, a2):
    """flux() broadcast over arrays of primitives; returns (..., m)."""
    check_model(model)
    if model == "swe":
        return np.stack([h * u, h * u ** 2 + 0.5 * g * h ** 2], axis=-1)
    if model == "swme1":
        return np.stack([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0,
                         2.0 * h * u * a1], axis=-1)
    if model == "swme2":
        return np.stack([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0 + h * a2 ** 2 / 5.0,
                         2.0 * h * u * a1 + 0.8 * h * a1 * a2,
                         2.0 * h * u * a2 + 2.0 / 3.0 * h * a1 ** 2 + 2.0 / 7.0 * h * a2 ** 2], axis=-1)
    if model == "hswme2":
        return np.stack([h * u,
                         h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0,
                         2.0 * h * u * a1,
                         2.0 / 3.0 * h * a1 ** 2], axis=-1)
    return np.stack([h * u,
                     h * u ** 2 + 0.5 * g * h ** 2 + h * a1 ** 2 / 3.0 + h * a2 ** 2 / 5.0,
                     2.0 * h * u * a1,
                     2.0 * h * u * a2], axis=-1)


def moment_block_arrays(model, u, a1, a2):
    """Nonzero 2x2 block of B (rows/cols of the moment equations)."""
    check_model(model)
    z = np.zeros_like(u)
    if model in ("swe",):
        raise CapabilityError("swe has no moment block")
    if model == "swme1":
        return u, z, z, z
    if model == "swme2":
        return u - a2 / 5.0, a1 / 5.0, a1, u + a2 / 7.0
    if model == "hswme2":
        return u + z, -0.6 * a1, a1, -u
    return u + z, z, z, u + z


def friction_arrays(model, h, u, a1, a2, lambda_slip):
    """Rows 1..m-1 of the friction vector, broadcast over arrays."""
    check_model(model)
    if model == "swe":
        return (u,)
    if model == "swme1":
        return (u + a1, 3.0 * (u + a1 + 4.0 * lambda_slip / h * a1))
    return (u + a1 + a2,
            3.0 * (u + a1 + a2 + 4.0 * lambda_slip / h * a1),
            5.0 * (u + a1 + a2 + 12.0 * lambda_slip / h * a2))
