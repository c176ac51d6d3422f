"""Matplotlib rendering of steady profiles, perturbations, and convergence."""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import models

MODEL_COLORS = {"swme1": "tab:red", "swlme2": "tab:blue",
                "hswme2": "tab:green", "swme2": "tab:purple", "swe": "tab:orange"}


def _savefig(fig, path):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def steady_profile(path, case, state, x_probe=18.62):
    """Free surface, mean velocity, first moment, and the vertical profile."""
    x = case.mesh.centers()
    b = np.asarray(case.bathy(x), dtype=float)
    U = state.interior
    h = U[:, 0]
    u = U[:, 1] / h
    nm = models.n_moments(case.model)

    fig, axes = plt.subplots(1, 4, figsize=(14, 3.2))
    bscale = np.max(np.abs(b)) or 1.0
    eta = h + b
    span = eta.max() - eta.min() or 1.0
    axes[0].plot(x, eta, "r-", lw=1.2)
    axes[0].plot(x, eta.min() + span * b / (4 * bscale), "k--", lw=0.8)
    axes[0].set_title(r"free surface $\eta$")
    axes[1].plot(x, u, "r-", lw=1.2)
    axes[1].set_title(r"$u_m$")
    if nm >= 1:
        axes[2].plot(x, U[:, 2] / h, "r-", lw=1.2)
    axes[2].set_title(r"$\alpha_1$")
    i = int(np.argmin(np.abs(x - x_probe)))
    w = models.cons_to_prim(case.model, U[i])
    zeta = np.linspace(0.0, 1.0, 101)
    axes[3].plot(models.velocity_profile(w, zeta), zeta, "r-", lw=1.2)
    axes[3].set_title(rf"$u(\zeta)$ at $x={x[i]:.2f}$")
    axes[3].set_ylabel(r"$\zeta$")
    for ax in axes[:3]:
        ax.set_xlabel("x")
    fig.suptitle(f"{case.model}, N={case.mesh.n_cells}")
    return _savefig(fig, path)


def deviation_snapshots(path, case, snapshots, component=0):
    """One panel per snapshot time showing the deviation from equilibrium."""
    x = case.mesh.centers()
    n = len(snapshots)
    fig, axes = plt.subplots(1, n, figsize=(3.4 * n, 3.0), sharey=True)
    axes = np.atleast_1d(axes)
    for ax, (t, dev) in zip(axes, snapshots):
        ax.plot(x, dev[:, component], "-", color="tab:red", lw=1.0)
        ax.set_title(f"t={t:g}")
        ax.set_xlabel("x")
    axes[0].set_ylabel(r"$h-h_{eq}$" if component == 0 else f"dev[{component}]")
    fig.suptitle(f"{case.model}, N={case.mesh.n_cells}")
    return _savefig(fig, path)


def comparison_snapshots(path, results, component=0):
    """Model-overlay deviation panels, one per snapshot time."""
    any_case, _, any_snaps = next(iter(results.values()))
    n = len(any_snaps)
    fig, axes = plt.subplots(1, n, figsize=(3.4 * n, 3.0), sharey=True)
    axes = np.atleast_1d(axes)
    for model, (case, _, snapshots) in results.items():
        x = case.mesh.centers()
        for ax, (t, dev) in zip(axes, snapshots):
            ax.plot(x, dev[:, component], "-", lw=1.0,
                    color=MODEL_COLORS.get(model, "k"), label=model)
    for ax, (t, _) in zip(axes, any_snaps):
        ax.set_title(f"t={t:g}")
        ax.set_xlabel("x")
    axes[0].set_ylabel(r"$h-h_{eq}$" if component == 0 else f"dev[{component}]")
    axes[0].legend(fontsize=8)
    return _savefig(fig, path)


def convergence_plot(path, cfg, rows):
    """log-log error curves with an order-p reference slope."""
    N = np.array([r[0] for r in rows], dtype=float)
    errs = np.array([r[1] for r in rows])
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    labels = ["h", "hu"] + [f"ha{k+1}" for k in range(errs.shape[1] - 2)]
    for c, lab in enumerate(labels):
        ax.loglog(N, errs[:, c], "o-", lw=1.0, ms=3, label=lab)
    anchor = max(errs[0, 0], 1e-16)
    ax.loglog(N, anchor * (N[0] / N) ** cfg.order, "m--", lw=0.8,
              label=f"order {cfg.order}")
    ax.set_xlabel(r"$N_e$")
    ax.set_ylabel(r"$L_2$ error")
    ax.legend(fontsize=8)
    ax.set_title(f"{cfg.scenario}, {cfg.model}, GF-WENO{cfg.order}, {cfg.flux}")
    return _savefig(fig, path)
