"""Compiled hot path: per-stage global-flux pipeline and time-step kernels.

Everything here mirrors the formulas of the pure-numpy modules (models,
weno, global_flux); equivalence is pinned by tests.  Model dispatch uses
integer codes 0..4 = swe, swme1, swme2, hswme2, swlme2.  Hot loops index
scalars directly (no views, no helper calls with array arguments); numba's
call overhead would otherwise dominate.

Error codes returned by the kernels:
    0 ok, 1 nonpositive reconstructed height, 2 complex eigenvalues,
    3 degenerate wave speed, 4 non-finite state.
"""

import numpy as np
from numba import njit

FLUX_CENTRAL = 0
FLUX_UPWIND = 1

ERR_OK = 0
ERR_POSITIVITY = 1
ERR_COMPLEX_EIG = 2
ERR_ZERO_SPEED = 3
ERR_NOT_FINITE = 4


@njit(cache=True)
def fill_ghosts_nb(U, ng, periodic, mask_l, vals_l, mask_r, vals_r):
    C, m = U.shape
    N = C - 2 * ng
    if periodic == 1:
        for k in range(ng):
            for c in range(m):
                U[k, c] = U[N + k, c]
                U[C - ng + k, c] = U[ng + k, c]
        return
    for k in range(ng):
        for c in range(m):
            if mask_l[c]:
                U[k, c] = vals_l[c]
            else:
                U[k, c] = U[ng, c]
            if mask_r[c]:
                U[C - ng + k, c] = vals_r[c]
            else:
                U[C - ng + k, c] = U[ng + N - 1, c]


@njit(cache=True)
def _mblock(model, u, a1, a2):
    if model == 1:
        return u, 0.0, 0.0, 0.0
    if model == 2:
        return u - a2 / 5.0, a1 / 5.0, a1, u + a2 / 7.0
    if model == 3:
        return u, -0.6 * a1, a1, -u
    if model == 4:
        return u, 0.0, 0.0, u
    return 0.0, 0.0, 0.0, 0.0


@njit(cache=True)
def _fric(model, h, u, a1, a2, ls):
    if model == 0:
        return u, 0.0, 0.0
    if model == 1:
        return u + a1, 3.0 * (u + a1 + 4.0 * ls / h * a1), 0.0
    return (u + a1 + a2,
            3.0 * (u + a1 + a2 + 4.0 * ls / h * a1),
            5.0 * (u + a1 + a2 + 12.0 * ls / h * a2))


@njit(cache=True)
def _flux4(model, g, h, u, a1, a2):
    f0 = h * u
    f2 = 0.0
    f3 = 0.0
    if model == 0:
        f1 = h * u * u + 0.5 * g * h * h
    elif model == 1:
        f1 = h * u * u + 0.5 * g * h * h + h * a1 * a1 / 3.0
        f2 = 2.0 * h * u * a1
    elif model == 2:
        f1 = h * u * u + 0.5 * g * h * h + h * a1 * a1 / 3.0 + h * a2 * a2 / 5.0
        f2 = 2.0 * h * u * a1 + 0.8 * h * a1 * a2
        f3 = 2.0 * h * u * a2 + (2.0 / 3.0) * h * a1 * a1 + (2.0 / 7.0) * h * a2 * a2
    elif model == 3:
        f1 = h * u * u + 0.5 * g * h * h + h * a1 * a1 / 3.0
        f2 = 2.0 * h * u * a1
        f3 = (2.0 / 3.0) * h * a1 * a1
    else:
        f1 = h * u * u + 0.5 * g * h * h + h * a1 * a1 / 3.0 + h * a2 * a2 / 5.0
        f2 = 2.0 * h * u * a1
        f3 = 2.0 * h * u * a2
    return f0, f1, f2, f3


@njit(cache=True)
def _amat(model, g, h, u, a1, a2, A):
    m = A.shape[0]
    for i in range(m):
        for j in range(m):
            A[i, j] = 0.0
    A[0, 1] = 1.0
    if model == 0:
        A[1, 0] = g * h - u * u
        A[1, 1] = 2.0 * u
    elif model == 1:
        A[1, 0] = g * h - u * u - a1 * a1 / 3.0
        A[1, 1] = 2.0 * u
        A[1, 2] = 2.0 * a1 / 3.0
        A[2, 0] = -2.0 * u * a1
        A[2, 1] = 2.0 * a1
        A[2, 2] = u
    elif model == 2:
        A[1, 0] = g * h - u * u - a1 * a1 / 3.0 - a2 * a2 / 5.0
        A[1, 1] = 2.0 * u
        A[1, 2] = 2.0 * a1 / 3.0
        A[1, 3] = 2.0 * a2 / 5.0
        A[2, 0] = -2.0 * u * a1 - 0.8 * a1 * a2
        A[2, 1] = 2.0 * a1
        A[2, 2] = u + a2
        A[2, 3] = 0.6 * a1
        A[3, 0] = -2.0 * u * a2 - (2.0 / 3.0) * a1 * a1 - (2.0 / 7.0) * a2 * a2
        A[3, 1] = 2.0 * a2
        A[3, 2] = a1 / 3.0
        A[3, 3] = u + 3.0 * a2 / 7.0
    elif model == 3:
        A[1, 0] = g * h - u * u - a1 * a1 / 3.0
        A[1, 1] = 2.0 * u
        A[1, 2] = 2.0 * a1 / 3.0
        A[2, 0] = -2.0 * u * a1
        A[2, 1] = 2.0 * a1
        A[2, 2] = u
        A[2, 3] = 0.6 * a1
        A[3, 0] = -(2.0 / 3.0) * a1 * a1
        A[3, 2] = a1 / 3.0
        A[3, 3] = u
    else:
        A[1, 0] = g * h - u * u - a1 * a1 / 3.0 - a2 * a2 / 5.0
        A[1, 1] = 2.0 * u
        A[1, 2] = 2.0 * a1 / 3.0
        A[1, 3] = 2.0 * a2 / 5.0
        A[2, 0] = -2.0 * u * a1
        A[2, 1] = 2.0 * a1
        A[2, 2] = u
        A[3, 0] = -2.0 * u * a2
        A[3, 1] = 2.0 * a2
        A[3, 3] = u


@njit(cache=True)
def _wave_speed(model, g, h, u, a1, a2, A):
    """Spectral radius of A; returns (lam, err).  A is scratch for model 2."""
    if model == 2:
        _amat(model, g, h, u, a1, a2, A)
        ev = np.linalg.eigvals(A)
        mx = 0.0
        scale = 1.0
        for k in range(ev.shape[0]):
            if abs(ev[k].real) > scale:
                scale = abs(ev[k].real)
        for k in range(ev.shape[0]):
            if abs(ev[k].imag) > 1e-9 * scale:
                return 0.0, ERR_COMPLEX_EIG
            if abs(ev[k]) > mx:
                mx = abs(ev[k])
        return mx, ERR_OK
    if model == 0:
        c = np.sqrt(g * h)
    elif model == 1 or model == 3:
        c = np.sqrt(g * h + a1 * a1)
    else:
        c = np.sqrt(g * h + a1 * a1 + 0.6 * a2 * a2)
    mx = abs(u + c)
    if abs(u - c) > mx:
        mx = abs(u - c)
    return mx, ERR_OK


@njit(cache=True)
def _upwind_flux(model, g, h, u, a1, GL, GR, Ghat, k):
    """Characteristic upwind selection of the global flux at interface row k."""
    if model == 0:
        c = np.sqrt(g * h)
        lam0 = u + c
        lam1 = u - c
        g00 = GL[k, 0] if lam0 >= 0.0 else GR[k, 0]
        g01 = GL[k, 1] if lam0 >= 0.0 else GR[k, 1]
        g10 = GL[k, 0] if lam1 >= 0.0 else GR[k, 0]
        g11 = GL[k, 1] if lam1 >= 0.0 else GR[k, 1]
        # left eigenvector rows (-(other lam), 1); solve L x = w by Cramer
        w0 = -lam1 * g00 + g01
        w1 = -lam0 * g10 + g11
        det = lam0 - lam1
        Ghat[k, 0] = (w0 - w1) / det
        Ghat[k, 1] = (lam0 * w0 - lam1 * w1) / det
        return ERR_OK
    c = np.sqrt(g * h + a1 * a1)
    lam0 = u + c
    lam1 = u
    lam2 = u - c
    l00 = (c - u) - 4.0 * a1 * a1 / (3.0 * c)
    l02 = 2.0 * a1 / (3.0 * c)
    l10 = -2.0 * a1
    l20 = (-c - u) + 4.0 * a1 * a1 / (3.0 * c)
    l22 = -2.0 * a1 / (3.0 * c)
    # L = [[l00, 1, l02], [l10, 0, 1], [l20, 1, l22]]
    if lam0 >= 0.0:
        w0 = l00 * GL[k, 0] + GL[k, 1] + l02 * GL[k, 2]
    else:
        w0 = l00 * GR[k, 0] + GR[k, 1] + l02 * GR[k, 2]
    if lam1 >= 0.0:
        w1 = l10 * GL[k, 0] + GL[k, 2]
    else:
        w1 = l10 * GR[k, 0] + GR[k, 2]
    if lam2 >= 0.0:
        w2 = l20 * GL[k, 0] + GL[k, 1] + l22 * GL[k, 2]
    else:
        w2 = l20 * GR[k, 0] + GR[k, 1] + l22 * GR[k, 2]
    det = (l00 * (0.0 * l22 - 1.0)
           - 1.0 * (l10 * l22 - 1.0 * l20)
           + l02 * (l10 * 1.0 - 0.0 * l20))
    if det == 0.0:
        return ERR_ZERO_SPEED
    x0 = (w0 * (0.0 * l22 - 1.0)
          - 1.0 * (w1 * l22 - 1.0 * w2)
          + l02 * (w1 * 1.0 - 0.0 * w2)) / det
    x1 = (l00 * (w1 * l22 - w2 * 1.0)
          - w0 * (l10 * l22 - 1.0 * l20)
          + l02 * (l10 * w2 - w1 * l20)) / det
    x2 = (l00 * (0.0 * w2 - 1.0 * w1)
          - 1.0 * (l10 * w2 - w1 * l20)
          + w0 * (l10 * 1.0 - 0.0 * l20)) / det
    Ghat[k, 0] = x0
    Ghat[k, 1] = x1
    Ghat[k, 2] = x2
    return ERR_OK


@njit(cache=True)
def pipeline_nb(U, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                wq, Dphys, Rmat, Rfull, ellL, ellR,
                cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                eps, nodal_nonlinear):
    """One evaluation of the semidiscrete right-hand side, with all layers.

    Returns (dUdt, Unod, eta_nod, b_nod, trL, trR, etaL, etaR, bL, bR,
    W, incr, jump, RstartL, RL, RR, Rnod, Gbar, GL, GR, Ghat, err, erri).
    """
    C, m = U.shape
    N = C - 2 * ng
    nq = wq.shape[0]
    r = cand_n.shape[1]
    nif = N + 1

    Unod = np.zeros((C, nq, m))
    eta_nod = np.zeros((C, nq))
    b_nod = np.zeros((C, nq))
    trL = np.zeros((C, m))
    trR = np.zeros((C, m))
    etaL = np.zeros(C)
    etaR = np.zeros(C)
    bL = np.zeros(C)
    bR = np.zeros(C)
    W = np.zeros((C, nq, m))
    Fn = np.zeros((C, nq, m))
    incr = np.zeros((C, m))
    jump = np.zeros((C - 1, m))
    RstartL = np.zeros((C, m))
    RL = np.zeros((C - 1, m))
    RR = np.zeros((C - 1, m))
    Rnod = np.zeros((C, nq, m))
    Gbar = np.zeros((C, m))
    GL = np.zeros((nif, m))
    GR = np.zeros((nif, m))
    Ghat = np.zeros((nif, m))
    dUdt = np.zeros((N, m))
    err = ERR_OK
    erri = -1

    etabar = np.empty(C)
    for j in range(C):
        etabar[j] = U[j, 0] + bbar[j]

    beta = np.empty(r)
    wpos = np.empty(r)
    wneg = np.empty(r)

    # --- reconstruction at quadrature nodes, plus edge traces ---
    for j in range(C):
        full = (j >= r - 1) and (j <= C - r)
        if full:
            lo = j - (r - 1)
            # pass c = 0 reconstructs eta and b (b reuses eta's weights),
            # passes c >= 1 the conserved components with their own weights
            for c in range(m):
                if r == 2:
                    if c == 0:
                        beta[0] = (etabar[lo + 1] - etabar[lo]) ** 2
                        beta[1] = (etabar[lo + 2] - etabar[lo + 1]) ** 2
                    else:
                        beta[0] = (U[lo + 1, c] - U[lo, c]) ** 2
                        beta[1] = (U[lo + 2, c] - U[lo + 1, c]) ** 2
                elif r == 3:
                    if c == 0:
                        w0 = etabar[lo]
                        w1 = etabar[lo + 1]
                        w2 = etabar[lo + 2]
                        w3 = etabar[lo + 3]
                        w4 = etabar[lo + 4]
                    else:
                        w0 = U[lo, c]
                        w1 = U[lo + 1, c]
                        w2 = U[lo + 2, c]
                        w3 = U[lo + 3, c]
                        w4 = U[lo + 4, c]
                    beta[0] = 13.0 / 12.0 * (w0 - 2.0 * w1 + w2) ** 2 \
                        + 0.25 * (w0 - 4.0 * w1 + 3.0 * w2) ** 2
                    beta[1] = 13.0 / 12.0 * (w1 - 2.0 * w2 + w3) ** 2 \
                        + 0.25 * (w1 - w3) ** 2
                    beta[2] = 13.0 / 12.0 * (w2 - 2.0 * w3 + w4) ** 2 \
                        + 0.25 * (3.0 * w2 - 4.0 * w3 + w4) ** 2
                else:
                    beta[0] = 0.0
                for q in range(nq):
                    sgn = sign_n[q]
                    if nodal_nonlinear == 1:
                        s = 0.0
                        for mm in range(r):
                            t = dpos_n[q, mm] / (eps + beta[mm]) ** 2
                            wpos[mm] = t
                            s += t
                        for mm in range(r):
                            wpos[mm] /= s
                        if sgn > 0.0:
                            s = 0.0
                            for mm in range(r):
                                t = dneg_n[q, mm] / (eps + beta[mm]) ** 2
                                wneg[mm] = t
                                s += t
                            for mm in range(r):
                                wneg[mm] /= s
                    else:
                        for mm in range(r):
                            wpos[mm] = dpos_n[q, mm]
                            wneg[mm] = dneg_n[q, mm]
                    if c == 0:
                        pe = 0.0
                        ne = 0.0
                        pb = 0.0
                        nb = 0.0
                        for mm in range(r):
                            pve = 0.0
                            pvb = 0.0
                            for jj in range(r):
                                cf = cand_n[q, mm, jj]
                                pve += cf * etabar[lo + mm + jj]
                                pvb += cf * bbar[lo + mm + jj]
                            pe += wpos[mm] * pve
                            pb += wpos[mm] * pvb
                            if sgn > 0.0:
                                ne += wneg[mm] * pve
                                nb += wneg[mm] * pvb
                        eta_nod[j, q] = sigp_n[q] * pe - sgn * ne
                        b_nod[j, q] = sigp_n[q] * pb - sgn * nb
                    else:
                        pv = 0.0
                        nv = 0.0
                        for mm in range(r):
                            cv = 0.0
                            for jj in range(r):
                                cv += cand_n[q, mm, jj] * U[lo + mm + jj, c]
                            pv += wpos[mm] * cv
                            if sgn > 0.0:
                                nv += wneg[mm] * cv
                        Unod[j, q, c] = sigp_n[q] * pv - sgn * nv
        else:
            for q in range(nq):
                eta_nod[j, q] = etabar[j]
                b_nod[j, q] = bbar[j]
                for c in range(1, m):
                    Unod[j, q, c] = U[j, c]
        for q in range(nq):
            h = eta_nod[j, q] - b_nod[j, q]
            if h <= 0.0:
                if err == ERR_OK:
                    err = ERR_POSITIVITY
                    erri = j
                h = 1e-300
            Unod[j, q, 0] = h
        for c in range(m):
            sL = 0.0
            sR = 0.0
            for q in range(nq):
                sL += ellL[q] * Unod[j, q, c]
                sR += ellR[q] * Unod[j, q, c]
            trL[j, c] = sL
            trR[j, c] = sR
        sL = 0.0
        sR = 0.0
        tL = 0.0
        tR = 0.0
        for q in range(nq):
            sL += ellL[q] * eta_nod[j, q]
            sR += ellR[q] * eta_nod[j, q]
            tL += ellL[q] * b_nod[j, q]
            tR += ellR[q] * b_nod[j, q]
        etaL[j] = sL
        etaR[j] = sR
        bL[j] = tL
        bR[j] = tR
    if err != ERR_OK:
        return (dUdt, Unod, eta_nod, b_nod, trL, trR, etaL, etaR, bL, bR,
                W, incr, jump, RstartL, RL, RR, Rnod, Gbar, GL, GR, Ghat, err, erri)

    # --- nodal flux and quadratured part of the R-integrand ---
    for j in range(C):
        for q in range(nq):
            h = Unod[j, q, 0]
            u = Unod[j, q, 1] / h
            a1 = Unod[j, q, 2] / h if m > 2 else 0.0
            a2 = Unod[j, q, 3] / h if m > 3 else 0.0
            f0, f1, f2, f3 = _flux4(model, g, h, u, a1, a2)
            Fn[j, q, 0] = f0
            Fn[j, q, 1] = f1
            if m > 2:
                Fn[j, q, 2] = f2
            if m > 3:
                Fn[j, q, 3] = f3
            dbdx = 0.0
            for s in range(nq):
                dbdx += Dphys[q, s] * b_nod[j, s]
            W[j, q, 1] = g * eta_nod[j, q] * dbdx
            if nuol > 0.0:
                p2, p3, p4 = _fric(model, h, u, a1, a2, lam_slip)
                W[j, q, 1] += nuol * p2
                if m > 2:
                    W[j, q, 2] += nuol * p3
                if m > 3:
                    W[j, q, 3] += nuol * p4
            if m > 2:
                b33, b34, b43, b44 = _mblock(model, u, a1, a2)
                du3 = 0.0
                du4 = 0.0
                for s in range(nq):
                    du3 += Dphys[q, s] * Unod[j, s, 2]
                    if m > 3:
                        du4 += Dphys[q, s] * Unod[j, s, 3]
                W[j, q, 2] -= b33 * du3 + b34 * du4
                if m > 3:
                    W[j, q, 3] -= b43 * du3 + b44 * du4

    # --- per-cell increments and interface jumps of R ---
    for j in range(C):
        for c in range(m):
            s = 0.0
            for q in range(nq):
                s += Rfull[q] * W[j, q, c]
            incr[j, c] = s
        incr[j, 1] -= 0.5 * g * (bR[j] * bR[j] - bL[j] * bL[j])
    for j in range(C - 1):
        jump[j, 1] = 0.5 * g * (etaR[j] + etaL[j + 1]) * (bL[j + 1] - bR[j]) \
            - 0.5 * g * (bL[j + 1] * bL[j + 1] - bR[j] * bR[j])
        if m > 2:
            hl = trR[j, 0]
            hr = trL[j + 1, 0]
            ul = trR[j, 1] / hl
            ur = trL[j + 1, 1] / hr
            a1l = trR[j, 2] / hl
            a1r = trL[j + 1, 2] / hr
            a2l = trR[j, 3] / hl if m > 3 else 0.0
            a2r = trL[j + 1, 3] / hr if m > 3 else 0.0
            b33l, b34l, b43l, b44l = _mblock(model, ul, a1l, a2l)
            b33r, b34r, b43r, b44r = _mblock(model, ur, a1r, a2r)
            d3 = trL[j + 1, 2] - trR[j, 2]
            d4 = (trL[j + 1, 3] - trR[j, 3]) if m > 3 else 0.0
            jump[j, 2] = -(0.5 * (b33l + b33r) * d3 + 0.5 * (b34l + b34r) * d4)
            if m > 3:
                jump[j, 3] = -(0.5 * (b43l + b43r) * d3 + 0.5 * (b44l + b44r) * d4)

    # --- left-to-right scan of R across cells and interfaces ---
    acc = np.zeros(m)
    for j in range(C):
        for c in range(m):
            RstartL[j, c] = acc[c]
        if j < C - 1:
            for c in range(m):
                RL[j, c] = acc[c] + incr[j, c]
                RR[j, c] = RL[j, c] + jump[j, c]
                acc[c] = RR[j, c]

    # --- R at nodes and cell averages of the global flux ---
    for j in range(C):
        for q in range(nq):
            for c in range(m):
                s = RstartL[j, c]
                for t in range(nq):
                    s += Rmat[q, t] * W[j, t, c]
                Rnod[j, q, c] = s
            Rnod[j, q, 1] -= 0.5 * g * (b_nod[j, q] * b_nod[j, q] - bL[j] * bL[j])
        for c in range(m):
            s = 0.0
            for q in range(nq):
                s += wq[q] * (Fn[j, q, c] + Rnod[j, q, c])
            Gbar[j, c] = s

    # --- WENO reconstruction of Gbar at the flux interfaces ---
    # interface k separates cells jl = ng-1+k and jl+1; GL is the right-edge
    # value in cell jl (edge-table point 1), GR the left-edge value in jl+1
    for k in range(nif):
        jl = ng - 1 + k
        for c in range(m):
            for side in range(2):
                base = jl - (r - 1) + side
                pt = 1 - side
                if r == 2:
                    beta[0] = (Gbar[base + 1, c] - Gbar[base, c]) ** 2
                    beta[1] = (Gbar[base + 2, c] - Gbar[base + 1, c]) ** 2
                elif r == 3:
                    w0 = Gbar[base, c]
                    w1 = Gbar[base + 1, c]
                    w2 = Gbar[base + 2, c]
                    w3 = Gbar[base + 3, c]
                    w4 = Gbar[base + 4, c]
                    beta[0] = 13.0 / 12.0 * (w0 - 2.0 * w1 + w2) ** 2 \
                        + 0.25 * (w0 - 4.0 * w1 + 3.0 * w2) ** 2
                    beta[1] = 13.0 / 12.0 * (w1 - 2.0 * w2 + w3) ** 2 \
                        + 0.25 * (w1 - w3) ** 2
                    beta[2] = 13.0 / 12.0 * (w2 - 2.0 * w3 + w4) ** 2 \
                        + 0.25 * (3.0 * w2 - 4.0 * w3 + w4) ** 2
                else:
                    beta[0] = 0.0
                s = 0.0
                for mm in range(r):
                    t = dpos_e[pt, mm] / (eps + beta[mm]) ** 2
                    wpos[mm] = t
                    s += t
                val = 0.0
                for mm in range(r):
                    cv = 0.0
                    for jj in range(r):
                        cv += cand_e[pt, mm, jj] * Gbar[base + mm + jj, c]
                    val += (wpos[mm] / s) * cv
                if side == 0:
                    GL[k, c] = val
                else:
                    GR[k, c] = val

    # --- numerical global flux ---
    A = np.empty((m, m))
    for k in range(nif):
        jl = ng - 1 + k
        hl = trR[jl, 0]
        hr = trL[jl + 1, 0]
        hs = 0.5 * (hl + hr)
        us = 0.5 * (trR[jl, 1] / hl + trL[jl + 1, 1] / hr)
        a1s = 0.5 * (trR[jl, 2] / hl + trL[jl + 1, 2] / hr) if m > 2 else 0.0
        a2s = 0.5 * (trR[jl, 3] / hl + trL[jl + 1, 3] / hr) if m > 3 else 0.0
        if flux_kind == FLUX_UPWIND:
            e = _upwind_flux(model, g, hs, us, a1s, GL, GR, Ghat, k)
            if e != ERR_OK and err == ERR_OK:
                err = e
                erri = jl
        else:
            lam, e = _wave_speed(model, g, hs, us, a1s, a2s, A)
            if e != ERR_OK or lam <= 0.0:
                if err == ERR_OK:
                    err = e if e != ERR_OK else ERR_ZERO_SPEED
                    erri = jl
                continue
            _amat(model, g, hs, us, a1s, a2s, A)
            for row in range(m):
                s = 0.0
                for c in range(m):
                    s += A[row, c] * (GR[k, c] - GL[k, c])
                Ghat[k, row] = 0.5 * (GL[k, row] + GR[k, row]) - s / lam

    if err == ERR_OK:
        for i in range(N):
            for c in range(m):
                dUdt[i, c] = -(Ghat[i + 1, c] - Ghat[i, c]) / dx

    return (dUdt, Unod, eta_nod, b_nod, trL, trR, etaL, etaR, bL, bR,
            W, incr, jump, RstartL, RL, RR, Rnod, Gbar, GL, GR, Ghat, err, erri)


@njit(cache=True)
def max_wave_speed_nb(U, ng, model, g):
    """Largest spectral radius over the interior cell averages."""
    C, m = U.shape
    A = np.empty((m, m))
    mx = 0.0
    for j in range(ng, C - ng):
        h = U[j, 0]
        if h <= 0.0:
            return 0.0, ERR_POSITIVITY, j
        u = U[j, 1] / h
        a1 = U[j, 2] / h if m > 2 else 0.0
        a2 = U[j, 3] / h if m > 3 else 0.0
        lam, e = _wave_speed(model, g, h, u, a1, a2, A)
        if e != ERR_OK:
            return 0.0, e, j
        if lam > mx:
            mx = lam
    return mx, ERR_OK, -1


@njit(cache=True)
def _rhs(U, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
         wq, Dphys, Rmat, Rfull, ellL, ellR,
         cand_n, dpos_n, dneg_n, sigp_n, sign_n,
         cand_e, dpos_e, dneg_e, sigp_e, sign_e,
         eps, nodal_nonlinear,
         periodic, mask_l, vals_l, mask_r, vals_r):
    fill_ghosts_nb(U, ng, periodic, mask_l, vals_l, mask_r, vals_r)
    out = pipeline_nb(U, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                      wq, Dphys, Rmat, Rfull, ellL, ellR,
                      cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                      cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                      eps, nodal_nonlinear)
    return out[0], out[21], out[22]


@njit(cache=True)
def step_nb(U, bbar, dt, integrator, dx, ng, g, nuol, lam_slip, model, flux_kind,
            wq, Dphys, Rmat, Rfull, ellL, ellR,
            cand_n, dpos_n, dneg_n, sigp_n, sign_n,
            cand_e, dpos_e, dneg_e, sigp_e, sign_e,
            eps, nodal_nonlinear,
            periodic, mask_l, vals_l, mask_r, vals_r):
    """One explicit step (integrator 0 = SSPRK3, 1 = classical RK4).

    Returns (Unew, residual of the first stage, err, erri).  Ghost cells of
    the input state are filled as a side effect.
    """
    C, m = U.shape
    N = C - 2 * ng
    k1, err, erri = _rhs(U, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                         wq, Dphys, Rmat, Rfull, ellL, ellR,
                         cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                         cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                         eps, nodal_nonlinear,
                         periodic, mask_l, vals_l, mask_r, vals_r)
    resid = 0.0
    for i in range(N):
        for c in range(m):
            if abs(k1[i, c]) > resid:
                resid = abs(k1[i, c])
    Unew = U.copy()
    if err != ERR_OK:
        return Unew, resid, err, erri

    if integrator == 0:
        U1 = U.copy()
        for i in range(N):
            for c in range(m):
                U1[ng + i, c] = U[ng + i, c] + dt * k1[i, c]
        k2, err, erri = _rhs(U1, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                             wq, Dphys, Rmat, Rfull, ellL, ellR,
                             cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                             cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                             eps, nodal_nonlinear,
                             periodic, mask_l, vals_l, mask_r, vals_r)
        if err != ERR_OK:
            return Unew, resid, err, erri
        U2 = U.copy()
        for i in range(N):
            for c in range(m):
                U2[ng + i, c] = 0.75 * U[ng + i, c] + 0.25 * (U1[ng + i, c] + dt * k2[i, c])
        k3, err, erri = _rhs(U2, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                             wq, Dphys, Rmat, Rfull, ellL, ellR,
                             cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                             cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                             eps, nodal_nonlinear,
                             periodic, mask_l, vals_l, mask_r, vals_r)
        if err != ERR_OK:
            return Unew, resid, err, erri
        for i in range(N):
            for c in range(m):
                Unew[ng + i, c] = (U[ng + i, c]
                                   + 2.0 * (U2[ng + i, c] + dt * k3[i, c])) / 3.0
    else:
        U1 = U.copy()
        for i in range(N):
            for c in range(m):
                U1[ng + i, c] = U[ng + i, c] + 0.5 * dt * k1[i, c]
        k2, err, erri = _rhs(U1, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                             wq, Dphys, Rmat, Rfull, ellL, ellR,
                             cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                             cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                             eps, nodal_nonlinear,
                             periodic, mask_l, vals_l, mask_r, vals_r)
        if err != ERR_OK:
            return Unew, resid, err, erri
        U2 = U.copy()
        for i in range(N):
            for c in range(m):
                U2[ng + i, c] = U[ng + i, c] + 0.5 * dt * k2[i, c]
        k3, err, erri = _rhs(U2, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                             wq, Dphys, Rmat, Rfull, ellL, ellR,
                             cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                             cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                             eps, nodal_nonlinear,
                             periodic, mask_l, vals_l, mask_r, vals_r)
        if err != ERR_OK:
            return Unew, resid, err, erri
        U3 = U.copy()
        for i in range(N):
            for c in range(m):
                U3[ng + i, c] = U[ng + i, c] + dt * k3[i, c]
        k4, err, erri = _rhs(U3, bbar, dx, ng, g, nuol, lam_slip, model, flux_kind,
                             wq, Dphys, Rmat, Rfull, ellL, ellR,
                             cand_n, dpos_n, dneg_n, sigp_n, sign_n,
                             cand_e, dpos_e, dneg_e, sigp_e, sign_e,
                             eps, nodal_nonlinear,
                             periodic, mask_l, vals_l, mask_r, vals_r)
        if err != ERR_OK:
            return Unew, resid, err, erri
        for i in range(N):
            for c in range(m):
                Unew[ng + i, c] = U[ng + i, c] + dt / 6.0 * (
                    k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + k4[i, c])

    for i in range(N):
        for c in range(m):
            if not np.isfinite(Unew[ng + i, c]):
                return Unew, resid, ERR_NOT_FINITE, ng + i
    return Unew, resid, err, erri
