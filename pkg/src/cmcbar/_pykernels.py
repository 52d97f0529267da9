"""Pure-Python/numpy kernels, used when the compiled extension is unavailable.

Stencil layout shared with the compiled version: ``jac[i, j, k]`` is the
derivative of the residual at node ``(i, j)`` with respect to
``u[i + di, j + dj]`` where ``k = 3 * (di + 1) + (dj + 1)``.
"""
import math

import numpy as np


def _tflux(a, b, gf):
    q = b / gf
    W = np.sqrt(1.0 + a * a + q * q)
    W3 = W**3
    return gf * a / W, gf * (1.0 + q * q) / W3, -a * q / W3


def _xflux(a, b, gn):
    p = a / gn
    W = np.sqrt(1.0 + b * b + p * p)
    W3 = W**3
    return p / W, (1.0 + b * b) / (gn * W3), -p * b / W3


def flux_stencil(u, ht, hx, g_tface, g_node, H):
    nt, nx = u.shape
    res = np.zeros((nt, nx))
    jac = np.zeros((nt, nx, 9))
    qt, qx = 0.25 / hx, 0.25 / ht
    g = g_node[1:-1, None]
    ct, cx = 1.0 / (g * ht), 1.0 / (g * hx)

    # t-faces between rows i and i+1, columns 1..nx-2
    a = (u[1:, 1:-1] - u[:-1, 1:-1]) / ht
    b = (u[:-1, 2:] + u[1:, 2:] - u[:-1, :-2] - u[1:, :-2]) * qt
    F, Fa, Fb = _tflux(a, b, g_tface[:, None])
    up, dn = slice(1, None), slice(None, -1)
    R = ct * (F[up] - F[dn])
    J = jac[1:-1, 1:-1]
    A_up, B_up = ct * Fa[up] / ht, ct * Fb[up] * qt
    A_dn, B_dn = ct * Fa[dn] / ht, ct * Fb[dn] * qt
    J[..., 7] += A_up
    J[..., 4] -= A_up + A_dn
    J[..., 1] += A_dn
    J[..., 5] += B_up - B_dn
    J[..., 8] += B_up
    J[..., 3] -= B_up - B_dn
    J[..., 6] -= B_up
    J[..., 2] -= B_dn
    J[..., 0] += B_dn

    # x-faces between columns j and j+1, rows 1..nt-2
    a = (u[1:-1, 1:] - u[1:-1, :-1]) / hx
    b = (u[2:, :-1] + u[2:, 1:] - u[:-2, :-1] - u[:-2, 1:]) * qx
    F, Fa, Fb = _xflux(a, b, g_node[1:-1, None])
    rt, lf = (slice(None), slice(1, None)), (slice(None), slice(None, -1))
    R += cx * (F[rt] - F[lf])
    A_rt, B_rt = cx * Fa[rt] / hx, cx * Fb[rt] * qx
    A_lf, B_lf = cx * Fa[lf] / hx, cx * Fb[lf] * qx
    J[..., 5] += A_rt
    J[..., 4] -= A_rt + A_lf
    J[..., 3] += A_lf
    J[..., 7] += B_rt - B_lf
    J[..., 8] += B_rt
    J[..., 1] -= B_rt - B_lf
    J[..., 2] -= B_rt
    J[..., 6] -= B_lf
    J[..., 0] += B_lf

    res[1:-1, 1:-1] = R + 2.0 * H
    return res, jac


def _rhs(polar, squared, H, p, s, w):
    if squared:
        d, jacobian = s * s, 2.0 * s
    else:
        d, jacobian = s, 1.0
    curv = 1.0 / math.tanh(p + d) if polar else math.tanh(p + d)
    return (jacobian * (2.0 * H + (1.0 - w) * curv),
            jacobian * (1.0 - w) / math.sqrt(w * (2.0 - w)))


def _step(polar, squared, H, p, s, w, u, h):
    k1w, k1u = _rhs(polar, squared, H, p, s, w)
    k2w, k2u = _rhs(polar, squared, H, p, s + 0.5 * h, w + 0.5 * h * k1w)
    k3w, k3u = _rhs(polar, squared, H, p, s + 0.5 * h, w + 0.5 * h * k2w)
    k4w, k4u = _rhs(polar, squared, H, p, s + h, w + h * k3w)
    return (w + h * (k1w + 2 * k2w + 2 * k3w + k4w) / 6.0,
            u + h * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0)


def rk4_flux(polar, H, p, s0, w0, u0, h, s_end, squared, stop_at_top):
    S, Wv, U = [s0], [w0], [u0]
    s, w, u = s0, w0, u0
    n = int((s_end - s0) / h) + 2
    while s < s_end - 1e-14 and len(S) < n:
        hh = h if s + h <= s_end else s_end - s
        wn, un = _step(polar, squared, H, p, s, w, u, hh)
        if stop_at_top and wn >= 1.0:
            ha, wa, hb, wb = 0.0, w - 1.0, hh, wn - 1.0
            for _ in range(60):
                if wb == wa:
                    break
                hc = hb - wb * (hb - ha) / (wb - wa)
                if hc <= 0.0 or hc > hh:
                    hc = 0.5 * (ha + hb)
                wn, un = _step(polar, squared, H, p, s, w, u, hc)
                ha, wa, hb, wb = hb, wb, hc, wn - 1.0
                if -1e-15 < wb < 1e-15:
                    break
            S.append(s + hb)
            Wv.append(wn)
            U.append(un)
            break
        s, w, u = s + hh, wn, un
        S.append(s)
        Wv.append(w)
        U.append(u)
    return np.array(S), np.array(Wv), np.array(U)
