# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same contract as :mod:`cmcbar._pykernels`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, tanh

cnp.import_array()


cdef inline void _tflux(double a, double b, double gf, double* F, double* Fa, double* Fb) noexcept nogil:
    cdef double q = b / gf
    cdef double W = sqrt(1.0 + a * a + q * q)
    cdef double W3 = W * W * W
    F[0] = gf * a / W
    Fa[0] = gf * (1.0 + q * q) / W3
    Fb[0] = -a * q / W3


cdef inline void _xflux(double a, double b, double gn, double* F, double* Fa, double* Fb) noexcept nogil:
    cdef double p = a / gn
    cdef double W = sqrt(1.0 + b * b + p * p)
    cdef double W3 = W * W * W
    F[0] = p / W
    Fa[0] = (1.0 + b * b) / (gn * W3)
    Fb[0] = -p * b / W3


def flux_stencil(double[:, ::1] u, double ht, double hx, double[::1] g_tface,
                 double[::1] g_node, double H):
    cdef Py_ssize_t nt = u.shape[0], nx = u.shape[1]
    res_arr = np.zeros((nt, nx))
    jac_arr = np.zeros((nt, nx, 9))
    cdef double[:, ::1] res = res_arr
    cdef double[:, :, ::1] jac = jac_arr
    cdef Py_ssize_t i, j
    cdef double g, ct, cx, a, b, F, Fa, Fb, qt = 0.25 / hx, qx = 0.25 / ht
    with nogil:
        for i in range(1, nt - 1):
            g = g_node[i]
            ct = 1.0 / (g * ht)
            cx = 1.0 / (g * hx)
            for j in range(1, nx - 1):
                # t-face (i, i+1)
                a = (u[i + 1, j] - u[i, j]) / ht
                b = (u[i, j + 1] + u[i + 1, j + 1] - u[i, j - 1] - u[i + 1, j - 1]) * qt
                _tflux(a, b, g_tface[i], &F, &Fa, &Fb)
                res[i, j] += ct * F
                jac[i, j, 7] += ct * Fa / ht
                jac[i, j, 4] -= ct * Fa / ht
                jac[i, j, 5] += ct * Fb * qt
                jac[i, j, 8] += ct * Fb * qt
                jac[i, j, 3] -= ct * Fb * qt
                jac[i, j, 6] -= ct * Fb * qt
                # t-face (i-1, i)
                a = (u[i, j] - u[i - 1, j]) / ht
                b = (u[i - 1, j + 1] + u[i, j + 1] - u[i - 1, j - 1] - u[i, j - 1]) * qt
                _tflux(a, b, g_tface[i - 1], &F, &Fa, &Fb)
                res[i, j] -= ct * F
                jac[i, j, 4] -= ct * Fa / ht
                jac[i, j, 1] += ct * Fa / ht
                jac[i, j, 2] -= ct * Fb * qt
                jac[i, j, 5] -= ct * Fb * qt
                jac[i, j, 0] += ct * Fb * qt
                jac[i, j, 3] += ct * Fb * qt
                # x-face (j, j+1)
                a = (u[i, j + 1] - u[i, j]) / hx
                b = (u[i + 1, j] + u[i + 1, j + 1] - u[i - 1, j] - u[i - 1, j + 1]) * qx
                _xflux(a, b, g, &F, &Fa, &Fb)
                res[i, j] += cx * F
                jac[i, j, 5] += cx * Fa / hx
                jac[i, j, 4] -= cx * Fa / hx
                jac[i, j, 7] += cx * Fb * qx
                jac[i, j, 8] += cx * Fb * qx
                jac[i, j, 1] -= cx * Fb * qx
                jac[i, j, 2] -= cx * Fb * qx
                # x-face (j-1, j)
                a = (u[i, j] - u[i, j - 1]) / hx
                b = (u[i + 1, j - 1] + u[i + 1, j] - u[i - 1, j - 1] - u[i - 1, j]) * qx
                _xflux(a, b, g, &F, &Fa, &Fb)
                res[i, j] -= cx * F
                jac[i, j, 4] -= cx * Fa / hx
                jac[i, j, 3] += cx * Fa / hx
                jac[i, j, 6] -= cx * Fb * qx
                jac[i, j, 7] -= cx * Fb * qx
                jac[i, j, 0] += cx * Fb * qx
                jac[i, j, 1] += cx * Fb * qx
                res[i, j] += 2.0 * H
    return res_arr, jac_arr


cdef inline double _curv(int polar, double x) noexcept nogil:
    if polar:
        return 1.0 / tanh(x)
    return tanh(x)


cdef inline void _rhs(int polar, int squared, double H, double p, double s,
                      double w, double* dw, double* du) noexcept nogil:
    cdef double d, jacobian
    if squared:
        d = s * s
        jacobian = 2.0 * s
    else:
        d = s
        jacobian = 1.0
    dw[0] = jacobian * (2.0 * H + (1.0 - w) * _curv(polar, p + d))
    du[0] = jacobian * (1.0 - w) / sqrt(w * (2.0 - w))


cdef void _step(int polar, int squared, double H, double p, double s, double w,
                double u, double h, double* w_out, double* u_out) noexcept nogil:
    cdef double k1w, k1u, k2w, k2u, k3w, k3u, k4w, k4u
    _rhs(polar, squared, H, p, s, w, &k1w, &k1u)
    _rhs(polar, squared, H, p, s + 0.5 * h, w + 0.5 * h * k1w, &k2w, &k2u)
    _rhs(polar, squared, H, p, s + 0.5 * h, w + 0.5 * h * k2w, &k3w, &k3u)
    _rhs(polar, squared, H, p, s + h, w + h * k3w, &k4w, &k4u)
    w_out[0] = w + h * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0
    u_out[0] = u + h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0


def rk4_flux(int polar, double H, double p, double s0, double w0, double u0,
             double h, double s_end, int squared, int stop_at_top):
    cdef Py_ssize_t n = <Py_ssize_t>((s_end - s0) / h) + 2
    s_arr = np.empty(n)
    w_arr = np.empty(n)
    u_arr = np.empty(n)
    cdef double[::1] S = s_arr, Wv = w_arr, U = u_arr
    cdef double s = s0, w = w0, u = u0, wn, un, hh, wa, wb, ha, hb, hc
    cdef Py_ssize_t k = 0
    cdef int it
    S[0] = s
    Wv[0] = w
    U[0] = u
    with nogil:
        while s < s_end - 1e-14 and k + 1 < n:
            hh = h if s + h <= s_end else s_end - s
            _step(polar, squared, H, p, s, w, u, hh, &wn, &un)
            if stop_at_top and wn >= 1.0:
                # secant on the step length for the w = 1 crossing
                ha = 0.0
                wa = w - 1.0
                hb = hh
                wb = wn - 1.0
                for it in range(60):
                    if wb == wa:
                        break
                    hc = hb - wb * (hb - ha) / (wb - wa)
                    if hc <= 0.0 or hc > hh:
                        hc = 0.5 * (ha + hb)
                    _step(polar, squared, H, p, s, w, u, hc, &wn, &un)
                    ha = hb
                    wa = wb
                    hb = hc
                    wb = wn - 1.0
                    if wb < 1e-15 and wb > -1e-15:
                        break
                k += 1
                S[k] = s + hb
                Wv[k] = wn
                U[k] = un
                break
            s += hh
            w = wn
            u = un
            k += 1
            S[k] = s
            Wv[k] = w
            U[k] = u
    return s_arr[:k + 1], w_arr[:k + 1], u_arr[:k + 1]
