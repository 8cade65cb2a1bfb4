# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot numerical kernels.

Mirrors ``respdec._kernels_py`` function for function; see that module
for the contracts.  The Jacobi sweep replays the exact scalar operation
sequence of the fallback, so the two backends agree bitwise there; the
reduction-based kernels agree to rounding.
"""

import numpy as np

from libc.math cimport copysign, exp, fabs, isfinite, log, sqrt

DESCENT_SLACK = 1e-9

OK = 0
NON_FINITE = 1
OBJECTIVE_INCREASED = 2


def jacobi_sweep(double[:, ::1] S, double[:, ::1] V, double threshold):
    cdef Py_ssize_t p = S.shape[0]
    cdef Py_ssize_t vrows = V.shape[0]
    cdef Py_ssize_t i, j, r
    cdef int rotations = 0
    cdef double sij, tau, t, c, s, xi, xj
    for i in range(p - 1):
        for j in range(i + 1, p):
            sij = S[i, j]
            if fabs(sij) <= threshold:
                continue
            rotations += 1
            tau = (S[j, j] - S[i, i]) / (2.0 * sij)
            t = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
            c = 1.0 / sqrt(1.0 + t * t)
            s = t * c
            for r in range(p):
                xi = S[r, i]
                xj = S[r, j]
                S[r, i] = c * xi - s * xj
                S[r, j] = s * xi + c * xj
            for r in range(p):
                xi = S[i, r]
                xj = S[j, r]
                S[i, r] = c * xi - s * xj
                S[j, r] = s * xi + c * xj
            S[i, j] = 0.0
            S[j, i] = 0.0
            for r in range(vrows):
                xi = V[r, i]
                xj = V[r, j]
                V[r, i] = c * xi - s * xj
                V[r, j] = s * xi + c * xj
    return rotations


cdef double _objective(
    double[:, ::1] values0,
    double[:, ::1] maskf,
    double[:, ::1] U,
    double[:, ::1] V,
    double[:, ::1] E,
    double reg_u,
    double reg_v,
) noexcept:
    """Fill E with the masked residual and return the objective W."""
    cdef Py_ssize_t m = values0.shape[0], n = values0.shape[1], k = U.shape[1]
    cdef Py_ssize_t i, j, l
    cdef double w = 0.0, r, e
    for i in range(m):
        for j in range(n):
            if maskf[i, j] != 0.0:
                r = 0.0
                for l in range(k):
                    r += U[i, l] * V[j, l]
                e = values0[i, j] - r
                E[i, j] = e
                w += e * e
            else:
                E[i, j] = 0.0
    for i in range(m):
        for l in range(k):
            w += reg_u * U[i, l] * U[i, l]
    for j in range(n):
        for l in range(k):
            w += reg_v * V[j, l] * V[j, l]
    return w


def matdec_run(
    double[:, ::1] values0,
    double[:, ::1] maskf,
    double[:, ::1] U,
    double[:, ::1] V,
    double mu,
    double reg_u,
    double reg_v,
    Py_ssize_t max_epochs,
    double tol,
):
    cdef Py_ssize_t m = values0.shape[0], n = values0.shape[1], k = U.shape[1]
    cdef Py_ssize_t epoch, i, j, l
    cdef double[:, ::1] E = np.empty((m, n))
    cdef double[:, ::1] new_u = np.empty((m, k))
    cdef double[:, ::1] new_v = np.empty((n, k))
    cdef double prev_w = np.inf
    cdef double w, g, nv, diff, max_change = np.inf
    cdef int status = OK
    cdef Py_ssize_t epochs = 0, bad_epoch = -1
    cdef bint finite_ok, stop
    w_history = []
    for epoch in range(max_epochs):
        w = _objective(values0, maskf, U, V, E, reg_u, reg_v)
        w_history.append(w)
        if not isfinite(w):
            status, bad_epoch = NON_FINITE, epoch
            break
        if w > prev_w + DESCENT_SLACK:
            status, bad_epoch = OBJECTIVE_INCREASED, epoch
            break
        prev_w = w
        finite_ok = True
        max_change = 0.0
        for i in range(m):
            for l in range(k):
                g = 0.0
                for j in range(n):
                    g += E[i, j] * V[j, l]
                nv = U[i, l] - mu * (-2.0 * g + 2.0 * reg_u * U[i, l])
                if not isfinite(nv):
                    finite_ok = False
                new_u[i, l] = nv
                diff = fabs(nv - U[i, l])
                if diff > max_change:
                    max_change = diff
        for j in range(n):
            for l in range(k):
                g = 0.0
                for i in range(m):
                    g += E[i, j] * U[i, l]
                nv = V[j, l] - mu * (-2.0 * g + 2.0 * reg_v * V[j, l])
                if not isfinite(nv):
                    finite_ok = False
                new_v[j, l] = nv
                diff = fabs(nv - V[j, l])
                if diff > max_change:
                    max_change = diff
        if not finite_ok:
            status, bad_epoch = NON_FINITE, epoch
            break
        U[:, :] = new_u
        V[:, :] = new_v
        epochs = epoch + 1
        if max_change < tol:
            break
    if status == OK and epochs > 0:
        w = _objective(values0, maskf, U, V, E, reg_u, reg_v)
        w_history.append(w)
        if not isfinite(w):
            status, bad_epoch = NON_FINITE, epochs - 1
        elif w > prev_w + DESCENT_SLACK:
            status, bad_epoch = OBJECTIVE_INCREASED, epochs - 1
    return epochs, max_change, np.asarray(w_history), status, bad_epoch


def em_estep(
    double[:, ::1] delta0,
    double[:, ::1] maskf,
    double[:, ::1] logP,
    double[:, ::1] logQ,
    double[::1] logw,
):
    cdef Py_ssize_t m = delta0.shape[0], n = delta0.shape[1], Q = logw.shape[0]
    cdef Py_ssize_t i, j, q
    cdef double[:, ::1] n_counts = np.zeros((n, Q))
    cdef double[:, ::1] r_counts = np.zeros((n, Q))
    cdef double[::1] logL = np.empty(Q)
    cdef double[::1] post = np.empty(Q)
    cdef double loglik = 0.0, d, peak, tot, pq
    for i in range(m):
        for q in range(Q):
            logL[q] = logw[q]
        for j in range(n):
            if maskf[i, j] != 0.0:
                d = delta0[i, j]
                for q in range(Q):
                    logL[q] += d * logP[j, q] + (1.0 - d) * logQ[j, q]
        peak = logL[0]
        for q in range(1, Q):
            if logL[q] > peak:
                peak = logL[q]
        tot = 0.0
        for q in range(Q):
            post[q] = exp(logL[q] - peak)
            tot += post[q]
        loglik += peak + log(tot)
        for q in range(Q):
            post[q] /= tot
        for j in range(n):
            if maskf[i, j] != 0.0:
                d = delta0[i, j]
                for q in range(Q):
                    pq = post[q]
                    n_counts[j, q] += pq
                    r_counts[j, q] += d * pq
    return np.asarray(n_counts), np.asarray(r_counts), loglik
