"""Pure-numpy implementations of the hot numerical kernels.

The compiled extension (``respdec._kernels``) exposes the same three
functions with identical semantics; ``respdec._backend`` picks whichever
is importable.  Keep the arithmetic here in exact lockstep with the
extension: the Jacobi sweep performs the same scalar operations in the
same order in both backends (no reductions), so its results are bitwise
identical; the matmul-based kernels agree to rounding.
"""

from __future__ import annotations

import math

import numpy as np

#: absolute slack allowed before an objective increase counts as divergence
DESCENT_SLACK = 1e-9

# status codes returned by matdec_run
OK = 0
NON_FINITE = 1
OBJECTIVE_INCREASED = 2


def jacobi_sweep(S: np.ndarray, V: np.ndarray, threshold: float) -> int:
    """One cyclic sweep of two-sided Jacobi rotations on symmetric S.

    Rotates every (i, j) pair, i < j, whose off-diagonal magnitude exceeds
    ``threshold``; accumulates the rotations into V.  Mutates S and V in
    place and returns the number of rotations applied (0 means converged).
    """
    p = S.shape[0]
    rotations = 0
    for i in range(p - 1):
        for j in range(i + 1, p):
            sij = S[i, j]
            if abs(sij) <= threshold:
                continue
            rotations += 1
            tau = (S[j, j] - S[i, i]) / (2.0 * sij)
            t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            col_i = S[:, i].copy()
            col_j = S[:, j].copy()
            S[:, i] = c * col_i - s * col_j
            S[:, j] = s * col_i + c * col_j
            row_i = S[i, :].copy()
            row_j = S[j, :].copy()
            S[i, :] = c * row_i - s * row_j
            S[j, :] = s * row_i + c * row_j
            S[i, j] = 0.0
            S[j, i] = 0.0
            vcol_i = V[:, i].copy()
            vcol_j = V[:, j].copy()
            V[:, i] = c * vcol_i - s * vcol_j
            V[:, j] = s * vcol_i + c * vcol_j
    return rotations


def matdec_run(
    values0: np.ndarray,
    maskf: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    mu: float,
    reg_u: float,
    reg_v: float,
    max_epochs: int,
    tol: float,
):
    """Full-batch gradient descent on the masked regularized squared error.

    ``values0`` holds observed values with zeros at null cells and
    ``maskf`` is the 0/1 observation indicator.  U (m x k) and V (n x k)
    are updated in place, simultaneously from the epoch-start factors.

    Returns ``(epochs, max_change, w_history, status, bad_epoch)`` where
    ``w_history`` carries the objective at the start of every epoch plus
    the value after the final update, and ``status`` flags non-finite
    factors or an objective increase beyond the descent slack.
    """
    w_history = []
    prev_w = math.inf
    epochs = 0
    max_change = math.inf
    status = OK
    bad_epoch = -1
    for epoch in range(max_epochs):
        E = maskf * (values0 - U @ V.T)
        w = float((E * E).sum() + reg_u * (U * U).sum() + reg_v * (V * V).sum())
        w_history.append(w)
        if not math.isfinite(w):
            status, bad_epoch = NON_FINITE, epoch
            break
        if w > prev_w + DESCENT_SLACK:
            status, bad_epoch = OBJECTIVE_INCREASED, epoch
            break
        prev_w = w
        grad_u = -2.0 * (E @ V) + 2.0 * reg_u * U
        grad_v = -2.0 * (E.T @ U) + 2.0 * reg_v * V
        new_u = U - mu * grad_u
        new_v = V - mu * grad_v
        if not (np.isfinite(new_u).all() and np.isfinite(new_v).all()):
            status, bad_epoch = NON_FINITE, epoch
            break
        max_change = max(
            float(np.abs(new_u - U).max()), float(np.abs(new_v - V).max())
        )
        U[:] = new_u
        V[:] = new_v
        epochs = epoch + 1
        if max_change < tol:
            break
    if status == OK and epochs > 0:
        E = maskf * (values0 - U @ V.T)
        w = float((E * E).sum() + reg_u * (U * U).sum() + reg_v * (V * V).sum())
        w_history.append(w)
        if not math.isfinite(w):
            status, bad_epoch = NON_FINITE, epochs - 1
        elif w > prev_w + DESCENT_SLACK:
            status, bad_epoch = OBJECTIVE_INCREASED, epochs - 1
    return epochs, max_change, np.asarray(w_history), status, bad_epoch


def em_estep(
    delta0: np.ndarray,
    maskf: np.ndarray,
    logP: np.ndarray,
    logQ: np.ndarray,
    logw: np.ndarray,
):
    """Posterior ability weights and expected per-item response counts.

    ``delta0`` is the response matrix with zeros at null cells, ``maskf``
    the 0/1 observation indicator (both m x n); ``logP``/``logQ`` are the
    n x Q per-item log response probabilities at the quadrature nodes and
    ``logw`` the log node weights.

    Returns ``(n_counts, r_counts, loglik)``: expected examinee counts and
    expected correct counts per (item, node), both n x Q, and the marginal
    log-likelihood of the observed data.
    """
    logL = delta0 @ logP + (maskf - delta0) @ logQ + logw[np.newaxis, :]
    peak = logL.max(axis=1, keepdims=True)
    weights = np.exp(logL - peak)
    total = weights.sum(axis=1, keepdims=True)
    post = weights / total
    loglik = float((peak[:, 0] + np.log(total[:, 0])).sum())
    n_counts = maskf.T @ post
    r_counts = delta0.T @ post
    return n_counts, r_counts, loglik
