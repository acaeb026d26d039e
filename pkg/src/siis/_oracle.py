"""Compiled subgradient kernel for the tiny-instance verification oracle."""
import numpy as np
from numba import njit


@njit(cache=True)
def _objective_and_subgradient(A, GP, GJ, Y, lam, alpha, beta, grad):
    m, c = A.shape
    obj = 0.0
    for i in range(m):
        for j in range(c):
            grad[i, j] = 2.0 * beta * lam[i] * A[i, j]
            obj += beta * lam[i] * A[i, j] * A[i, j]
    row = np.empty(c)
    for blk in range(2):
        G = GP if blk == 0 else GJ
        w = 1.0 if blk == 0 else alpha
        for e in range(G.shape[0]):
            nrm = 0.0
            for j in range(c):
                s = 0.0
                for i in range(m):
                    s += G[e, i] * A[i, j]
                if blk == 1:
                    s -= Y[e, j]
                row[j] = s
                nrm += s * s
            nrm = np.sqrt(nrm)
            obj += w * nrm
            if nrm > 0.0:
                for j in range(c):
                    g = w * row[j] / nrm
                    for i in range(m):
                        grad[i, j] += G[e, i] * g
    return obj


@njit(cache=True)
def subgradient_descent(A0, GP, GJ, Y, lam, alpha, beta, c0, iters):
    """Normalized subgradient steps of length ``c0 / sqrt(t)``; best iterate kept."""
    A = A0.copy()
    grad = np.empty_like(A)
    best = A.copy()
    best_obj = np.inf
    for t in range(1, iters + 1):
        obj = _objective_and_subgradient(A, GP, GJ, Y, lam, alpha, beta, grad)
        if obj < best_obj:
            best_obj = obj
            best[:, :] = A
        gnorm = np.sqrt(np.sum(grad * grad))
        if gnorm == 0.0:
            break
        A -= (c0 / np.sqrt(t)) * grad / gnorm
    obj = _objective_and_subgradient(A, GP, GJ, Y, lam, alpha, beta, grad)
    if obj < best_obj:
        best_obj = obj
        best[:, :] = A
    return best, best_obj
