"""Ablation baselines operating directly on vertex values ``F`` (n x c).

* :func:`gfhf` -- harmonic solution with labels clamped.
* :func:`l2_l1_fidelity` -- Laplacian smoother plus a robust l2,1 fidelity.
* :func:`gtf_only` -- graph trend filtering plus the same fidelity, no
  eigenbasis restriction.

``Y`` may be a one-hot matrix or a single column of real (e.g. +-1) labels.
For a single column the predictions are signs (+1 / -1) instead of class
indices.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse import linalg as spla

from .errors import NumericalError, ValidationError
from .graph import DisconnectedGraphWarning
from .solver import SolverConfig, classify, l21_norm, relative_change, row_shrink

# The SIIS schedule (mu grows 1.2x to 1e10 within 100 steps) freezes these
# n-dimensional problems well before they converge. A capped penalty keeps
# ADMM contracting; objectives then match a conic solver to ~1e-5.
BASELINE_DEFAULTS = {"mu_max": 10.0, "max_iter": 10000, "eps": 1e-7,
                     "feas_tol": 1e-6}


def baseline_config(alpha: float, **overrides) -> SolverConfig:
    """Solver settings for the ADMM baselines; ``overrides`` win."""
    return SolverConfig(alpha=alpha, **{**BASELINE_DEFAULTS, **overrides})


@dataclass
class BaselineResult:
    method: str
    F: np.ndarray
    labels: np.ndarray
    trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    converged: bool = True

    @property
    def iterations(self) -> int:
        return len(self.trace)

    def accuracy(self, truth, labeled) -> tuple[float, float]:
        """Accuracy on the labeled set and on the rest, against ``truth``."""
        truth = np.asarray(truth)
        mask = np.zeros(len(truth), dtype=bool)
        mask[labeled] = True
        hits = self.labels == truth
        acc_u = float(hits[~mask].mean()) if (~mask).any() else 1.0
        return float(hits[mask].mean()), acc_u


def _as_columns(Y):
    Y = np.asarray(Y, dtype=float)
    return Y[:, None] if Y.ndim == 1 else Y


def _predict(F):
    if F.shape[1] == 1:
        return np.where(F[:, 0] >= 0, 1, -1)
    return classify(F)


def _labeled(labeled, Y):
    return np.arange(Y.shape[0]) if labeled is None else np.asarray(labeled, int)


def _check_components(adjacency, labeled, n):
    n_comp, comp = csgraph.connected_components(adjacency, directed=False)
    unlabeled = np.setdiff1d(np.arange(n_comp), comp[labeled])
    return n_comp, unlabeled


def gfhf(L, Y, labeled=None) -> BaselineResult:
    """Harmonic function solution ``F_U = -L_UU^{-1} L_UL Y``."""
    L = sparse.csr_matrix(L, dtype=float)
    Y = _as_columns(Y)
    n = L.shape[0]
    labeled = _labeled(labeled, Y)
    _, orphan = _check_components(L - sparse.diags(L.diagonal()), labeled, n)
    if len(orphan):
        raise NumericalError(
            f"{len(orphan)} connected component(s) hold no labeled vertex; "
            "L_UU is singular")
    unl = np.setdiff1d(np.arange(n), labeled)
    F = np.zeros((n, Y.shape[1]))
    F[labeled] = Y
    if len(unl):
        L_uu = sparse.csc_matrix(L[unl][:, unl])
        rhs = -(L[unl][:, labeled] @ Y)
        try:
            F[unl] = np.asarray(spla.splu(L_uu).solve(rhs)).reshape(len(unl), -1)
        except RuntimeError as exc:
            raise NumericalError(f"L_UU factorization failed: {exc}") from exc
    return BaselineResult("gfhf", F, _predict(F))


def _fidelity_admm(method, n, labeled, Y, alpha, config, system, smooth_rhs,
                   P=None):
    """Shared ADMM loop for the two fidelity-penalized baselines.

    ``system(mu)`` returns a solver for the F-update matrix at penalty mu and
    ``smooth_rhs(Lam1, Q, mu)`` the smoothness part of its right-hand side
    (zero for the Laplacian model, which has no Q split).
    """
    c = Y.shape[1]
    F = np.zeros((n, c))
    Lam2 = np.ones((len(labeled), c))
    Lam1 = np.ones((P.shape[0], c)) if P is not None else None
    Q = None
    mu = config.mu0
    trace = []
    for _ in range(config.max_iter):
        if P is not None:
            Q = row_shrink(P @ F - Lam1 / mu, 1.0 / mu)
        B = row_shrink(F[labeled] - Y - Lam2 / mu, alpha / mu)
        solve_f = system(mu)
        rhs = smooth_rhs(Lam1, Q, mu)
        rhs[labeled] += Lam2 + mu * (B + Y)
        F_old = F
        F = solve_f(rhs)
        resid = 0.0
        if P is not None:
            R1 = Q - P @ F
            Lam1 = Lam1 + mu * R1
            resid = np.linalg.norm(R1)
        R2 = B - F[labeled] + Y
        Lam2 = Lam2 + mu * R2
        resid = max(resid, np.linalg.norm(R2))
        mu = min(config.rho * mu, config.mu_max)
        trace.append(relative_change(F, F_old))
        done = trace[-1] <= config.eps and resid <= config.feas_tol
        if done:
            break
    return BaselineResult(method, F, _predict(F), np.array(trace), bool(done))


def _factorized(M):
    lu = spla.splu(sparse.csc_matrix(M))

    def solve(rhs):
        return np.asarray(lu.solve(rhs)).reshape(rhs.shape)
    return solve


def l2_l1_fidelity(L, Y, alpha: float, labeled=None,
                   config: SolverConfig | None = None) -> BaselineResult:
    """Minimize ``tr(F^T L F) + alpha ||J F - Y||_{2,1}`` by ADMM on ``B = JF - Y``."""
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    config = config or baseline_config(alpha)
    L = sparse.csr_matrix(L, dtype=float)
    Y = _as_columns(Y)
    n = L.shape[0]
    labeled = _labeled(labeled, Y)
    _, orphan = _check_components(L - sparse.diags(L.diagonal()), labeled, n)
    if len(orphan):
        raise NumericalError("a connected component holds no labeled vertex; "
                             "the F-update system is singular")
    JtJ = sparse.csr_matrix((np.ones(len(labeled)), (labeled, labeled)),
                            shape=(n, n))

    cache = {}

    def system(mu):
        # mu stops changing once it reaches mu_max
        if mu not in cache:
            cache.clear()
            cache[mu] = _factorized(2.0 * L + mu * JtJ)
        return cache[mu]

    def smooth_rhs(Lam1, Q, mu):
        return np.zeros((n, Y.shape[1]))

    return _fidelity_admm("l2l1", n, labeled, Y, alpha, config, system, smooth_rhs)


def gtf_only(P, Y, alpha: float, labeled=None,
             config: SolverConfig | None = None) -> BaselineResult:
    """Minimize ``||P F||_{2,1} + alpha ||J F - Y||_{2,1}`` by ADMM.

    Splits ``Q = P F`` and ``B = J F - Y``; the F-update matrix
    ``mu (P^T P + J^T J)`` is factorized once since mu only scales it.
    """
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    config = config or baseline_config(alpha)
    P = sparse.csr_matrix(P, dtype=float)
    Y = _as_columns(Y)
    n = P.shape[1]
    labeled = _labeled(labeled, Y)
    PtP = (P.T @ P).tocsr()
    n_comp, orphan = _check_components(PtP - sparse.diags(PtP.diagonal()),
                                       labeled, n)
    if len(orphan):
        warnings.warn(f"{len(orphan)} connected component(s) hold no labeled "
                      "vertex; their values are underdetermined (set to 0)",
                      DisconnectedGraphWarning, stacklevel=2)
    JtJ = sparse.csr_matrix((np.ones(len(labeled)), (labeled, labeled)),
                            shape=(n, n))
    # orphaned components get a tiny ridge so the system stays nonsingular
    ridge = 0.0 if not len(orphan) else 1e-12
    base = _factorized(PtP + JtJ + ridge * sparse.identity(n))

    def system(mu):
        return lambda rhs: base(rhs / mu)

    def smooth_rhs(Lam1, Q, mu):
        return np.asarray(P.T @ (Lam1 + mu * Q))

    return _fidelity_admm("gtf", n, labeled, Y, alpha, config, system,
                          smooth_rhs, P=P)


def gtf_objective(F, P, Y, alpha, labeled=None) -> float:
    Y = _as_columns(Y)
    F = _as_columns(F)
    labeled = _labeled(labeled, Y)
    return l21_norm(P @ F) + alpha * l21_norm(F[labeled] - Y)


def l2_l1_objective(F, L, Y, alpha, labeled=None) -> float:
    Y = _as_columns(Y)
    F = _as_columns(F)
    labeled = _labeled(labeled, Y)
    return float(np.sum(F * (L @ F))) + alpha * l21_norm(F[labeled] - Y)
