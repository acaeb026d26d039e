"""ADMM solver for graph trend filtering with smooth eigenbase pursuit.

The model, over coefficients ``A`` (m x c) of the Laplacian eigenbasis ``U``::

    min_A  ||P U A||_{2,1} + alpha ||J U A - Y||_{2,1} + beta tr(A^T Sigma A)

is split with ``Q = P U A`` and ``B = J U A - Y``. Each iteration updates
``Q`` and ``B`` by row-wise shrinkage, ``A`` by an m x m SPD solve, then the
multipliers and the penalty ``mu``. Soft labels are ``F = U A``.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, sparse

from .errors import DataIOError, NumericalError, ValidationError
from .graph import (Dataset, Graph, build_knn_graph, difference_operator,
                    label_indicator, laplacian)
from .spectral import SpectralBasis, smallest_eigenpairs

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SolverConfig:
    alpha: float = 100.0
    beta: float = 10.0
    mu0: float = 1.0
    mu_max: float = 1e10
    rho: float = 1.2
    eps: float = 1e-4
    max_iter: int = 100
    feas_tol: float = 1e-4

    def __post_init__(self):
        for name in ("alpha", "beta", "mu0", "mu_max", "eps", "feas_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if not self.rho > 1:
            raise ValidationError("rho must exceed 1")
        if self.mu0 > self.mu_max:
            raise ValidationError("mu0 must not exceed mu_max")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValidationError("max_iter must be a positive integer")

    @classmethod
    def from_file(cls, path, section: str = "solver", **overrides):
        """Read ``key = value`` pairs; ``overrides`` that are not None win."""
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise DataIOError(f"cannot read config {path}: {exc}") from exc
        if not text.lstrip().startswith("["):
            text = f"[{section}]\n" + text
        parser.read_string(text)
        values = dict(parser[section]) if parser.has_section(section) else {}
        return cls.from_mapping(values, **overrides)

    @classmethod
    def from_mapping(cls, values, **overrides):
        names = {f.name: f.type for f in dataclasses.fields(cls)}
        aliases = {"mu": "mu0", "epsilon": "eps", "maxiter": "max_iter"}
        kwargs = {}
        for key, val in {**values, **{k: v for k, v in overrides.items()
                                      if v is not None}}.items():
            key = aliases.get(key, key)
            if key not in names:
                raise ValidationError(f"unknown solver option {key!r}")
            kwargs[key] = int(val) if key == "max_iter" else float(val)
        return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class Problem:
    """Immutable problem instance: graph operator, eigenbasis, and labels.

    ``Y`` is normally one-hot (l x c) but any real matrix is accepted, so a
    single column of +-1 labels gives the binary l1 model.
    """

    P: sparse.csr_matrix
    U: np.ndarray
    eigenvalues: np.ndarray
    labeled: np.ndarray
    Y: np.ndarray
    PU: np.ndarray = field(init=False, repr=False)
    JU: np.ndarray = field(init=False, repr=False)
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        lam = np.asarray(self.eigenvalues, dtype=float).ravel()
        labeled = np.asarray(self.labeled, dtype=int).ravel()
        if U.ndim != 2 or U.shape[1] != len(lam):
            raise ValidationError("U must be n x m with m eigenvalues")
        if self.P.shape[1] != U.shape[0]:
            raise ValidationError("P and U disagree on n")
        if len(labeled) != Y.shape[0]:
            raise ValidationError("Y needs one row per labeled vertex")
        PU = np.asarray(self.P @ U)
        JU = U[labeled]
        for name, val in [("U", U), ("Y", Y), ("eigenvalues", lam),
                          ("labeled", labeled), ("PU", PU), ("JU", JU),
                          ("gram", PU.T @ PU + JU.T @ JU)]:
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def m(self) -> int:
        return self.U.shape[1]

    @property
    def c(self) -> int:
        return self.Y.shape[1]

    @property
    def n_edges(self) -> int:
        return self.P.shape[0]

    @classmethod
    def from_parts(cls, graph: Graph, basis: SpectralBasis, Y, labeled=None):
        Y = np.asarray(Y, dtype=float)
        if labeled is None:
            labeled = np.arange(Y.shape[0])
        return cls(difference_operator(graph), basis.U, basis.eigenvalues,
                   labeled, Y)

    @classmethod
    def from_dataset(cls, data: Dataset, k: int = 10, xi: float = 1.0,
                     m: int = 30, n_classes: int | None = None, seed: int = 0):
        """Graph construction, eigenbasis and label matrix in one call."""
        g = build_knn_graph(data, k, xi)
        basis = smallest_eigenpairs(laplacian(g), m, seed=seed)
        ind = label_indicator(data, n_classes)
        return cls.from_parts(g, basis, ind.Y, ind.labeled)


@dataclass
class SolverState:
    A: np.ndarray
    Q: np.ndarray
    B: np.ndarray
    Lam1: np.ndarray
    Lam2: np.ndarray
    mu: float
    iter: int = 0
    trace: list = field(default_factory=list)
    residuals: list = field(default_factory=list)

    @classmethod
    def initial(cls, problem: Problem, config: SolverConfig):
        """``A = 0``, both multipliers all-ones, ``mu = mu0``."""
        E, l, m, c = problem.n_edges, len(problem.labeled), problem.m, problem.c
        return cls(A=np.zeros((m, c)), Q=np.zeros((E, c)), B=np.zeros((l, c)),
                   Lam1=np.ones((E, c)), Lam2=np.ones((l, c)), mu=config.mu0)


@dataclass
class SIISResult:
    A: np.ndarray
    F: np.ndarray
    labels: np.ndarray
    trace: np.ndarray
    objectives: np.ndarray
    mus: np.ndarray
    converged: bool
    state: SolverState = field(repr=False)

    @property
    def iterations(self) -> int:
        return len(self.trace)


def row_shrink(X, tau):
    """Proximal map of ``tau * ||.||_{2,1}``: shrink each row's norm by tau."""
    X = np.asarray(X, dtype=float)
    if tau < 0:
        raise ValidationError("threshold must be nonnegative")
    norms = np.linalg.norm(X, axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms > tau, (norms - tau) / norms, 0.0)
    return scale * X


def l21_norm(H) -> float:
    return float(np.linalg.norm(H, axis=1).sum())


def objective(A, problem: Problem, alpha: float, beta: float) -> float:
    A = np.asarray(A, dtype=float).reshape(problem.m, -1)
    return (l21_norm(problem.PU @ A)
            + alpha * l21_norm(problem.JU @ A - problem.Y)
            + beta * float(np.sum(problem.eigenvalues[:, None] * A ** 2)))


def update_q(state: SolverState, problem: Problem) -> np.ndarray:
    N = problem.PU @ state.A - state.Lam1 / state.mu
    return row_shrink(N, 1.0 / state.mu)


def update_b(state: SolverState, problem: Problem, alpha: float) -> np.ndarray:
    M = problem.JU @ state.A - problem.Y - state.Lam2 / state.mu
    return row_shrink(M, alpha / state.mu)


def a_system(state: SolverState, problem: Problem, beta: float):
    """Matrix and right-hand side of the A-subproblem's normal equations."""
    mu = state.mu
    S = 2.0 * beta * np.diag(problem.eigenvalues) + mu * problem.gram
    rhs = (problem.PU.T @ (state.Lam1 + mu * state.Q)
           + problem.JU.T @ (state.Lam2 + mu * (state.B + problem.Y)))
    return S, rhs


def update_a(state: SolverState, problem: Problem, beta: float) -> np.ndarray:
    S, rhs = a_system(state, problem, beta)
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(
            f"A-update system is ill-conditioned (cond={cond:.3e}, "
            f"mu={state.mu:.3e}); is the graph connected with a label in "
            "every component?")
    try:
        factor = linalg.cho_factor(S)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"A-update system not positive definite: {exc}") from exc
    return linalg.cho_solve(factor, rhs)


def relative_change(A_new, A_old) -> float:
    diff = np.abs(A_new - A_old).max()
    denom = np.abs(A_old).max()
    return float(diff / denom) if denom > 0 else float(diff)


def step(state: SolverState, problem: Problem, config: SolverConfig) -> SolverState:
    """One ADMM sweep: Q, B, A, then multipliers, then penalty."""
    s = dataclasses.replace(state, trace=list(state.trace),
                            residuals=list(state.residuals))
    s.Q = update_q(s, problem)
    s.B = update_b(s, problem, config.alpha)
    A_old = s.A
    s.A = update_a(s, problem, config.beta)
    R1 = s.Q - problem.PU @ s.A
    R2 = s.B - problem.JU @ s.A + problem.Y
    s.Lam1 = s.Lam1 + s.mu * R1
    s.Lam2 = s.Lam2 + s.mu * R2
    s.mu = min(config.rho * s.mu, config.mu_max)
    s.iter += 1
    s.trace.append(relative_change(s.A, A_old))
    s.residuals.append(max(np.linalg.norm(R1), np.linalg.norm(R2)))
    return s


def converged(state: SolverState, config: SolverConfig) -> bool:
    """Small relative change of A *and* both constraints satisfied.

    The change test alone stops on plateaus where A is momentarily fixed
    while the multipliers are still moving.
    """
    return (bool(state.trace) and state.trace[-1] <= config.eps
            and state.residuals[-1] <= config.feas_tol)


def classify(F) -> np.ndarray:
    """Row-wise argmax; ties go to the smallest class index."""
    return np.argmax(np.asarray(F), axis=1)


def solve(problem: Problem, config: SolverConfig | None = None,
          state: SolverState | None = None) -> SIISResult:
    """Run ADMM until the relative change of A drops to ``eps`` and both
    constraint residuals (Frobenius) drop to ``feas_tol``.

    Hitting ``max_iter`` is not an error; check ``result.converged``.
    """
    config = config or SolverConfig()
    state = state or SolverState.initial(problem, config)
    objectives, mus = [], []
    while True:
        mus.append(state.mu)
        state = step(state, problem, config)
        objectives.append(objective(state.A, problem, config.alpha, config.beta))
        if converged(state, config) or state.iter >= config.max_iter:
            break
    F = problem.U @ state.A
    return SIISResult(A=state.A, F=F, labels=classify(F),
                      trace=np.array(state.trace), objectives=np.array(objectives),
                      mus=np.array(mus), converged=converged(state, config),
                      state=state)


def export_trace(result: SIISResult, path) -> None:
    """CSV of ``iter, relative_change, objective, mu`` (mu used in that step)."""
    it = np.arange(1, result.iterations + 1)
    np.savetxt(path, np.column_stack([it, result.trace, result.objectives,
                                      result.mus]),
               delimiter=",", header="iter,relative_change,objective,mu",
               comments="", fmt=["%d", "%.17g", "%.17g", "%.17g"])
