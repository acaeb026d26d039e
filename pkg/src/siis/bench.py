"""Synthetic data, label-noise injection, metrics and the experiment protocol.

Randomness always comes from ``numpy.random.default_rng`` (PCG64) seeded
with an explicit integer, and per-repetition seeds are derived from one root
seed, so every report can be regenerated exactly.
"""
from __future__ import annotations

import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _io
from ._oracle import subgradient_descent
from .baselines import baseline_config, gfhf, gtf_only, l2_l1_fidelity
from .errors import SIISError, ValidationError
from .graph import (Dataset, Graph, build_knn_graph, connected_components,
                    difference_operator, laplacian)
from .solver import Problem, SolverConfig, objective, solve
from .spectral import smallest_eigenpairs

METHODS = ("siis", "gfhf", "l2l1", "gtf")


def derive_seed(root: int, *keys: int) -> int:
    """Deterministic child seed for ``(root, *keys)``."""
    ss = np.random.SeedSequence([int(root), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


# ---------------------------------------------------------------------------
# data

@dataclass(frozen=True)
class LabeledPool:
    """Examples with ground-truth classes; no labeled/unlabeled split yet."""

    features: np.ndarray
    truth: np.ndarray
    name: str = "pool"

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return int(np.max(self.truth)) + 1


@dataclass(frozen=True)
class NoisySample:
    """A dataset whose first ``l`` rows carry given (partly wrong) labels.

    ``truth`` is aligned with ``dataset`` rows; ``flipped`` lists the rows
    whose given label differs from the truth.
    """

    dataset: Dataset
    truth: np.ndarray
    flipped: np.ndarray

    @property
    def labeled(self) -> np.ndarray:
        return np.arange(self.dataset.labeled_count)


def double_moon_points(n: int = 640, noise_std: float = 0.15, seed: int = 0,
                       radius: float = 1.0, x_offset: float = 1.0,
                       y_offset: float = 0.5):
    """Two half-circle arcs with Gaussian jitter.

    The upper moon is the upper half of the circle of ``radius`` about the
    origin; the lower moon is the lower half of the same circle shifted by
    ``(x_offset, -y_offset)``. Returns points and 0/1 classes, upper first.
    """
    if n % 2:
        raise ValidationError("double moon needs an even number of points")
    if noise_std < 0:
        raise ValidationError("noise_std must be nonnegative")
    rng = np.random.default_rng(seed)
    h = n // 2
    t = np.linspace(0.0, np.pi, h)
    upper = radius * np.column_stack([np.cos(t), np.sin(t)])
    lower = np.column_stack([x_offset - radius * np.cos(t),
                             -y_offset - radius * np.sin(t)])
    X = np.vstack([upper, lower])
    X = X + noise_std * rng.standard_normal(X.shape)
    return X, np.repeat([0, 1], h)


def make_double_moon(n: int = 640, noise_std: float = 0.15,
                     labeled_per_class: int = 3, flipped_per_class: int = 1,
                     seed: int = 0, **geometry) -> NoisySample:
    """Noisy double moon with a few labels per class, some of them flipped."""
    if flipped_per_class > labeled_per_class:
        raise ValidationError("cannot flip more labels than are given")
    X, y = double_moon_points(n, noise_std, seed, **geometry)
    rng = np.random.default_rng(derive_seed(seed, 1))
    h = n // 2
    labeled, flipped = [], []
    for cls in (0, 1):
        picks = cls * h + rng.choice(h, labeled_per_class, replace=False)
        labeled.extend(picks)
        flipped.extend(picks[:flipped_per_class])
    labeled = np.array(labeled)
    rest = np.setdiff1d(np.arange(n), labeled)
    order = np.r_[labeled, rest]
    given = y[labeled].copy()
    is_flip = np.isin(labeled, flipped)
    given[is_flip] = 1 - given[is_flip]
    data = Dataset(X[order], given, order=order)
    return NoisySample(data, y[order], np.flatnonzero(is_flip))


def make_blobs(n: int = 500, n_classes: int = 4, spread: float = 0.5,
               seed: int = 0, dim: int = 2) -> LabeledPool:
    """Isotropic Gaussian clusters with centers on a circle of radius 3."""
    rng = np.random.default_rng(seed)
    ang = 2 * np.pi * np.arange(n_classes) / n_classes
    centers = np.zeros((n_classes, dim))
    centers[:, 0], centers[:, 1 % dim] = 3 * np.cos(ang), 3 * np.sin(ang)
    truth = np.arange(n) % n_classes
    X = centers[truth] + spread * rng.standard_normal((n, dim))
    return LabeledPool(X, truth, "blobs")


def chain_example(n: int = 10):
    """Unweighted chain: vertices ``0..n/2-1`` are +1, the rest -1.

    Labeled vertices (for ``n = 10``): 0, 1 on the positive side and 5..9 on
    the negative side, with vertex 7 mislabeled +1. Every contiguous block
    containing vertex 7 holds more -1 than +1 labels, so the l1 trend
    filtering optimum at vertex 7 is exactly -1 for ``0.5 < alpha < 2``.
    Returns ``(graph, labeled, given, truth, mislabeled)``.
    """
    if n < 10:
        raise ValidationError("chain example needs at least 10 vertices")
    h = n // 2
    g = Graph.from_edges(n, np.column_stack([np.arange(n - 1), np.arange(1, n)]))
    truth = np.where(np.arange(n) < h, 1.0, -1.0)
    bad = h + 2
    labeled = np.r_[0, 1, h:n]
    given = truth[labeled].copy()
    given[labeled == bad] = 1.0
    return g, labeled, given, truth, bad


CHAIN_ALPHAS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0)


def chain_sweep(alphas=CHAIN_ALPHAS, n: int = 10) -> list[tuple]:
    """Value at the mislabeled chain vertex, normalized by ``max |f|``.

    Rows ``(alpha, gtf value, l2l1 value)``; GFHF keeps the flipped label by
    construction so it is not swept.
    """
    g, labeled, given, _, bad = chain_example(n)
    L, P = laplacian(g), difference_operator(g)
    rows = []
    for a in alphas:
        f_gtf = gtf_only(P, given, a, labeled).F[:, 0]
        f_l2 = l2_l1_fidelity(L, given, a, labeled).F[:, 0]
        rows.append((float(a), float(f_gtf[bad] / np.abs(f_gtf).max()),
                     float(f_l2[bad] / np.abs(f_l2).max())))
    return rows


# ---------------------------------------------------------------------------
# label noise and metrics

def inject_label_noise(labels, rate: float, n_classes: int, seed: int):
    """Flip ``floor(rate * l)`` labels, each to a uniformly drawn wrong class.

    Returns the noisy copy and the sorted positions that were flipped.
    """
    labels = np.asarray(labels, dtype=int)
    if not 0 <= rate < 1:
        raise ValidationError("noise rate must lie in [0, 1)")
    n_flip = int(np.floor(rate * len(labels) + 1e-9))
    if n_flip and n_classes < 2:
        raise ValidationError("cannot flip labels with a single class")
    rng = np.random.default_rng(seed)
    flipped = np.sort(rng.choice(len(labels), n_flip, replace=False))
    noisy = labels.copy()
    shift = rng.integers(1, n_classes, size=n_flip) if n_flip else []
    noisy[flipped] = (labels[flipped] + shift) % n_classes
    return noisy, flipped


def choose_labeled(truth, per_class: int, seed: int) -> np.ndarray:
    """``per_class`` random examples of every class, sorted."""
    rng = np.random.default_rng(seed)
    truth = np.asarray(truth)
    picks = []
    for cls in np.unique(truth):
        members = np.flatnonzero(truth == cls)
        if len(members) < per_class:
            raise ValidationError(f"class {cls} has fewer than {per_class} examples")
        picks.append(rng.choice(members, per_class, replace=False))
    return np.sort(np.concatenate(picks))


@dataclass(frozen=True)
class RunMetrics:
    acc_labeled: float
    acc_unlabeled: float
    correction_rate: float  # NaN when nothing was flipped


def evaluate(predictions, truth, labeled, flipped=()) -> RunMetrics:
    """Accuracies on the labeled and unlabeled sets against the true classes.

    ``flipped`` holds vertex ids whose given label was wrong; the correction
    rate is the fraction of them predicted as their true class.
    """
    pred, truth = np.asarray(predictions), np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValidationError("predictions and truth differ in length")
    mask = np.zeros(len(truth), dtype=bool)
    mask[np.asarray(labeled, dtype=int)] = True
    hit = pred == truth
    acc_u = float(hit[~mask].mean()) if (~mask).any() else float("nan")
    flipped = np.asarray(flipped, dtype=int)
    corr = float(hit[flipped].mean()) if len(flipped) else float("nan")
    return RunMetrics(float(hit[mask].mean()), acc_u, corr)


# ---------------------------------------------------------------------------
# verification oracle

@dataclass
class OracleResult:
    A: np.ndarray
    objective: float
    converged: bool
    restart_objectives: list = field(default_factory=list)


def _restarted_descent(GP, GJ, Y, lam, alpha, beta, radius, budget, restarts,
                       seed, tol) -> OracleResult:
    rng = np.random.default_rng(seed)
    m, c = GJ.shape[1], Y.shape[1]
    best_A = np.zeros((m, c))
    best = np.inf
    iters = max(1, int(budget) // restarts)
    history, gain = [], np.inf
    for r in range(restarts):
        start = best_A if r == 0 else best_A + (
            radius * rng.standard_normal((m, c)) / np.sqrt(m * c))
        A, obj = subgradient_descent(
            np.ascontiguousarray(start, dtype=float), GP, GJ, Y, lam,
            float(alpha), float(beta), float(radius), iters)
        history.append(float(obj))
        gain = best - obj
        if obj < best:
            best, best_A = float(obj), A
        radius /= 10.0
    converged = gain <= tol * max(abs(best), 1e-12)
    return OracleResult(best_A, best, bool(converged), history)


def oracle_solve(problem: Problem, alpha: float, beta: float,
                 budget: int = 10 ** 6, restarts: int = 5, seed: int = 0,
                 tol: float = 1e-7) -> OracleResult:
    """Minimize the SIIS objective by plain subgradient descent.

    The budget is split evenly over ``restarts`` runs. Each run starts at a
    random point within a ball around the incumbent (the origin for the
    first) and takes normalized steps of length ``radius / sqrt(t)``; the
    radius shrinks tenfold per run. The best iterate seen is returned.
    ``converged`` is False when the last run still improved the incumbent by
    more than ``tol`` relative.

    Intended only for tiny instances (n <= 30, m <= 5, c <= 3).
    """
    if problem.n > 30 or problem.m > 5 or problem.c > 3:
        raise ValidationError("oracle_solve is limited to n<=30, m<=5, c<=3")
    A_fit = np.linalg.lstsq(problem.JU, problem.Y, rcond=None)[0]
    radius = 1.0 + np.linalg.norm(A_fit)
    return _restarted_descent(problem.PU, problem.JU, problem.Y,
                              problem.eigenvalues, alpha, beta, radius,
                              budget, restarts, seed, tol)


def baseline_oracle(method: str, operator, Y, labeled, alpha: float,
                    budget: int = 10 ** 6, restarts: int = 5, seed: int = 0,
                    tol: float = 1e-7) -> OracleResult:
    """Subgradient oracle for the ``"gtf"`` and ``"l2l1"`` baselines.

    ``operator`` is the difference operator P for ``"gtf"`` and the Laplacian
    L for ``"l2l1"``. Both reuse the SIIS kernel: GTF is the SIIS objective
    with ``U = I`` and ``beta = 0``; the Laplacian smoother is, in the full
    eigenbasis of L, a diagonal quadratic with no edge term. The returned
    ``A`` holds vertex values F. Tiny instances only (n <= 30, c <= 3).
    """
    Y = np.asarray(Y, dtype=float)
    Y = Y[:, None] if Y.ndim == 1 else Y
    labeled = np.asarray(labeled, dtype=int)
    M = np.asarray(operator.toarray() if hasattr(operator, "toarray")
                   else operator, dtype=float)
    n = M.shape[1]
    if n > 30 or Y.shape[1] > 3:
        raise ValidationError("baseline_oracle is limited to n<=30, c<=3")
    if method == "gtf":
        U, lam, beta, GP = np.eye(n), np.zeros(n), 0.0, M
    elif method == "l2l1":
        lam, U = np.linalg.eigh(M)
        lam, beta, GP = np.clip(lam, 0.0, None), 1.0, np.zeros((0, n))
    else:
        raise ValidationError(f"baseline_oracle handles 'gtf' and 'l2l1', not {method!r}")
    GJ = np.ascontiguousarray(U[labeled])
    radius = 1.0 + np.abs(Y).max() * np.sqrt(n * Y.shape[1])
    res = _restarted_descent(np.ascontiguousarray(GP @ U), GJ, Y, lam, alpha,
                             beta, radius, budget, restarts, seed, tol)
    res.A = U @ res.A
    return res


def random_tiny_problem(seed: int, alpha_range=(0.1, 100.0)):
    """Random connected instance with n <= 30, m <= 5, c in {2, 3}.

    Returns ``(problem, alpha, beta)``; alpha and beta are uniform on
    ``alpha_range``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 31))
    m = int(rng.integers(1, 6))
    c = int(rng.integers(2, 4))
    l = int(rng.integers(c, n // 2 + 1))
    X = rng.standard_normal((n, 2))
    y = np.r_[np.arange(c), rng.integers(0, c, l - c)]
    # KNN edges plus a random spanning path keep every instance connected
    d2 = ((X[:, None] - X[None]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    nbrs = np.argsort(d2, axis=1, kind="stable")[:, :3]
    perm = rng.permutation(n)
    edges = np.vstack([np.column_stack([np.repeat(np.arange(n), 3), nbrs.ravel()]),
                       np.column_stack([perm[:-1], perm[1:]])])
    lo, hi = np.minimum(edges[:, 0], edges[:, 1]), np.maximum(edges[:, 0], edges[:, 1])
    pairs = np.unique(np.column_stack([lo, hi]), axis=0)
    w = np.exp(-d2[pairs[:, 0], pairs[:, 1]] / 2.0)
    g = Graph.from_edges(n, pairs, w)
    basis = smallest_eigenpairs(laplacian(g), m)
    Y = np.zeros((l, c))
    Y[np.arange(l), y] = 1.0
    alpha, beta = rng.uniform(*alpha_range, size=2)
    return Problem.from_parts(g, basis, Y), float(alpha), float(beta)


# ---------------------------------------------------------------------------
# experiment protocol

@dataclass(frozen=True)
class GraphContext:
    """Label-independent pieces shared by every run on one feature set."""

    graph: Graph
    L: object
    P: object
    basis: object
    n_components: int

    @classmethod
    def build(cls, features, k: int, xi: float, m: int, seed: int = 0):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            g = build_knn_graph(Dataset(features, [0]), k, xi)
        L = laplacian(g)
        n_comp, _ = connected_components(g)
        return cls(g, L, difference_operator(g),
                   smallest_eigenpairs(L, m, seed=seed), n_comp)


@dataclass(frozen=True)
class MethodParams:
    alpha: float = 100.0
    beta: float = 10.0
    baseline_alpha: float | None = None
    solver: SolverConfig | None = None

    def config(self, alpha=None) -> SolverConfig:
        base = self.solver or SolverConfig()
        return SolverConfig(**{**asdict(base), "alpha": alpha or self.alpha,
                               "beta": self.beta})

    def baseline_config(self) -> SolverConfig:
        return baseline_config(self.baseline_alpha or self.alpha)


def run_method(method: str, ctx: GraphContext, labeled, given, n_classes: int,
               params: MethodParams):
    """Fit one method; returns ``(predictions, soft labels, trace)``."""
    Y = np.zeros((len(labeled), n_classes))
    Y[np.arange(len(labeled)), given] = 1.0
    b_alpha = params.baseline_alpha or params.alpha
    if method == "siis":
        prob = Problem(ctx.P, ctx.basis.U, ctx.basis.eigenvalues, labeled, Y)
        res = solve(prob, params.config())
        return res.labels, res.F, res.trace
    if method == "gfhf":
        res = gfhf(ctx.L, Y, labeled)
    elif method == "l2l1":
        res = l2_l1_fidelity(ctx.L, Y, b_alpha, labeled, params.baseline_config())
    elif method == "gtf":
        res = gtf_only(ctx.P, Y, b_alpha, labeled, params.baseline_config())
    else:
        raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")
    return res.labels, res.F, res.trace


@dataclass
class RunRecord:
    method: str
    noise_rate: float
    run: int
    seed: int
    acc_labeled: float
    acc_unlabeled: float
    correction_rate: float
    iters: int
    seconds: float
    error: str = ""
    trace: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


REPORT_COLUMNS = ("method", "noise_rate", "run", "seed", "acc_L", "acc_U",
                  "correction_rate", "iters", "error")


@dataclass
class ExperimentReport:
    records: list
    params: dict = field(default_factory=dict)

    def rows(self):
        return [(r.method, r.noise_rate, r.run, r.seed, r.acc_labeled,
                 r.acc_unlabeled, r.correction_rate, r.iters, r.error)
                for r in self.records]

    def summary(self) -> list[dict]:
        """Mean and (population) std per ``(method, noise_rate)``."""
        out = []
        keys = dict.fromkeys((r.method, r.noise_rate) for r in self.records)
        for method, rate in keys:
            rs = [r for r in self.records
                  if r.method == method and r.noise_rate == rate and not r.error]
            entry = {"method": method, "noise_rate": rate, "runs": len(rs),
                     "failed": sum(1 for r in self.records if r.method == method
                                   and r.noise_rate == rate and r.error)}
            for name in ("acc_labeled", "acc_unlabeled", "correction_rate"):
                vals = np.array([getattr(r, name) for r in rs], dtype=float)
                vals = vals[~np.isnan(vals)]
                entry[name] = None if not len(vals) else {
                    "mean": float(vals.mean()), "std": float(vals.std())}
            entry["seconds"] = float(sum(r.seconds for r in rs))
            out.append(entry)
        return out

    def write(self, outdir, traces: bool = True, meta: str | None = None) -> None:
        """``report.csv``, ``timings.csv``, ``summary.json`` and per-run traces.

        Wall-clock times live only in ``timings.csv`` and the JSON summary so
        ``report.csv`` is reproducible byte for byte below its metadata line.
        """
        outdir = Path(outdir)
        _io.write_csv(outdir / "report.csv", REPORT_COLUMNS, self.rows(), meta)
        _io.write_csv(outdir / "timings.csv",
                      ("method", "noise_rate", "run", "seconds"),
                      [(r.method, r.noise_rate, r.run, r.seconds)
                       for r in self.records], meta)
        _io.write_json(outdir / "summary.json",
                       {"params": self.params, "summary": self.summary()})
        if traces:
            for r in self.records:
                if not len(r.trace):
                    continue
                name = f"trace_{r.method}_noise{r.noise_rate:g}_run{r.run}.csv"
                _io.write_csv(outdir / "traces" / name,
                              ("iter", "relative_change"),
                              [(i + 1, float(v)) for i, v in enumerate(r.trace)])


LADDER_ORDER = ("gfhf", "l2l1", "gtf", "siis")


@dataclass(frozen=True)
class LadderRow:
    seed: int
    accuracy: dict
    ordered: bool


def double_moon_ladder(seeds=range(10), n: int = 640, noise_std: float = 0.15,
                       k: int = 10, xi: float = 0.1, m: int = 2,
                       params: MethodParams | None = None,
                       signed: bool = True) -> list[LadderRow]:
    """Unlabeled accuracy of the four methods on noisy double moons.

    With ``signed`` every method fits a single column of +-1 labels (the
    binary form of the models) instead of one-hot columns. ``ordered``
    records whether gfhf < l2l1 < gtf <= siis on that seed.
    """
    params = params or MethodParams(alpha=10.0, beta=1.0, baseline_alpha=5.0)
    rows = []
    for seed in seeds:
        sample = make_double_moon(n, noise_std, seed=seed)
        data = sample.dataset
        ctx = GraphContext.build(data.features, k, xi, m, seed=seed)
        lab = sample.labeled
        unl = np.arange(len(lab), n)
        acc = {}
        for method in LADDER_ORDER:
            if signed:
                F = _fit_signed(method, ctx, lab, data.given_labels, params)
                pred = np.where(F >= 0, 0, 1)
            else:
                pred, _, _ = run_method(method, ctx, lab, data.given_labels, 2,
                                        params)
            acc[method] = float(np.mean(pred[unl] == sample.truth[unl]))
        a = [acc[mth] for mth in LADDER_ORDER]
        rows.append(LadderRow(int(seed), acc, a[0] < a[1] < a[2] <= a[3]))
    return rows


def _fit_signed(method, ctx, labeled, given, params):
    # class 0 -> +1, class 1 -> -1
    y = np.where(np.asarray(given) == 0, 1.0, -1.0)
    b_alpha = params.baseline_alpha or params.alpha
    if method == "siis":
        prob = Problem(ctx.P, ctx.basis.U, ctx.basis.eigenvalues, labeled, y)
        return solve(prob, params.config()).F[:, 0]
    if method == "gfhf":
        return gfhf(ctx.L, y, labeled).F[:, 0]
    if method == "l2l1":
        return l2_l1_fidelity(ctx.L, y, b_alpha, labeled,
                              params.baseline_config()).F[:, 0]
    return gtf_only(ctx.P, y, b_alpha, labeled, params.baseline_config()).F[:, 0]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("SIIS_THREADS", "1")))
    except ValueError:
        return 1


def _check_methods(methods):
    methods = list(methods)
    if not methods:
        raise ValidationError("method list is empty")
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise ValidationError(f"unknown method(s) {bad}; choose from {list(METHODS)}")
    return methods


def run_experiment(pool: LabeledPool, methods=METHODS,
                   noise_levels=(0.0, 0.2, 0.4, 0.6), repetitions: int = 10,
                   seed: int = 0, labeled_per_class: int = 10, k: int = 10,
                   xi: float = 1.0, m: int = 30,
                   params: MethodParams | None = None,
                   max_workers: int | None = None,
                   context: GraphContext | None = None) -> ExperimentReport:
    """Methods x noise levels x repetitions on one pool of examples.

    Repetition ``r`` draws its labeled set from ``derive_seed(seed, r)`` and
    its noise from ``derive_seed(seed, r, level index)``, so every method sees
    the same noisy labels. A failing run is recorded with its error message
    rather than aborting the experiment.
    """
    methods = _check_methods(methods)
    noise_levels = [float(v) for v in noise_levels]
    if not noise_levels:
        raise ValidationError("no noise levels given")
    for v in noise_levels:
        if not 0 <= v < 1:
            raise ValidationError(f"noise rate {v} outside [0, 1)")
    if repetitions < 1:
        raise ValidationError("repetitions must be positive")
    params = params or MethodParams()
    ctx = context or GraphContext.build(pool.features, k, xi, m, seed=seed)
    c = pool.n_classes

    def one_repetition(rep):
        rep_seed = derive_seed(seed, rep)
        labeled = choose_labeled(pool.truth, labeled_per_class, rep_seed)
        out = []
        for li, rate in enumerate(noise_levels):
            noise_seed = derive_seed(seed, rep, li)
            given, flip_pos = inject_label_noise(pool.truth[labeled], rate, c,
                                                 noise_seed)
            for method in methods:
                t0 = time.perf_counter()
                try:
                    pred, _, trace = run_method(method, ctx, labeled, given, c, params)
                    met = evaluate(pred, pool.truth, labeled, labeled[flip_pos])
                    rec = RunRecord(method, rate, rep, noise_seed,
                                    met.acc_labeled, met.acc_unlabeled,
                                    met.correction_rate, len(trace),
                                    time.perf_counter() - t0, trace=trace)
                except SIISError as exc:
                    rec = RunRecord(method, rate, rep, noise_seed, np.nan, np.nan,
                                    np.nan, 0, time.perf_counter() - t0,
                                    error=f"{type(exc).__name__}: {exc}")
                out.append(rec)
        return out

    workers = max_workers or default_workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            chunks = list(ex.map(one_repetition, range(repetitions)))
    else:
        chunks = [one_repetition(r) for r in range(repetitions)]
    records = sorted((r for ch in chunks for r in ch),
                     key=lambda r: (methods.index(r.method),
                                    noise_levels.index(r.noise_rate), r.run))
    return ExperimentReport(records, {
        "dataset": pool.name, "n": pool.n, "classes": c, "methods": methods,
        "noise_levels": noise_levels, "repetitions": repetitions, "seed": seed,
        "labeled_per_class": labeled_per_class, "k": k, "xi": xi, "m": m,
        "alpha": params.alpha, "beta": params.beta,
        "baseline_alpha": params.baseline_alpha or params.alpha})


def sweep(pool: LabeledPool, alphas, betas, noise_rate: float = 0.4,
          repetitions: int = 10, seed: int = 0, labeled_per_class: int = 10,
          k: int = 10, xi: float = 1.0, m: int = 30,
          context: GraphContext | None = None) -> list[tuple]:
    """SIIS accuracy over the alpha x beta grid at one noise level.

    Returns rows ``(alpha, beta, acc_L mean, acc_L std, acc_U mean, acc_U std)``.
    """
    alphas, betas = [float(a) for a in alphas], [float(b) for b in betas]
    if not alphas or not betas:
        raise ValidationError("parameter grid is empty")
    ctx = context or GraphContext.build(pool.features, k, xi, m, seed=seed)
    rows = []
    for a in alphas:
        for b in betas:
            rep = run_experiment(pool, ["siis"], [noise_rate], repetitions, seed,
                                 labeled_per_class, k, xi, m,
                                 MethodParams(alpha=a, beta=b), context=ctx)
            acc_l = np.array([r.acc_labeled for r in rep.records])
            acc_u = np.array([r.acc_unlabeled for r in rep.records])
            rows.append((a, b, float(np.nanmean(acc_l)), float(np.nanstd(acc_l)),
                         float(np.nanmean(acc_u)), float(np.nanstd(acc_u))))
    return rows
