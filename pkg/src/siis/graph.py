"""KNN similarity graphs and the matrices derived from them.

Vertices are ordered so that the ``l`` labeled examples come first; every
matrix below (``W``, ``L``, ``P`` and the selector ``J``) uses that order.
Class labels are 0-based integers throughout the package.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from .errors import (DataIOError, DegenerateGraphError, InvalidLabelError,
                     ValidationError)


class DisconnectedGraphWarning(UserWarning):
    """The graph has more than one connected component."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus the given (possibly wrong) labels of the first rows.

    Parameters
    ----------
    features : ndarray or sparse matrix, shape (n, d)
    given_labels : ndarray of int, shape (l,)
        Labels of rows ``0..l-1``. Rows ``l..n-1`` are unlabeled.
    order : ndarray of int, shape (n,), optional
        Original row index of every example, for files whose labeled rows
        were not stored first.
    """

    features: np.ndarray | sparse.spmatrix
    given_labels: np.ndarray
    order: np.ndarray | None = None

    def __post_init__(self):
        X = self.features
        if not sparse.issparse(X):
            X = np.asarray(X, dtype=float)
            if X.ndim == 1:
                X = X[:, None]
            object.__setattr__(self, "features", X)
            finite = np.isfinite(X).all()
        else:
            X = sparse.csr_matrix(X, dtype=float)
            object.__setattr__(self, "features", X)
            finite = np.isfinite(X.data).all()
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValidationError("features must be an n x d matrix with d >= 1")
        if not finite:
            raise ValidationError("features contain NaN or Inf")
        y = np.asarray(self.given_labels, dtype=int).ravel()
        object.__setattr__(self, "given_labels", y)
        if len(y) < 1 or len(y) > X.shape[0]:
            raise ValidationError(
                f"need 1 <= labeled_count <= n, got l={len(y)}, n={X.shape[0]}")
        if (y < 0).any():
            raise InvalidLabelError("labels must be nonnegative class indices")

    @property
    def labeled_count(self) -> int:
        return len(self.given_labels)

    @property
    def total_count(self) -> int:
        return self.features.shape[0]

    @property
    def n_classes(self) -> int:
        return int(self.given_labels.max()) + 1


@dataclass(frozen=True)
class Graph:
    """Symmetric weighted graph stored as a CSR adjacency plus its edge list.

    The edge list holds each undirected edge once with ``i < j``, sorted
    lexicographically.
    """

    W: sparse.csr_matrix
    edges: np.ndarray  # (|E|, 2) int
    weights: np.ndarray  # (|E|,)
    xi: float = np.nan
    k: int = 0

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    @property
    def degree(self) -> np.ndarray:
        return np.asarray(self.W.sum(axis=1)).ravel()

    @classmethod
    def from_edges(cls, n, edges, weights=None, xi=np.nan, k=0) -> "Graph":
        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        if weights is None:
            weights = np.ones(len(edges))
        weights = np.asarray(weights, dtype=float)
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        if (lo == hi).any():
            raise ValidationError("self-loops are not allowed")
        if (weights <= 0).any():
            raise ValidationError("edge weights must be positive")
        order = np.lexsort((hi, lo))
        lo, hi, weights = lo[order], hi[order], weights[order]
        keep = np.ones(len(lo), dtype=bool)
        keep[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        lo, hi, weights = lo[keep], hi[keep], weights[keep]
        W = sparse.coo_matrix(
            (np.r_[weights, weights], (np.r_[lo, hi], np.r_[hi, lo])),
            shape=(n, n)).tocsr()
        W.sort_indices()
        return cls(W, np.column_stack([lo, hi]), weights, float(xi), int(k))

    @classmethod
    def from_adjacency(cls, W, xi=np.nan, k=0) -> "Graph":
        W = sparse.csr_matrix(W, dtype=float)
        if W.shape[0] != W.shape[1]:
            raise ValidationError("adjacency must be square")
        if abs(W - W.T).max() > 0:
            raise ValidationError("adjacency must be symmetric")
        upper = sparse.triu(W, k=1).tocoo()
        return cls.from_edges(W.shape[0], np.column_stack([upper.row, upper.col]),
                              upper.data, xi=xi, k=k)


@dataclass(frozen=True)
class LabelIndicator:
    """Selector of the labeled rows and their one-hot label matrix."""

    labeled: np.ndarray
    Y: np.ndarray
    n: int
    J: sparse.csr_matrix = field(repr=False, default=None)

    def __post_init__(self):
        if self.J is None:
            l = len(self.labeled)
            J = sparse.csr_matrix((np.ones(l), (np.arange(l), self.labeled)),
                                  shape=(l, self.n))
            object.__setattr__(self, "J", J)


def _squared_distances(X, rows):
    if sparse.issparse(X):
        sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        block = X[rows] @ X.T
        d2 = sq[rows, None] + sq[None, :] - 2 * block.toarray()
        return np.maximum(d2, 0.0)
    return cdist(X[rows], X, "sqeuclidean")


def _pair_distances(X, i, j):
    if sparse.issparse(X):
        diff = X[i] - X[j]
        return np.asarray(diff.multiply(diff).sum(axis=1)).ravel()
    return np.sum((X[i] - X[j]) ** 2, axis=1)


def build_knn_graph(data: Dataset, k: int = 10, xi: float = 1.0,
                    chunk_size: int = 512) -> Graph:
    """Exact KNN graph with Gaussian weights ``exp(-|xi - xj|^2 / (2 xi^2))``.

    An edge joins ``i`` and ``j`` when either is among the other's ``k``
    nearest neighbors (union rule). Distance ties are broken toward the
    smaller vertex index.
    """
    X = data.features
    n = X.shape[0]
    if not (isinstance(k, (int, np.integer)) and 1 <= k < n):
        raise ValidationError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    if not xi > 0:
        raise ValidationError(f"kernel width xi must be positive, got {xi}")

    heads, tails = [], []
    for start in range(0, n, chunk_size):
        rows = np.arange(start, min(start + chunk_size, n))
        d2 = _squared_distances(X, rows)
        d2[np.arange(len(rows)), rows] = np.inf
        # stable sort keeps equal distances in index order
        nbrs = np.argsort(d2, axis=1, kind="stable")[:, :k]
        heads.append(np.repeat(rows, k))
        tails.append(nbrs.ravel())
    heads, tails = np.concatenate(heads), np.concatenate(tails)
    lo, hi = np.minimum(heads, tails), np.maximum(heads, tails)
    pairs = np.unique(np.column_stack([lo, hi]), axis=0)

    d2 = _pair_distances(X, pairs[:, 0], pairs[:, 1])
    weights = np.exp(-d2 / (2.0 * xi ** 2))
    # weights underflowing to zero would silently drop edges
    weights = np.maximum(weights, np.finfo(float).tiny)
    g = Graph.from_edges(n, pairs, weights, xi=xi, k=k)
    n_comp, _ = connected_components(g)
    if n_comp > 1:
        warnings.warn(f"KNN graph has {n_comp} connected components; "
                      "the convergence guarantee assumes a connected graph",
                      DisconnectedGraphWarning, stacklevel=2)
    return g


def laplacian(g: Graph) -> sparse.csr_matrix:
    """Combinatorial Laplacian ``D - W``."""
    L = sparse.diags(g.degree) - g.W
    return sparse.csr_matrix(L)


def difference_operator(g: Graph) -> sparse.csr_matrix:
    """Weighted edge-difference operator ``P`` of shape ``(|E|, n)``.

    Row ``k`` holds ``+w`` at the smaller endpoint of edge ``k`` and ``-w``
    at the larger one, following ``g.edges``.
    """
    if g.n_edges == 0:
        raise DegenerateGraphError("graph has no edges")
    m = g.n_edges
    rows = np.repeat(np.arange(m), 2)
    cols = g.edges.ravel()
    vals = np.column_stack([g.weights, -g.weights]).ravel()
    return sparse.csr_matrix((vals, (rows, cols)), shape=(m, g.n))


def connected_components(g: Graph) -> tuple[int, np.ndarray]:
    return csgraph.connected_components(g.W, directed=False)


def label_indicator(data: Dataset | np.ndarray, n_classes: int | None = None,
                    n: int | None = None, labeled=None) -> LabelIndicator:
    """One-hot label matrix ``Y`` and selector ``J``.

    ``data`` may be a :class:`Dataset` or a bare label vector, in which case
    ``n`` must be given. ``labeled`` defaults to the first ``l`` vertices.
    """
    if isinstance(data, Dataset):
        y, n = data.given_labels, data.total_count
    else:
        y = np.asarray(data, dtype=int).ravel()
        if n is None:
            raise ValidationError("n is required when passing bare labels")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if (y < 0).any() or (y >= n_classes).any():
        raise InvalidLabelError(f"labels must lie in 0..{n_classes - 1}")
    labeled = np.arange(len(y)) if labeled is None else np.asarray(labeled, int)
    if len(labeled) != len(y):
        raise ValidationError("labeled indices and labels differ in length")
    if len(np.unique(labeled)) != len(labeled):
        raise ValidationError("labeled indices must be distinct")
    Y = np.zeros((len(y), n_classes))
    Y[np.arange(len(y)), y] = 1.0
    return LabelIndicator(labeled, Y, n)


# ---------------------------------------------------------------------------
# file formats

def _labeled_first(features, labels):
    labels = np.asarray(labels, dtype=object)
    has = np.array([lab is not None for lab in labels], dtype=bool)
    order = np.r_[np.flatnonzero(has), np.flatnonzero(~has)]
    if not has.any():
        raise ValidationError("dataset has no labeled examples")
    given = np.array([int(v) for v in labels[has]], dtype=int)
    return Dataset(features[order], given, order=order)


def load_csv(path, has_labels: bool = True) -> Dataset:
    """Read a CSV of feature columns followed by an optional label column.

    An empty label cell marks an unlabeled example. A non-numeric first row
    is treated as a header. Labeled rows are moved to the front; the
    original row ids are kept in ``Dataset.order``.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise DataIOError(f"{path} holds no data rows")
    feats, labels = [], []
    for r in rows:
        if has_labels:
            *x, lab = r
            labels.append(int(float(lab)) if lab.strip() else None)
        else:
            x = r
            labels.append(None)
        feats.append([float(v) for v in x])
    try:
        X = np.array(feats, dtype=float)
    except ValueError as exc:
        raise DataIOError(f"{path}: ragged feature rows") from exc
    return _labeled_first(X, labels)


def load_sparse(path, n_features: int | None = None) -> Dataset:
    """Read ``label idx:value idx:value ...`` lines (1-based indices).

    A leading ``?`` or a missing label token marks an unlabeled example.
    """
    path = Path(path)
    rows, cols, vals, labels = [], [], [], []
    try:
        with path.open() as fh:
            lines = [ln.split("#", 1)[0].split() for ln in fh]
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    lines = [t for t in lines if t]
    for r, tokens in enumerate(lines):
        if ":" not in tokens[0]:
            lab, tokens = tokens[0], tokens[1:]
            labels.append(None if lab == "?" else int(float(lab)))
        else:
            labels.append(None)
        for tok in tokens:
            idx, val = tok.split(":")
            rows.append(r)
            cols.append(int(idx) - 1)
            vals.append(float(val))
    d = max(cols, default=-1) + 1
    if n_features is not None:
        d = max(d, n_features)
    X = sparse.csr_matrix((vals, (rows, cols)), shape=(len(lines), max(d, 1)))
    return _labeled_first(X, labels)


def save_edge_list(g: Graph, path) -> None:
    """Write one ``i j weight`` line per edge."""
    np.savetxt(path, np.column_stack([g.edges, g.weights]),
               fmt=["%d", "%d", "%.17g"])
