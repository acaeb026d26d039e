"""Smallest eigenpairs of a graph Laplacian."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import EigensolverError, ValidationError

DENSE_LIMIT = 200


@dataclass(frozen=True)
class SpectralBasis:
    """Ascending eigenvalues and orthonormal eigenvectors (columns of ``U``)."""

    eigenvalues: np.ndarray
    U: np.ndarray

    @property
    def m(self) -> int:
        return len(self.eigenvalues)

    @property
    def Sigma(self) -> np.ndarray:
        return np.diag(self.eigenvalues)


def _fix_signs(U):
    idx = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[idx, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def residuals(L, basis: SpectralBasis) -> np.ndarray:
    R = L @ basis.U - basis.U * basis.eigenvalues
    return np.linalg.norm(R, axis=0)


def smallest_eigenpairs(L, m: int = 30, method: str = "auto", seed: int = 0,
                        tol: float = 1e-8, maxiter: int | None = None
                        ) -> SpectralBasis:
    """The ``m`` smallest eigenpairs of a symmetric PSD matrix.

    Parameters
    ----------
    L : sparse or dense (n, n) matrix
    m : int
        Number of eigenpairs, ``1 <= m <= n``.
    method : {'auto', 'dense', 'lanczos'}
        ``'auto'`` uses a dense solver for ``n <= 200`` and implicitly
        restarted Lanczos (ARPACK, shift-invert about a small negative shift)
        otherwise.
    seed : int
        Seeds the Lanczos start vector.
    tol, maxiter
        Lanczos tolerance and restart budget (default ``30 * m``).

    Returns
    -------
    SpectralBasis
        Columns are sign-normalized so the largest-magnitude entry of each
        is positive.
    """
    n = L.shape[0]
    if not (isinstance(m, (int, np.integer)) and 1 <= m <= n):
        raise ValidationError(f"basis size m must satisfy 1 <= m <= n (m={m}, n={n})")
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT or m >= n - 1 else "lanczos"

    if method == "dense":
        dense = L.toarray() if sparse.issparse(L) else np.asarray(L, dtype=float)
        vals, vecs = np.linalg.eigh(dense)
        vals, vecs = vals[:m], vecs[:, :m]
    elif method == "lanczos":
        if m >= n - 1:
            raise ValidationError("Lanczos path needs m < n - 1; use method='dense'")
        L = sparse.csc_matrix(L, dtype=float)
        scale = max(abs(L).sum(axis=1).max(), 1.0)
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            vals, vecs = spla.eigsh(L, k=m, sigma=-1e-3 * scale, which="LM",
                                    v0=v0, tol=tol,
                                    maxiter=maxiter or 30 * m)
        except spla.ArpackNoConvergence as exc:
            raise EigensolverError(
                f"Lanczos did not converge: {len(exc.eigenvalues)} of {m} "
                "eigenpairs found") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        # re-orthonormalize: clustered eigenvalues leave small drift
        vecs, _ = np.linalg.qr(vecs)
        vals = np.einsum("ij,ij->j", vecs, L @ vecs)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    else:
        raise ValidationError(f"unknown eigensolver method {method!r}")

    vals = np.maximum(vals, 0.0)
    basis = SpectralBasis(vals, _fix_signs(vecs))
    res = residuals(L, basis)
    bound = 1e-6 * np.maximum(1.0, vals)
    if (res > bound).any():
        k = int(np.argmax(res / bound))
        raise EigensolverError(
            f"eigenpair {k} residual {res[k]:.3e} exceeds {bound[k]:.3e}")
    return basis


def export_spectrum(basis: SpectralBasis, path, vectors_path=None) -> None:
    """CSV of ``k, eigenvalue``; optionally a CSV dump of ``U``."""
    k = np.arange(1, basis.m + 1)
    np.savetxt(path, np.column_stack([k, basis.eigenvalues]), delimiter=",",
               header="k,eigenvalue", comments="", fmt=["%d", "%.17g"])
    if vectors_path is not None:
        header = ",".join(f"u{i}" for i in k)
        np.savetxt(vectors_path, basis.U, delimiter=",", header=header,
                   comments="", fmt="%.17g")
