"""Spectral decomposition A = sum_r theta_r E_r with clustered distinct eigenvalues.

This is the engine behind every analysis in the toolkit: eigenvalues are
merged into distinct values, each with its orthogonal projector (spectral
idempotent) stored as a dense matrix, because all downstream formulas consume
the idempotents entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsistencyError
from .graphs import Graph

__all__ = ["SpectralDecomposition", "decompose", "eigenvalue_support"]

CLUSTER_REL_TOL = 1e-9
INTEGER_TOL = 1e-8
SUPPORT_TOL = 1e-8


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (strictly decreasing) and their spectral idempotents.

    Attributes
    ----------
    matrix:
        The symmetric matrix that was decomposed (float copy).
    eigenvalues:
        Shape ``(d+1,)``, strictly decreasing distinct eigenvalues.
    idempotents:
        Shape ``(d+1, n, n)``; ``idempotents[r]`` projects onto the
        ``eigenvalues[r]`` eigenspace.  They are basis-independent, so the
        decomposition is deterministic for a fixed input.
    multiplicities:
        Eigenspace dimensions; sums to ``n``.
    integer_spectrum:
        True when every distinct eigenvalue is within 1e-8 of an integer and
        the rounded values pass a residual check on each eigenvector.
    cluster_tol:
        The absolute tolerance that was used to merge eigenvalues.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    idempotents: np.ndarray
    multiplicities: np.ndarray
    integer_spectrum: bool
    cluster_tol: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def d(self) -> int:
        """Index of the last distinct eigenvalue (there are d+1 of them)."""
        return len(self.eigenvalues) - 1

    @cached_property
    def integer_eigenvalues(self) -> np.ndarray:
        if not self.integer_spectrum:
            raise ValueError("spectrum is not certified integral")
        return np.rint(self.eigenvalues).astype(int)

    def validate(self) -> None:
        """Check the idempotent algebra; raises ConsistencyError on failure."""
        n = self.n
        e = self.idempotents
        ident = np.eye(n)
        if np.linalg.norm(e.sum(axis=0) - ident) > 1e-10 * n:
            raise ConsistencyError("idempotents do not sum to the identity")
        for r in range(len(e)):
            for s in range(r, len(e)):
                prod = e[r] @ e[s]
                target = e[r] if r == s else 0.0
                if np.linalg.norm(prod - target) > 1e-9:
                    raise ConsistencyError(f"idempotent product E_{r}E_{s} violated")
        recon = np.einsum("r,rij->ij", self.eigenvalues, e)
        scale = max(np.linalg.norm(self.matrix), 1e-30)
        if np.linalg.norm(recon - self.matrix) > 1e-9 * scale:
            raise ConsistencyError("eigenvalue/idempotent reconstruction of A failed")
        if int(self.multiplicities.sum()) != n:
            raise ConsistencyError("multiplicities do not sum to n")
        traces = np.einsum("rii->r", e)
        if np.max(np.abs(traces - self.multiplicities)) > 1e-8:
            raise ConsistencyError("idempotent traces do not match multiplicities")


def _cluster(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group ascending eigenvalues by chaining adjacent gaps <= tol."""
    groups = []
    start = 0
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > tol:
            groups.append(np.arange(start, i))
            start = i
    groups.append(np.arange(start, len(w)))
    return groups


def decompose(graph_or_matrix, cluster_tol: float | None = None) -> SpectralDecomposition:
    """Eigendecompose a graph adjacency matrix (or any symmetric matrix).

    Eigenvalues within ``cluster_tol`` of each other (default: 1e-9 times the
    spectral radius) are merged into one distinct eigenvalue whose value is
    the mean of the cluster; the idempotent is the sum of the outer products
    of the cluster's orthonormal eigenvectors.
    """
    if isinstance(graph_or_matrix, Graph):
        a = graph_or_matrix.adjacency()
    else:
        a = np.array(graph_or_matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if a.shape[0] == 0:
            raise ValueError("matrix must be nonempty")
        if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise ValueError("matrix must be symmetric")
        a = 0.5 * (a + a.T)
    if cluster_tol is not None and cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")

    w, vecs = np.linalg.eigh(a)
    radius = float(np.max(np.abs(w))) if len(w) else 0.0
    tol = cluster_tol if cluster_tol is not None else CLUSTER_REL_TOL * radius

    groups = _cluster(w, tol)
    values = []
    projectors = []
    mults = []
    for idx in groups:
        spread = float(w[idx[-1]] - w[idx[0]])
        if spread > 10 * tol:
            raise ConsistencyError(
                f"eigenvalue cluster spans {spread:.3e}, exceeding 10 x cluster_tol "
                f"({tol:.3e}); input too ill-conditioned to decompose reliably"
            )
        vc = vecs[:, idx]
        proj = vc @ vc.T
        values.append(float(np.mean(w[idx])))
        projectors.append(0.5 * (proj + proj.T))
        mults.append(len(idx))

    # descending eigenvalue order
    values = values[::-1]
    projectors = projectors[::-1]
    mults = mults[::-1]

    rounded = np.rint(values)
    integral = bool(np.max(np.abs(np.asarray(values) - rounded)) <= INTEGER_TOL)
    if integral and len(set(rounded.astype(int))) != len(values):
        integral = False
    if integral:
        for idx, group in enumerate(groups[::-1]):
            theta = rounded[idx]
            for col in group:
                vec = vecs[:, col]
                if np.linalg.norm(a @ vec - theta * vec) > INTEGER_TOL:
                    integral = False
                    break
            if not integral:
                break

    return SpectralDecomposition(
        matrix=a,
        eigenvalues=np.asarray(values),
        idempotents=np.stack(projectors),
        multiplicities=np.asarray(mults, dtype=int),
        integer_spectrum=integral,
        cluster_tol=float(tol),
    )


def eigenvalue_support(dec: SpectralDecomposition, u: int, support_tol: float = SUPPORT_TOL) -> frozenset[int]:
    """Indices r whose idempotent has a nonzero column at vertex ``u``."""
    if not 0 <= u < dec.n:
        raise ValueError(f"vertex {u} out of range")
    norms = np.linalg.norm(dec.idempotents[:, :, u], axis=1)
    return frozenset(int(r) for r in np.nonzero(norms > support_tol)[0])
