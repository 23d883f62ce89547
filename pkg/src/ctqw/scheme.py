"""Association-scheme machinery for distance-regular graphs.

For a connected distance-regular graph of diameter d, the 0/1 distance
matrices A_0..A_d and the spectral idempotents E_0..E_d are two bases of the
same commutative algebra; the eigenmatrices P and Q translate between them:

    A_j = sum_i P_ij E_i          E_j = (1/n) sum_i Q_ij A_i          P Q = n I

Rows of P are indexed by eigenvalues of A_1 in decreasing order, so the
column P[:, 1] lists those eigenvalues.  Expanding U(t) in the distance basis
gives the eigenvalues of the mixing matrix M(t) in closed form:

    lambda_l(t) = (1/n^2) sum_s P_ls |c_s(t)|^2,
    c_s(t) = sum_r exp(i t P_r1) Q_sr

Uniform mixing at time t is equivalent to lambda(t) = (1, 0, ..., 0): a
doubly stochastic symmetric matrix whose spectrum is {1, 0^(n-1)} can only be
J/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._scan import chunked_map, local_minima_indices, refine_minimum
from .errors import ConsistencyError, NotApplicableError, NotDistanceRegularError
from .graphs import Graph
from .spectral import SpectralDecomposition, decompose
from .walk import mixing_batch

__all__ = [
    "SchemeData",
    "MixingEigenvalues",
    "UniformMixingReport",
    "RootsOfUnityReport",
    "scheme_from_drg",
    "mixing_eigenvalues",
    "is_scaled_J",
    "uniform_mixing_test",
    "hadamard_lambda2",
    "uniform_mixing_scan",
    "roots_of_unity_probe",
]

PQ_TOL = 1e-8
UM_SCAN_TOL = 1e-8


@dataclass(frozen=True)
class SchemeData:
    """Distance matrices, idempotents, and eigenmatrices of a metric scheme."""

    n: int
    d: int
    distance_matrices: np.ndarray  # (d+1, n, n), 0/1
    idempotents: np.ndarray        # (d+1, n, n)
    multiplicities: np.ndarray
    eigenvalues: np.ndarray        # of A_1, decreasing (= P[:, 1])
    P: np.ndarray
    Q: np.ndarray
    decomposition: SpectralDecomposition

    def validate(self) -> None:
        n, d = self.n, self.d
        a = self.distance_matrices
        e = self.idempotents
        if np.max(np.abs(a.sum(axis=0) - np.ones((n, n)))) > 0:
            raise ConsistencyError("distance matrices do not sum to J")
        if np.max(np.abs(a[0] - np.eye(n))) > 0:
            raise ConsistencyError("A_0 is not the identity")
        if np.linalg.norm(e.sum(axis=0) - np.eye(n)) > 1e-8:
            raise ConsistencyError("idempotents do not sum to I")
        if np.max(np.abs(self.P @ self.Q - n * np.eye(d + 1))) > PQ_TOL:
            raise ConsistencyError("P Q != n I")
        for j in range(d + 1):
            recon = np.einsum("i,iuv->uv", self.P[:, j], e)
            if np.max(np.abs(recon - a[j])) > 1e-8:
                raise ConsistencyError(f"A_{j} != sum_i P_ij E_i")
            recon = np.einsum("i,iuv->uv", self.Q[:, j], a) / n
            if np.max(np.abs(recon - e[j])) > 1e-8:
                raise ConsistencyError(f"E_{j} != (1/n) sum_i Q_ij A_i")


def _distance_matrix(graph: Graph) -> np.ndarray:
    dist = np.stack([graph.bfs_distances(u) for u in range(graph.n)])
    if (dist < 0).any():
        raise NotApplicableError("graph must be connected")
    return dist


def scheme_from_drg(graph: Graph) -> SchemeData:
    """Build the metric association scheme of a distance-regular graph.

    Verifies distance-regularity exactly: every product A_i A_j must be
    constant on each distance class.  Rejection names a violated (i, j, k)
    triple with two vertex pairs realizing different counts.
    """
    if not graph.is_unweighted():
        raise NotApplicableError("association scheme requires an unweighted graph")
    dist = _distance_matrix(graph)
    n = graph.n
    d = int(dist.max())
    a_stack = np.stack([(dist == i).astype(np.int64) for i in range(d + 1)])

    for i in range(d + 1):
        for j in range(i, d + 1):
            prod = a_stack[i] @ a_stack[j]
            for k in range(d + 1):
                mask = dist == k
                vals = prod[mask]
                if vals.size and vals.min() != vals.max():
                    lo = np.argwhere(mask & (prod == vals.min()))[0]
                    hi = np.argwhere(mask & (prod == vals.max()))[0]
                    raise NotDistanceRegularError(
                        f"not distance-regular: |{{w : d(u,w)={i}, d(w,v)={j}}}| at distance {k} "
                        f"is {vals.min()} for {tuple(lo)} but {vals.max()} for {tuple(hi)}",
                        witness=(i, j, k, tuple(int(x) for x in lo), tuple(int(x) for x in hi)),
                    )

    dec = decompose(graph)
    if dec.d != d:
        raise NotDistanceRegularError(
            f"adjacency matrix has {dec.d + 1} distinct eigenvalues but diameter is {d}"
        )
    p = np.empty((d + 1, d + 1))
    for i in range(d + 1):
        for j in range(d + 1):
            p[i, j] = np.einsum("uv,vu->", dec.idempotents[i], a_stack[j]) / dec.multiplicities[i]
    q = n * np.linalg.inv(p)
    scheme = SchemeData(
        n=n,
        d=d,
        distance_matrices=a_stack,
        idempotents=dec.idempotents,
        multiplicities=dec.multiplicities,
        eigenvalues=dec.eigenvalues,
        P=p,
        Q=q,
        decomposition=dec,
    )
    scheme.validate()
    return scheme


@dataclass(frozen=True)
class MixingEigenvalues:
    """Eigenvalues of M(t), one per idempotent, via the P/Q closed form."""

    t: float
    values: np.ndarray


def mixing_eigenvalues(scheme: SchemeData, t: float) -> MixingEigenvalues:
    """lambda_l(t) = (1/n^2) sum_{s,r,r'} e^{it(P_r1 - P_r'1)} Q_sr Q_sr' P_ls."""
    phases = np.exp(1j * t * scheme.P[:, 1])
    c = scheme.Q @ phases
    weights = c * c.conj()
    if np.max(np.abs(weights.imag)) > 1e-9:
        raise ConsistencyError("mixing eigenvalue sum has a non-real residue")
    lam = (scheme.P @ weights.real) / scheme.n**2
    return MixingEigenvalues(t=float(t), values=lam)


def is_scaled_J(m, tol: float = 1e-9) -> bool:
    """True iff ``m`` is (within tol) symmetric doubly stochastic with spectrum {1, 0^(n-1)}.

    Such a matrix can only be J/n, which is also asserted directly as a
    cross-check.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    if np.max(np.abs(m - m.T)) > tol:
        return False
    if np.max(np.abs(m.sum(axis=1) - 1)) > tol:
        return False
    eigs = np.sort(np.linalg.eigvalsh(m))
    spectrum_ok = abs(eigs[-1] - 1) <= tol and (np.abs(eigs[:-1]) <= tol).all()
    direct_ok = np.max(np.abs(m - np.ones((n, n)) / n)) <= tol
    return bool(spectrum_ok and direct_ok)


def uniform_mixing_test(scheme: SchemeData, t: float, tol: float = 1e-8) -> bool:
    """Uniform mixing at t iff the mixing eigenvalues are (1, 0, ..., 0)."""
    lam = mixing_eigenvalues(scheme, t).values
    return bool(abs(lam[0] - 1) <= tol and np.max(np.abs(lam[1:])) <= tol)


def hadamard_lambda2(n: int, t: float) -> float:
    """Closed form controlling uniform mixing on the order-n Hadamard graph.

    Returns ``4 cos(2 sqrt(n) t) + 12 + (16/n) cos(n t) - 16/n``.  This is 16
    times the corresponding mixing-matrix eigenvalue (it equals 16 at t = 0),
    but its zero set is what matters: it is bounded below by 8 - 32/n, so it
    can only vanish when n <= 4.  For n = 4 it vanishes at t = pi/4, where the
    order-4 graph (the 4-cube on 16 vertices) mixes uniformly.
    """
    if n < 2:
        raise ValueError("order must be at least 2")
    return 4 * math.cos(2 * math.sqrt(n) * t) + 12 + (16 / n) * math.cos(n * t) - 16 / n


@dataclass(frozen=True)
class UniformMixingReport:
    t_max: float
    step: float
    tol: float
    best_time: float
    deviation: float
    verdict: str  # "uniform-found" | "none-found-on-grid"


def uniform_mixing_scan(
    dec: SpectralDecomposition,
    t_max: float,
    step: float,
    tol: float = UM_SCAN_TOL,
    threads: int = 1,
) -> UniformMixingReport:
    """Scan max |M(t) - J/n| on a grid, refining local minima.

    Reports the best candidate time; a "none-found-on-grid" verdict makes no
    nonexistence claim.
    """
    if t_max <= 0 or step <= 0:
        raise ValueError("t_max and step must be positive")
    n = dec.n
    flat_value = 1.0 / n
    ts = np.arange(0.0, t_max + step / 2, step)

    def deviation_chunk(chunk: np.ndarray) -> np.ndarray:
        m = mixing_batch(dec, chunk)
        return np.abs(m - flat_value).max(axis=(1, 2))

    devs = chunked_map(deviation_chunk, ts, threads=threads)

    def deviation_at(t: float) -> float:
        return float(deviation_chunk(np.array([t]))[0])

    best_t = float(ts[int(np.argmin(devs))])
    best_dev = float(np.min(devs))
    # the grid overshoots a deviation zero by at most (max slope) * step
    radius = float(np.max(np.abs(dec.eigenvalues))) if dec.n > 1 else 0.0
    slack = 2 * radius * step + 1e-12
    cutoff = max(tol, best_dev) + slack
    minima = [idx for idx in local_minima_indices(devs) if devs[idx] <= cutoff]
    found = False
    for idx in minima[:256]:  # earliest tolerable minimum wins
        t_ref, d_ref = refine_minimum(deviation_at, float(ts[idx]), step, lo=0.0, hi=t_max)
        if d_ref <= tol:
            best_t, best_dev, found = float(t_ref), float(d_ref), True
            break
        if d_ref < best_dev:
            best_t, best_dev = float(t_ref), float(d_ref)
    verdict = "uniform-found" if found else "none-found-on-grid"
    return UniformMixingReport(
        t_max=float(t_max),
        step=float(step),
        tol=float(tol),
        best_time=best_t,
        deviation=best_dev,
        verdict=verdict,
    )


@dataclass(frozen=True)
class RootsOfUnityReport:
    """Nearest roots of unity to the distinct eigenvalues of U(tau)."""

    all_near_roots: bool
    # one row per distinct eigenvalue: (theta, order, numerator, distance);
    # order is None when no root of order <= max_order is within tolerance,
    # in which case (order-tried, distance) of the best miss is recorded.
    entries: tuple[tuple[float, int | None, int | None, float], ...]


def roots_of_unity_probe(
    dec: SpectralDecomposition,
    tau: float,
    max_order: int,
    tol: float = 1e-9,
) -> RootsOfUnityReport:
    """Check whether every eigenvalue of U(tau) is near a root of unity of order <= max_order."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    entries = []
    all_near = True
    for theta in dec.eigenvalues:
        angle = theta * tau
        hit = None
        best = (None, math.inf)
        for k in range(1, max_order + 1):
            m = round(angle * k / (2 * math.pi))
            dist = abs(2 * math.sin(0.5 * (angle - 2 * math.pi * m / k)))
            if dist <= tol:
                hit = (float(theta), k, int(m % k), float(dist))
                break
            if dist < best[1]:
                best = (k, dist)
        if hit is None:
            all_near = False
            entries.append((float(theta), None, None, float(best[1])))
        else:
            entries.append(hit)
    return RootsOfUnityReport(all_near_roots=all_near, entries=tuple(entries))
