"""Average mixing matrix, finite and distribution-weighted averages, cp factors.

M(t) expands entrywise over the phases exp(i (theta_r - theta_s) t), so any
time average only needs the average of those phases:

    E[M(R)] = sum_{r,s} (E_r o E_s) Re phi_R(theta_r - theta_s),

where o is the entrywise product and phi_R the characteristic function of the
time distribution R.  The infinite-time uniform average keeps only the r = s
terms, giving the average mixing matrix  M_hat = sum_r E_r o E_r; the uniform
average over [0, T] uses phi(x) = sin(xT)/(xT).  Closed forms for the point,
uniform, Gaussian, and exponential cases remove quadrature error entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotApplicableError, NotDistanceRegularError
from .graphs import Graph
from .scheme import scheme_from_drg
from .spectral import SpectralDecomposition, decompose
from .walk import mixing_batch

__all__ = [
    "AvgMixingAnalysis",
    "CPFactorization",
    "DistributionSpec",
    "DrgRankProbe",
    "average_mixing",
    "interval_average",
    "distribution_average",
    "cp_factorize",
    "drg_rank_probe",
]

RANK_EPS = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class AvgMixingAnalysis:
    """An averaged mixing matrix with its rank/trace/positivity report.

    ``rank`` counts singular values above ``n * 1e-12 * sigma_max``; the
    singular values and the threshold are kept so callers can re-threshold.
    """

    matrix: np.ndarray
    rank: int
    trace: float
    diagonal: np.ndarray
    psd_certified: bool
    singular_values: np.ndarray
    rank_threshold: float
    mc_standard_error: float | None = None


def _analyze(m: np.ndarray, mc_standard_error: float | None = None) -> AvgMixingAnalysis:
    n = m.shape[0]
    svals = np.linalg.svd(m, compute_uv=False)
    threshold = n * RANK_EPS * (svals[0] if len(svals) else 0.0)
    rank = int((svals > threshold).sum())
    min_eig = float(np.linalg.eigvalsh(m).min())
    return AvgMixingAnalysis(
        matrix=m,
        rank=rank,
        trace=float(np.trace(m)),
        diagonal=np.diag(m).copy(),
        psd_certified=bool(min_eig >= -PSD_TOL),
        singular_values=svals,
        rank_threshold=float(threshold),
        mc_standard_error=mc_standard_error,
    )


def average_mixing(dec: SpectralDecomposition) -> AvgMixingAnalysis:
    """M_hat = sum_r E_r o E_r, the infinite-time average of M(t)."""
    m = np.einsum("rij,rij->ij", dec.idempotents, dec.idempotents)
    return _analyze(m)


def _schur_assemble(dec: SpectralDecomposition, phi_real) -> np.ndarray:
    """sum_{r,s} (E_r o E_s) * phi_real(theta_r - theta_s)."""
    gaps = np.subtract.outer(dec.eigenvalues, dec.eigenvalues)
    w = phi_real(gaps)
    return np.einsum("rs,rij,sij->ij", w, dec.idempotents, dec.idempotents, optimize=True)


def _sinc(x: np.ndarray) -> np.ndarray:
    # sin(x)/x with sinc(0) = 1
    return np.sinc(x / np.pi)


def interval_average(dec: SpectralDecomposition, T: float, nodes: int | None = None) -> np.ndarray:
    """Uniform average (1/T) int_0^T M(t) dt, exactly.

    Uses the closed form sum_{r,s} (E_r o E_s) sinc((theta_r - theta_s) T);
    no quadrature is involved.  ``nodes`` is accepted for signature
    compatibility with quadrature-based oracles and is ignored.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    return _schur_assemble(dec, lambda gaps: _sinc(gaps * T))


@dataclass(frozen=True)
class DistributionSpec:
    """A distribution over times: point mass, uniform, Gaussian, exponential, or samples."""

    kind: str
    params: tuple[float, ...] = ()
    samples: np.ndarray | None = None
    nodes: int | None = None

    @classmethod
    def point(cls, tau: float) -> "DistributionSpec":
        return cls(kind="point", params=(float(tau),))

    @classmethod
    def uniform_interval(cls, T: float, nodes: int | None = None) -> "DistributionSpec":
        if T <= 0:
            raise ValueError("interval length must be positive")
        return cls(kind="uniform", params=(float(T),), nodes=nodes)

    @classmethod
    def gaussian(cls, mu: float, sigma: float) -> "DistributionSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls(kind="gaussian", params=(float(mu), float(sigma)))

    @classmethod
    def exponential(cls, rate: float) -> "DistributionSpec":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return cls(kind="exponential", params=(float(rate),))

    @classmethod
    def sampled(cls, times) -> "DistributionSpec":
        arr = np.asarray(times, dtype=float)
        if arr.ndim != 1 or len(arr) == 0 or not np.isfinite(arr).all():
            raise ValueError("samples must be a nonempty finite 1-d array")
        return cls(kind="sampled", samples=arr)


def distribution_average(dec: SpectralDecomposition, spec: DistributionSpec) -> AvgMixingAnalysis:
    """E[M(R)] for a random time R, via characteristic functions where possible.

    point(tau) reproduces M(tau) itself; gaussian/exponential use
    Re phi_R(theta_r - theta_s) in closed form; sampled specs take the Monte
    Carlo mean and report the largest entrywise standard error.
    """
    kind = spec.kind
    if kind == "point":
        (tau,) = spec.params
        m = _schur_assemble(dec, lambda gaps: np.cos(gaps * tau))
        return _analyze(m)
    if kind == "uniform":
        (T,) = spec.params
        return _analyze(interval_average(dec, T))
    if kind == "gaussian":
        mu, sigma = spec.params
        m = _schur_assemble(
            dec, lambda gaps: np.exp(-0.5 * sigma**2 * gaps**2) * np.cos(mu * gaps)
        )
        return _analyze(m)
    if kind == "exponential":
        (rate,) = spec.params
        m = _schur_assemble(dec, lambda gaps: rate**2 / (rate**2 + gaps**2))
        return _analyze(m)
    if kind == "sampled":
        stack = mixing_batch(dec, spec.samples)
        m = stack.mean(axis=0)
        if len(spec.samples) > 1:
            se = float(np.max(stack.std(axis=0, ddof=1))) / math.sqrt(len(spec.samples))
        else:
            se = float("inf")
        return _analyze(m, mc_standard_error=se)
    raise ValueError(f"unknown distribution kind {kind!r}")


@dataclass(frozen=True)
class CPFactorization:
    """M_hat = sum_r f_r f_r^T with entrywise nonnegative factors f_r.

    For a simple spectrum each factor is the entrywise square of a unit
    eigenvector (the diagonal of its idempotent), which is nonnegative by
    construction.  ``cp_rank_bound`` is the number of factors;
    ``nonneg_rank_bound`` counts distinct factor directions (mirror-symmetric
    eigenvectors share one).
    """

    vectors: tuple[np.ndarray, ...]
    residual: float
    cp_rank_bound: int
    nonneg_rank_bound: int


def cp_factorize(dec: SpectralDecomposition) -> CPFactorization:
    """Explicit completely-positive factorization of M_hat for simple spectra."""
    if (dec.multiplicities != 1).any():
        repeated = dec.eigenvalues[dec.multiplicities > 1]
        raise NotApplicableError(
            f"not applicable: eigenvalue {repeated[0]:.6g} has multiplicity > 1"
        )
    factors = [np.diag(dec.idempotents[r]).copy() for r in range(dec.d + 1)]
    m_hat = np.einsum("rij,rij->ij", dec.idempotents, dec.idempotents)
    recon = sum(np.outer(f, f) for f in factors)
    residual = float(np.linalg.norm(recon - m_hat))
    directions: list[np.ndarray] = []
    for f in factors:
        unit = f / np.linalg.norm(f)
        if not any(np.max(np.abs(unit - d)) <= 1e-8 for d in directions):
            directions.append(unit)
    return CPFactorization(
        vectors=tuple(factors),
        residual=residual,
        cp_rank_bound=len(factors),
        nonneg_rank_bound=len(directions),
    )


@dataclass(frozen=True)
class DrgRankProbe:
    distance_regular: bool
    is_primitive_drg: bool
    rank: int
    equals_n: bool
    detail: str | None = None


def _connected_bool(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        x = stack.pop()
        for y in np.nonzero(adj[x])[0]:
            if not seen[y]:
                seen[y] = True
                stack.append(int(y))
    return bool(seen.all())


def drg_rank_probe(graph: Graph) -> DrgRankProbe:
    """Report rank(M_hat) alongside distance-regularity and primitivity.

    Evidence gathering only: no claim is made beyond the computed values.
    A scheme is primitive when every nontrivial distance graph is connected.
    """
    analysis = average_mixing(decompose(graph))
    detail = None
    try:
        scheme = scheme_from_drg(graph)
        drg = True
        primitive = all(
            _connected_bool(scheme.distance_matrices[i]) for i in range(1, scheme.d + 1)
        )
    except (NotDistanceRegularError, NotApplicableError) as exc:
        drg = False
        primitive = False
        detail = str(exc)
    return DrgRankProbe(
        distance_regular=drg,
        is_primitive_drg=primitive,
        rank=analysis.rank,
        equals_n=analysis.rank == graph.n,
        detail=detail,
    )
