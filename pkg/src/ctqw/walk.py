"""Transition matrix U(t) = exp(itA) and the instantaneous mixing matrix.

U(t) is always evaluated through the spectral decomposition, never with a
Pade-type matrix exponential, so landmark times like pi/sqrt(2) are exact to
eigenvalue precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDecomposition

__all__ = [
    "TransitionMatrix",
    "MixingMatrix",
    "transition",
    "mixing",
    "fidelity",
    "transition_batch",
    "mixing_batch",
    "amplitude_batch",
]


@dataclass(frozen=True)
class TransitionMatrix:
    """Complex unitary U(t); symmetric because A is."""

    t: float
    matrix: np.ndarray


@dataclass(frozen=True)
class MixingMatrix:
    """Entrywise |U(t)|^2; symmetric, nonnegative, doubly stochastic."""

    t: float
    matrix: np.ndarray


def transition(dec: SpectralDecomposition, t: float) -> TransitionMatrix:
    phases = np.exp(1j * t * dec.eigenvalues)
    u = np.einsum("r,rij->ij", phases, dec.idempotents)
    return TransitionMatrix(t=float(t), matrix=u)


def mixing(dec: SpectralDecomposition, t: float) -> MixingMatrix:
    u = transition(dec, t).matrix
    return MixingMatrix(t=float(t), matrix=(u * u.conj()).real)


def fidelity(dec: SpectralDecomposition, u: int, v: int, t: float) -> float:
    """|U(t)[u, v]|, the transfer fidelity between two vertices."""
    for x in (u, v):
        if not 0 <= x < dec.n:
            raise ValueError(f"vertex {x} out of range")
    amp = np.dot(np.exp(1j * t * dec.eigenvalues), dec.idempotents[:, u, v])
    return float(abs(amp))


def transition_batch(dec: SpectralDecomposition, times) -> np.ndarray:
    """Stack of U(t) over a time array; shape (len(times), n, n)."""
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(1j * np.multiply.outer(ts, dec.eigenvalues))
    return np.einsum("tr,rij->tij", phases, dec.idempotents, optimize=True)


def mixing_batch(dec: SpectralDecomposition, times) -> np.ndarray:
    u = transition_batch(dec, times)
    return (u * u.conj()).real


def amplitude_batch(dec: SpectralDecomposition, u: int, v: int, times) -> np.ndarray:
    """U(t)[u, v] over a time array (cheap: no full matrices are formed)."""
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(1j * np.multiply.outer(ts, dec.eigenvalues))
    return phases @ dec.idempotents[:, u, v]
