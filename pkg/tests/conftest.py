"""Shared fixtures: the desk-scale graph corpus and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

import ctqw


def star(k: int) -> ctqw.Graph:
    return ctqw.Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def petersen() -> ctqw.Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return ctqw.Graph(10, outer + inner + spokes)


def corpus() -> dict[str, ctqw.Graph]:
    return {
        "P2": ctqw.path(2),
        "P3": ctqw.path(3),
        "P4": ctqw.path(4),
        "P5": ctqw.path(5),
        "C4": ctqw.cycle(4),
        "C5": ctqw.cycle(5),
        "C9": ctqw.cycle(9),
        "K3": ctqw.complete(3),
        "K5": ctqw.complete(5),
        "Q3": ctqw.hypercube(3),
        "Q4": ctqw.hypercube(4),
        "H4": ctqw.hadamard_graph(4),
        "CQ4": ctqw.compressed_q4()[0],
        "star3": star(3),
    }


@pytest.fixture(scope="session")
def corpus_graphs() -> dict[str, ctqw.Graph]:
    return corpus()


@pytest.fixture(scope="session")
def corpus_decompositions(corpus_graphs) -> dict[str, ctqw.SpectralDecomposition]:
    return {name: ctqw.decompose(g) for name, g in corpus_graphs.items()}


def expm_transition(a: np.ndarray, t: float) -> np.ndarray:
    """Scaling-and-squaring matrix exponential oracle for U(t)."""
    return expm(1j * t * np.asarray(a, dtype=float))


def quadrature_interval_average(a: np.ndarray, T: float, nodes: int) -> np.ndarray:
    """Trapezoid quadrature of (1/T) int_0^T |exp(itA)|^2 dt."""
    ts = np.linspace(0.0, T, nodes)
    weights = np.ones(nodes)
    weights[0] = weights[-1] = 0.5
    acc = np.zeros_like(np.asarray(a, dtype=float))
    for w, t in zip(weights, ts):
        u = expm_transition(a, t)
        acc += w * (u * u.conj()).real
    return acc / (nodes - 1)
