"""Grid scanning and one-dimensional refinement helpers shared by the scans."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

_INV_PHI = (np.sqrt(5) - 1) / 2


def golden_minimize(f, a: float, b: float, xtol: float = 1e-13, max_iter: int = 200):
    """Golden-section minimum of f on [a, b]; returns (x, f(x))."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _parabolic_vertex(x0, x1, x2, y0, y1, y2):
    denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if denom == 0:
        return x1
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    return x1 - 0.5 * num / denom


def refine_minimum(f, t0: float, step: float, lo: float, hi: float, xtol: float = 1e-13):
    """Refine a grid local minimum: three-point quadratic seed, then golden section."""
    a = max(lo, t0 - step)
    b = min(hi, t0 + step)
    vertex = _parabolic_vertex(a, t0, b, f(a), f(t0), f(b))
    if a < vertex < b:
        a2 = max(a, vertex - 0.5 * (b - a))
        b2 = min(b, vertex + 0.5 * (b - a))
        if b2 > a2:
            a, b = a2, b2
    x, fx = golden_minimize(f, a, b, xtol=xtol)
    ft0 = f(t0)
    return (t0, ft0) if ft0 < fx else (x, fx)


def local_minima_indices(y: np.ndarray) -> np.ndarray:
    """Indices of local minima of a sampled curve, endpoints included."""
    if len(y) == 1:
        return np.array([0])
    keep = np.ones(len(y), dtype=bool)
    keep[1:] &= y[1:] <= y[:-1]
    keep[:-1] &= y[:-1] <= y[1:]
    return np.nonzero(keep)[0]


def chunked_map(fn, ts: np.ndarray, chunk: int = 16384, threads: int = 1) -> np.ndarray:
    """Apply ``fn`` to consecutive chunks of the time grid and concatenate.

    Results are independent of ``threads``: chunks are fixed by ``chunk`` and
    reassembled in order.
    """
    chunks = [ts[i : i + chunk] for i in range(0, len(ts), chunk)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    return np.concatenate(parts) if parts else np.array([])
