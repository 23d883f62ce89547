"""Equitable and weighted pseudo-equitable partitions, quotients, PST lifting.

A partition with positive diagonal vertex weights D is treated through the
matrix S obtained by normalizing the columns of D P, where P is the
characteristic matrix.  When the column space of D P is A-invariant
(certified numerically by the residual ||AS - SB||_F with B = S^T A S), the
walk on the quotient graph B determines the walk on the original graph along
the partition: exp(itA) S = S exp(itB).  If two blocks are singletons {u},
{v} with unit weights, perfect state transfer between them in B is exactly
perfect state transfer between u and v in the original graph.

The combinatorial face of the same condition: the D-weighted out-degree
``sum_{y in block j} w(x, y) * D_yy / D_xx`` must be constant over x in each
block i.  All checks here are exact because weights are Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, FormatError, NotApplicableError
from .graphs import Graph
from .spectral import decompose
from .transfer import PSTResult, detect_pst
from .walk import transition

__all__ = [
    "Partition",
    "QuotientResult",
    "EquitableReport",
    "distance_partition",
    "coarsest_equitable",
    "is_equitable",
    "quotient",
    "lift_pst",
    "parse_partition",
    "format_partition",
]

INVARIANCE_TOL = 1e-9


class Partition:
    """Ordered vertex partition with optional positive vertex weights."""

    __slots__ = ("blocks", "vertex_weights", "n", "_block_of")

    def __init__(self, blocks, n: int, vertex_weights=None):
        seen: set[int] = set()
        norm_blocks = []
        for block in blocks:
            b = tuple(sorted(int(x) for x in block))
            if not b:
                raise ValueError("empty block in partition")
            for x in b:
                if not 0 <= x < n:
                    raise ValueError(f"vertex {x} out of range")
                if x in seen:
                    raise ValueError(f"vertex {x} appears in two blocks")
                seen.add(x)
            norm_blocks.append(b)
        if len(seen) != n:
            raise ValueError("blocks do not cover all vertices")
        if vertex_weights is None:
            weights = tuple(Fraction(1) for _ in range(n))
        else:
            weights = tuple(Fraction(w) for w in vertex_weights)
            if len(weights) != n:
                raise ValueError("vertex_weights length must equal n")
            if any(w <= 0 for w in weights):
                raise ValueError("vertex weights must be positive")
        self.blocks = tuple(norm_blocks)
        self.n = n
        self.vertex_weights = weights
        block_of = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                block_of[x] = i
        self._block_of = block_of

    @property
    def k(self) -> int:
        return len(self.blocks)

    def block_of(self, x: int) -> int:
        return self._block_of[x]

    def __repr__(self) -> str:
        return f"Partition(k={self.k}, n={self.n})"


def distance_partition(graph: Graph, source: int, vertex_weights=None) -> Partition:
    """Blocks of equal hop distance from ``source`` (graph must be connected)."""
    dist = graph.bfs_distances(source)
    if (dist < 0).any():
        raise ValueError("distance partition needs a connected graph")
    blocks = [
        [int(x) for x in np.nonzero(dist == d)[0]] for d in range(int(dist.max()) + 1)
    ]
    return Partition(blocks, graph.n, vertex_weights)


@dataclass(frozen=True)
class EquitableReport:
    equitable: bool
    # (block i, block j, vertex x, vertex x') with different weighted out-degrees
    witness: tuple[int, int, int, int] | None = None


def _weighted_outdegree(graph: Graph, part: Partition, x: int, j: int) -> Fraction:
    w = part.vertex_weights
    total = Fraction(0)
    for y, wxy in graph.neighbors(x).items():
        if part.block_of(y) == j:
            total += wxy * w[y] / w[x]
    return total


def is_equitable(graph: Graph, part: Partition) -> EquitableReport:
    """Exact weighted equitability check with a violating witness if any."""
    for i, block in enumerate(part.blocks):
        for j in range(part.k):
            ref = _weighted_outdegree(graph, part, block[0], j)
            for x in block[1:]:
                if _weighted_outdegree(graph, part, x, j) != ref:
                    return EquitableReport(False, witness=(i, j, block[0], x))
    return EquitableReport(True)


def coarsest_equitable(graph: Graph, seed: Partition) -> Partition:
    """Iterated color refinement of ``seed`` until weighted-equitable.

    Keys are the exact per-class weighted out-degree vectors, so the result
    refines the seed, is equitable, and no pair of its blocks inside one seed
    class can be re-merged without breaking equitability.
    """
    color = {x: i for i, block in enumerate(seed.blocks) for x in block}
    k = seed.k
    while True:
        signatures = {}
        for x in range(graph.n):
            sig = [Fraction(0)] * k
            for y, wxy in graph.neighbors(x).items():
                sig[color[y]] += wxy * seed.vertex_weights[y] / seed.vertex_weights[x]
            signatures[x] = (color[x], tuple(sig))
        distinct = sorted(set(signatures.values()), key=lambda s: (s[0], s[1], ))
        new_color = {x: distinct.index(signatures[x]) for x in range(graph.n)}
        if len(distinct) == k:
            break
        color = new_color
        k = len(distinct)
    blocks: list[list[int]] = [[] for _ in range(k)]
    for x in range(graph.n):
        blocks[color[x]].append(x)
    blocks.sort(key=min)
    return Partition(blocks, graph.n, seed.vertex_weights)


@dataclass(frozen=True)
class QuotientResult:
    """B = S^T A S for the normalized weighted characteristic matrix S.

    ``residual = ||A S - S B||_F``; values <= 1e-9 certify that the column
    space of D P is A-invariant.
    """

    matrix: np.ndarray
    basis: np.ndarray
    residual: float


def quotient(graph: Graph, part: Partition) -> QuotientResult:
    a = graph.adjacency()
    s = np.zeros((graph.n, part.k))
    for i, block in enumerate(part.blocks):
        for x in block:
            s[x, i] = float(part.vertex_weights[x])
        norm = np.linalg.norm(s[:, i])
        if norm == 0:
            raise ValueError(f"block {i} has zero weight")
        s[:, i] /= norm
    b = s.T @ a @ s
    b = 0.5 * (b + b.T)
    residual = float(np.linalg.norm(a @ s - s @ b))
    return QuotientResult(matrix=b, basis=s, residual=residual)


def lift_pst(graph: Graph, part: Partition, i: int, j: int, **detect_kwargs) -> PSTResult:
    """Lift a PST verdict from the quotient matrix B back to the graph.

    Blocks ``i`` and ``j`` must be singletons {u}, {v} with unit vertex
    weight, and the quotient residual must certify A-invariance.  Positive
    verdicts are cross-validated by evaluating the fidelity in the original
    graph directly.
    """
    for idx in (i, j):
        if not 0 <= idx < part.k:
            raise ValueError(f"block index {idx} out of range")
        if len(part.blocks[idx]) != 1:
            raise NotApplicableError(f"block {idx} is not a singleton")
        (x,) = part.blocks[idx]
        if part.vertex_weights[x] != 1:
            raise NotApplicableError(f"endpoint vertex {x} must have weight 1")
    if i == j:
        raise ValueError("endpoint blocks must differ")
    q = quotient(graph, part)
    if q.residual > INVARIANCE_TOL:
        raise NotApplicableError(
            f"hypothesis not met: quotient residual {q.residual:.3e} exceeds {INVARIANCE_TOL}"
        )
    result = detect_pst(decompose(q.matrix), i, j, **detect_kwargs)
    if not result.occurs:
        return result
    (u,) = part.blocks[i]
    (v,) = part.blocks[j]
    dec = decompose(graph)
    entry = transition(dec, result.time).matrix[v, u]
    if abs(entry - result.phase) > 1e-8:
        raise ConsistencyError(
            f"lifted PST failed direct verification: U[{v},{u}] = {entry:.6g} "
            f"but the quotient promised phase {result.phase:.6g}"
        )
    return PSTResult(
        occurs=True,
        status="pst",
        time=result.time,
        phase=result.phase,
        certified=result.certified,
        certificate=result.certificate,
        residual=result.residual,
        fidelity=float(abs(entry)),
    )


# ---------------------------------------------------------------------------
# partition file format: one line of vertex ids per block; optional line
# "weights: v=w v=w ..." (weights parse like edge weights, default 1)


def parse_partition(text: str, n: int) -> Partition:
    blocks = []
    weights = [Fraction(1)] * n
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("weights:"):
            for pair in line[len("weights:"):].split():
                v, _, w = pair.partition("=")
                try:
                    idx = int(v)
                    weights[idx] = Fraction(w)
                except (ValueError, ZeroDivisionError, IndexError):
                    raise FormatError(f"line {lineno}: bad weight entry {pair!r}") from None
            continue
        try:
            blocks.append([int(tok) for tok in line.split()])
        except ValueError:
            raise FormatError(f"line {lineno}: vertex ids must be integers") from None
    try:
        return Partition(blocks, n, weights)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_partition(part: Partition) -> str:
    lines = [" ".join(str(x) for x in block) for block in part.blocks]
    nondefault = [
        f"{x}={w}" for x, w in enumerate(part.vertex_weights) if w != 1
    ]
    if nondefault:
        lines.append("weights: " + " ".join(nondefault))
    return "\n".join(lines) + "\n"
