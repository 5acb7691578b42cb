import logging
from dataclasses import dataclass
from typing import Iterator

import networkx as nx
import numpy as np

from .Errors import NotADagError

log = logging.getLogger(__name__)

NO_PATH = -np.inf


def step_graph(steps: np.ndarray) -> nx.DiGraph:
    """DiGraph on 0..n-1 with the off-diagonal step pairs as edges."""
    n = len(steps)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    off = steps & ~np.eye(n, dtype=bool)
    graph.add_edges_from((int(u), int(v)) for u, v in np.argwhere(off))
    return graph


def topological_order(steps: np.ndarray) -> list[int]:
    """Smallest-id-first topological order; NotADagError carries a cycle."""
    graph = step_graph(steps)
    try:
        return list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible:
        cycle = [int(u) for u, _ in nx.find_cycle(graph)]
        raise NotADagError(cycle) from None


def _extend(row_values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # unreachable + ∞ must stay unreachable
    with np.errstate(invalid="ignore"):
        out = row_values + weights
    return np.where(np.isneginf(row_values), NO_PATH, out)


@dataclass(frozen=True)
class LongestPaths:
    """All-pairs longest chains over a step DAG.

    `values[x, y]` is the largest τ-sum of a step chain x → y (0 on the
    diagonal, -inf if no chain); `pred[x, y]` is the smallest-id predecessor of
    y on such a chain.
    """

    values: np.ndarray
    pred: np.ndarray
    order: tuple[int, ...]
    steps: np.ndarray
    weights: np.ndarray
    tie_tol: float

    @property
    def reach(self) -> np.ndarray:
        """Reflexive transitive closure of the steps."""
        return self.values > NO_PATH

    def value(self, x: int, y: int) -> float:
        """𝒯(x, y): the longest value, 0 where no chain exists."""
        v = self.values[x, y]
        return 0.0 if v == NO_PATH else float(v)

    def chain(self, x: int, y: int) -> list[int]:
        """The smallest-id maximizer from x to y ([] if none)."""
        if self.values[x, y] == NO_PATH:
            return []
        out = [y]
        while out[-1] != x:
            out.append(int(self.pred[x, out[-1]]))
        return out[::-1]

    def on_maximizer(self, x: int, y: int, u: int, v: int) -> bool:
        total = self.values[x, y]
        through = self.values[x, u] + self.weights[u, v] + self.values[v, y]
        return bool(abs(through - total) <= self.tie_tol * max(1.0, abs(total)))

    def maximizers(self, x: int, y: int, limit: int | None = None) -> Iterator[list[int]]:
        """Every maximizer from x to y, lexicographically by point id."""
        if self.values[x, y] == NO_PATH or x == y:
            return
        found = 0
        stack: list[list[int]] = [[x]]
        while stack:
            chain = stack.pop()
            u = chain[-1]
            if u == y:
                yield chain
                found += 1
                if limit is not None and found >= limit:
                    return
                continue
            nxt = [
                int(v)
                for v in np.flatnonzero(self.steps[u])
                if v != u and self.values[v, y] > NO_PATH and self.on_maximizer(x, y, u, v)
            ]
            stack.extend(chain + [v] for v in reversed(nxt))


def longest_paths(steps: np.ndarray, weights: np.ndarray, tie_tol: float = 1e-9) -> LongestPaths:
    """Longest-path DP in topological order, vectorised over sources."""
    n = len(steps)
    order = topological_order(steps)
    values = np.full((n, n), NO_PATH)
    np.fill_diagonal(values, 0.0)
    pred = np.full((n, n), -1, dtype=np.int64)
    off = steps & ~np.eye(n, dtype=bool)
    for v in order:
        preds = np.flatnonzero(off[:, v])
        if len(preds) == 0:
            continue
        cand = _extend(values[:, preds], weights[preds, v][None, :])
        best = cand.max(axis=1)
        reachable = best > NO_PATH
        ok = cand >= (best - tie_tol * np.maximum(1.0, np.abs(np.where(reachable, best, 0.0))))[:, None]
        first = preds[np.argmax(ok, axis=1)]
        update = reachable & (np.arange(n) != v)
        values[update, v] = best[update]
        pred[update, v] = first[update]
    log.debug("longest paths over %d points, %d steps", n, int(off.sum()))
    return LongestPaths(
        values=values,
        pred=pred,
        order=tuple(order),
        steps=steps,
        weights=weights,
        tie_tol=tie_tol,
    )


def max_plus(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(A ⊗ B)[i, j] = max_k A[i, k] + B[k, j] with -inf as the zero."""
    with np.errstate(invalid="ignore"):
        S = A[:, :, None] + B[None, :, :]
    S = np.where(np.isnan(S), NO_PATH, S)
    return S.max(axis=1) if S.shape[1] else np.full((A.shape[0], B.shape[1]), NO_PATH)


def chain_sum(weights: np.ndarray, chain: list[int]) -> float:
    """τ-sum over consecutive pairs, summed left to right."""
    total = 0.0
    for u, v in zip(chain, chain[1:]):
        total += weights[u, v]
    return float(total)
