import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Literal

import networkx as nx
import numpy as np
from scipy.spatial.distance import cdist

from .Config import DEFAULT_TOLERANCES
from .Errors import NotCheckableError, StructuralError
from .LongestPath import LongestPaths, longest_paths
from .Rules import Rule

log = logging.getLogger(__name__)

Basis = tuple[tuple[np.ndarray, ...], ...]


def _frozen(array, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _same_members(a: Iterable[np.ndarray], b: Iterable[np.ndarray]) -> bool:
    a, b = list(a), list(b)
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


@dataclass(frozen=True, eq=False)
class LocalisingAtlas:
    """Per point x: members Ω_x (sorted ids, containing x) and ω_x on Ω_x × Ω_x."""

    members: tuple[np.ndarray, ...]
    omega: tuple[np.ndarray, ...]
    regular: bool = False
    kind: Literal["balls", "explicit"] = "explicit"
    radius: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "members", tuple(_frozen(m, np.int64) for m in self.members)
        )
        object.__setattr__(self, "omega", tuple(_frozen(w, float) for w in self.omega))
        if len(self.members) != len(self.omega):
            raise StructuralError("atlas needs one ω matrix per neighbourhood")
        for x, (m, w) in enumerate(zip(self.members, self.omega)):
            if w.shape != (len(m), len(m)):
                raise StructuralError(f"atlas ω_{x} has shape {w.shape}, expected {(len(m), len(m))}")
            if x not in m:
                raise StructuralError(f"atlas Ω_{x} does not contain {x}")

    def chart(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        return self.members[x], self.omega[x]

    def local(self, x: int, p: int, q: int) -> float:
        """ω_x(p, q) for carrier ids p, q ∈ Ω_x."""
        m = self.members[x]
        i, j = np.searchsorted(m, [p, q])
        if i >= len(m) or j >= len(m) or m[i] != p or m[j] != q:
            raise KeyError(f"({p}, {q}) not in Ω_{x}")
        return float(self.omega[x][i, j])

    def charts_containing(self, *points: int) -> list[int]:
        return [x for x, m in enumerate(self.members) if all(p in m for p in points)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalisingAtlas):
            return NotImplemented
        return (
            self.regular == other.regular
            and self.kind == other.kind
            and self.radius == other.radius
            and _same_members(self.members, other.members)
            and _same_members(self.omega, other.omega)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class SpaceDescription:
    """A Lorentzian pre-length space candidate (X, d, ≪, ≤, τ) on a finite carrier.

    Matrices are dense and read-only; τ holds exact ∞ as IEEE inf. `steps`
    marks pairs joined by a causal segment lying in the space: discrete curves
    move only along steps.
    """

    name: str
    metric: np.ndarray
    causal: np.ndarray
    chron: np.ndarray
    tau: np.ndarray
    steps: np.ndarray | None = None
    coords: np.ndarray | None = None
    basis: Basis | None = None
    atlas: LocalisingAtlas | None = None
    ambient_complete: bool = False
    reflexive: bool = True
    resolution: float | None = None
    frame: np.ndarray | None = None
    holes: np.ndarray | None = None
    rule: Rule | None = None
    metric_kind: Literal["matrix", "euclidean"] = "matrix"
    lipschitz: float = 1.0
    notes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = len(self.causal)
        for label, value, dtype in (
            ("metric", self.metric, float),
            ("causal", self.causal, bool),
            ("chron", self.chron, bool),
            ("tau", self.tau, float),
        ):
            array = _frozen(value, dtype)
            if array.shape != (n, n):
                raise StructuralError(f"{label} has shape {array.shape}, expected {(n, n)}")
            object.__setattr__(self, label, array)
        if np.isnan(self.tau).any():
            raise StructuralError("τ contains NaN")
        if (self.tau < 0).any():
            i, j = (int(v) for v in np.argwhere(self.tau < 0)[0])
            raise StructuralError(f"τ({i},{j}) = {self.tau[i, j]} is negative")
        steps = self.causal & ~np.eye(n, dtype=bool) if self.steps is None else self.steps
        object.__setattr__(self, "steps", _frozen(steps, bool))
        if self.steps.shape != (n, n):
            raise StructuralError(f"steps has shape {self.steps.shape}, expected {(n, n)}")
        if self.coords is not None:
            coords = _frozen(self.coords, float)
            if coords.ndim != 2 or len(coords) != n:
                raise StructuralError(f"coords must be ({n}, dim), got {coords.shape}")
            object.__setattr__(self, "coords", coords)
        for label in ("frame", "holes"):
            value = getattr(self, label)
            if value is not None:
                object.__setattr__(
                    self, label, _frozen(value, bool if label == "frame" else float)
                )
        if self.basis is not None:
            if len(self.basis) != n:
                raise StructuralError(f"basis lists {len(self.basis)} points, expected {n}")
            object.__setattr__(
                self,
                "basis",
                tuple(tuple(_frozen(u, np.int64) for u in members) for members in self.basis),
            )
        if self.atlas is not None and len(self.atlas.members) != n:
            raise StructuralError("atlas must have one neighbourhood per point")

    # shape

    @property
    def n(self) -> int:
        return len(self.causal)

    @property
    def dim(self) -> int | None:
        return None if self.coords is None else self.coords.shape[1]

    def index_of(self, point: Iterable[float], tol: float = 1e-9) -> int:
        """Carrier id of the point with the given coordinates."""
        if self.coords is None:
            raise NotCheckableError(f"{self.name} has no coordinates")
        target = np.asarray(list(point), dtype=float)
        if target.shape != (self.coords.shape[1],):
            raise StructuralError(f"expected {self.coords.shape[1]} coordinates, got {target.tolist()}")
        dist = np.max(np.abs(self.coords - target), axis=1)
        i = int(np.argmin(dist))
        if dist[i] > tol:
            raise KeyError(f"no carrier point at {target.tolist()} in {self.name}")
        return i

    def label(self, i: int) -> str:
        if self.coords is None:
            return str(i)
        return "(" + ",".join(f"{c:g}" for c in self.coords[i]) + ")"

    # derived structure

    @cached_property
    def paths(self) -> LongestPaths:
        """Longest step chains with τ weights (the DP behind 𝒯)."""
        return longest_paths(self.steps, self.tau, DEFAULT_TOLERANCES.absolute)

    @cached_property
    def chron_steps(self) -> np.ndarray:
        return self.steps & self.chron

    def require_basis(self) -> Basis:
        if self.basis is None:
            raise NotCheckableError(f"{self.name} has no neighbourhood basis")
        return self.basis

    def require_atlas(self) -> LocalisingAtlas:
        if self.atlas is None:
            raise NotCheckableError(f"{self.name} has no localising atlas")
        return self.atlas

    def replace(self, **changes) -> "SpaceDescription":
        return replace(self, **changes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SpaceDescription):
            return NotImplemented
        arrays = ("metric", "causal", "chron", "tau", "steps")
        optional = ("coords", "frame", "holes")
        scalars = (
            "name",
            "ambient_complete",
            "reflexive",
            "resolution",
            "rule",
            "metric_kind",
            "lipschitz",
        )
        if any(getattr(self, a) != getattr(other, a) for a in scalars):
            return False
        if not all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays):
            return False
        for a in optional:
            mine, theirs = getattr(self, a), getattr(other, a)
            if (mine is None) != (theirs is None):
                return False
            if mine is not None and not np.array_equal(mine, theirs):
                return False
        if (self.basis is None) != (other.basis is None):
            return False
        if self.basis is not None and not all(
            _same_members(a, b) for a, b in zip(self.basis, other.basis)
        ):
            return False
        return self.atlas == other.atlas

    __hash__ = None  # type: ignore[assignment]

    # construction helpers

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        name: str = "dag",
        **extra,
    ) -> "SpaceDescription":
        """Finite space from weighted steps: ≤ is the reflexive closure, τ the longest chain."""
        steps = np.zeros((n, n), dtype=bool)
        weights = np.zeros((n, n))
        for u, v, w in edges:
            if u == v:
                raise StructuralError(f"self-loop at {u}")
            steps[u, v] = True
            weights[u, v] = w
        paths = longest_paths(steps, weights)
        tau = np.where(paths.reach, np.maximum(paths.values, 0.0), 0.0)
        np.fill_diagonal(tau, 0.0)
        extra.setdefault("metric", hop_metric(steps))
        return cls(
            name=name,
            causal=paths.reach,
            chron=tau > 0,
            tau=tau,
            steps=steps,
            **extra,
        )


def euclidean_metric(coords: np.ndarray) -> np.ndarray:
    return cdist(coords, coords)


def hop_metric(steps: np.ndarray) -> np.ndarray:
    """Shortest-hop distance in the undirected step graph (components at n)."""
    n = len(steps)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((int(u), int(v)) for u, v in np.argwhere(steps))
    metric = np.full((n, n), float(n))
    for u, lengths in nx.all_pairs_shortest_path_length(graph):
        for v, hops in lengths.items():
            metric[u, v] = hops
    return metric


def ball_radii(resolution: float, diameter: float) -> list[float]:
    """h/2, h, 2h, 4h, … up to the first radius covering the carrier."""
    radii = [resolution / 2, resolution]
    while radii[-1] < diameter:
        radii.append(radii[-1] * 2)
    return radii


def metric_balls(metric: np.ndarray, resolution: float) -> Basis:
    """Neighbourhood basis of closed metric balls at dyadic radii."""
    diameter = float(metric.max()) if metric.size else 0.0
    radii = ball_radii(resolution, diameter)
    slack = 1e-9 * max(1.0, diameter)
    return tuple(
        tuple(np.flatnonzero(metric[p] <= r + slack) for r in radii)
        for p in range(len(metric))
    )


def ball(metric: np.ndarray, p: int, radius: float) -> np.ndarray:
    return np.flatnonzero(metric[p] <= radius + 1e-9 * max(1.0, radius))


def local_omega(space: SpaceDescription, members: np.ndarray) -> np.ndarray:
    """Longest step chains that stay inside `members`; 0 where none exists."""
    sub = np.ix_(members, members)
    paths = longest_paths(space.steps[sub], space.tau[sub], DEFAULT_TOLERANCES.absolute)
    return np.where(paths.reach, np.maximum(paths.values, 0.0), 0.0)


def ball_atlas(space: SpaceDescription, radius: float, regular: bool) -> LocalisingAtlas:
    """Atlas of metric balls with ω the local longest-chain value."""
    members = tuple(ball(space.metric, x, radius) for x in range(space.n))
    omega = tuple(local_omega(space, m) for m in members)
    log.debug("built ball atlas for %s at radius %g", space.name, radius)
    return LocalisingAtlas(
        members=members, omega=omega, regular=regular, kind="balls", radius=radius
    )
