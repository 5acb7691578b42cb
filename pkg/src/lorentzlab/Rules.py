"""Coordinate rules: ≤, ≪ and τ evaluated at arbitrary coordinates.

Rules back the "rule:<tag>" and "formula:<tag>" kinds of a space document, the
exemplar builders and the ε-tests (closedness, lower semicontinuity), which
need relation values off the sampled lattice.
"""

import logging
import re
from abc import ABC, abstractmethod

import numpy as np

from .Errors import StructuralError
from .Models import ModelSpace, model_relations, model_tau_array

log = logging.getLogger(__name__)

CONE_TOL = 1e-9

AXES_2D = np.array([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
COMPASS_2D = np.array(
    [[np.cos(k * np.pi / 4), np.sin(k * np.pi / 4)] for k in range(8)]
)


def pairwise(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Broadcast views (P[i], Q[j]) over all ordered pairs."""
    return coords[:, None, :], coords[None, :, :]


class Rule(ABC):
    """Relations of a continuum space evaluated pointwise."""

    tag: str
    dim: int

    @abstractmethod
    def relations(self, P, Q) -> tuple[np.ndarray, np.ndarray]:
        """(causal, chronological) for P → Q, broadcasting."""

    @abstractmethod
    def tau(self, P, Q) -> np.ndarray: ...

    def step(self, P, Q) -> np.ndarray:
        """Pairs whose straight chart segment is a causal curve of the space."""
        causal, _ = self.relations(P, Q)
        return causal

    @abstractmethod
    def perturb(self, P, eps: float) -> np.ndarray:
        """(n, m, dim) displacements of each point by eps, staying in the space.

        Index 0 is always the unperturbed point.
        """

    @abstractmethod
    def jitter(self, P, radius: float) -> np.ndarray:
        """(n, m, dim) continuum points at distance radius/2 from each point."""

    def materialize(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Dense (causal, chron, tau) over a carrier; ≤ reflexive, ≪ irreflexive."""
        P, Q = pairwise(coords)
        causal, chron = self.relations(P, Q)
        tau = np.where(chron, self.tau(P, Q), 0.0)
        n = len(coords)
        causal = causal | np.eye(n, dtype=bool)
        chron = chron & ~np.eye(n, dtype=bool)
        np.fill_diagonal(tau, 0.0)
        return causal, chron, tau

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Rule) and self.tag == other.tag

    def __hash__(self) -> int:
        return hash(self.tag)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tag!r})"


def _minkowski(P, Q, strict_only: bool = False):
    d = np.asarray(Q, dtype=float) - np.asarray(P, dtype=float)
    dt, dx = d[..., 0], np.abs(d[..., 1])
    chron = dt > dx + CONE_TOL
    if strict_only:
        return chron, chron
    return dt >= dx - CONE_TOL, chron


def _minkowski_tau(P, Q):
    d = np.asarray(Q, dtype=float) - np.asarray(P, dtype=float)
    sq = d[..., 0] ** 2 - d[..., 1] ** 2
    _, chron = _minkowski(P, Q)
    return np.where(chron, np.sqrt(np.maximum(sq, 0.0)), 0.0)


class _PlaneRule(Rule):
    dim = 2

    def perturb(self, P, eps):
        P = np.asarray(P, dtype=float)
        return P[:, None, :] + eps * AXES_2D[None, :, :]

    def jitter(self, P, radius):
        P = np.asarray(P, dtype=float)
        return P[:, None, :] + (radius / 2) * COMPASS_2D[None, :, :]


class MinkowskiRule(_PlaneRule):
    """Closed light cones of 2-D Minkowski space in (t, x)."""

    tag = "minkowski"

    def relations(self, P, Q):
        return _minkowski(P, Q)

    def tau(self, P, Q):
        return _minkowski_tau(P, Q)


class OpenConeRule(_PlaneRule):
    """Minkowski with ≤ replaced by the open cone (plus equality); not closed."""

    tag = "minkowski-open"

    def relations(self, P, Q):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        chron, _ = _minkowski(P, Q, strict_only=True)
        same = np.all(np.abs(Q - P) <= CONE_TOL, axis=-1)
        return chron | same, chron

    def tau(self, P, Q):
        return _minkowski_tau(P, Q)


class ModelRule(_PlaneRule):
    """Relations and closed-form τ of a model space M_K."""

    def __init__(self, model: ModelSpace) -> None:
        self.model = model
        self.tag = f"model:K={model.K!r}"

    def relations(self, P, Q):
        return model_relations(self.model, P, Q)

    def tau(self, P, Q):
        P, Q = np.broadcast_arrays(np.asarray(P, dtype=float), np.asarray(Q, dtype=float))
        return model_tau_array(self.model, P, Q)


class FanRule(Rule):
    """Two-dimensional Minkowski N with a timelike ray Γ = {(0,0,z): z ≥ 0} glued at 0.

    Coordinates are (t, x, z); N-points have z = 0, Γ-points t = x = 0.
    For p ∈ N and Z ∈ Γ: p ≤ Z iff (t,x) ≤ 0 in N, τ(p,Z) = τ_N(p,0) + z.
    """

    tag = "fan"
    dim = 3

    @staticmethod
    def on_ray(P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return (
            (np.abs(P[..., 0]) <= CONE_TOL)
            & (np.abs(P[..., 1]) <= CONE_TOL)
            & (P[..., 2] > CONE_TOL)
        )

    @staticmethod
    def is_apex(P) -> np.ndarray:
        return np.all(np.abs(np.asarray(P, dtype=float)) <= CONE_TOL, axis=-1)

    def _parts(self, P, Q):
        P = np.asarray(P, dtype=float)
        Q = np.asarray(Q, dtype=float)
        pG, qG = self.on_ray(P), self.on_ray(Q)
        zero = np.zeros(2)
        n_causal, n_chron = _minkowski(P[..., :2], Q[..., :2])
        into_apex, _ = _minkowski(P[..., :2], zero)
        dz = Q[..., 2] - P[..., 2]
        return P, Q, pG, qG, n_causal, n_chron, into_apex, dz

    def relations(self, P, Q):
        P, Q, pG, qG, n_causal, n_chron, into_apex, dz = self._parts(P, Q)
        ray_causal = dz >= -CONE_TOL
        ray_chron = dz > CONE_TOL
        causal = np.where(
            ~pG & ~qG, n_causal, np.where(pG & qG, ray_causal, ~pG & qG & into_apex)
        )
        chron = np.where(
            ~pG & ~qG, n_chron, np.where(pG & qG, ray_chron, ~pG & qG & into_apex)
        )
        return causal, chron

    def tau(self, P, Q):
        P, Q, pG, qG, _, _, into_apex, dz = self._parts(P, Q)
        n_tau = _minkowski_tau(P[..., :2], Q[..., :2])
        apex_tau = _minkowski_tau(P[..., :2], np.zeros(2))
        value = np.where(
            ~pG & ~qG,
            n_tau,
            np.where(
                pG & qG,
                np.maximum(dz, 0.0),
                np.where(~pG & qG & into_apex, apex_tau + Q[..., 2], 0.0),
            ),
        )
        causal, _ = self.relations(P, Q)
        return np.where(causal, value, 0.0)

    def step(self, P, Q):
        causal, _ = self.relations(P, Q)
        # curves from N into Γ pass through the apex
        leaves_sheet = ~self.on_ray(P) & ~self.is_apex(P) & self.on_ray(Q)
        return causal & ~leaves_sheet

    def perturb(self, P, eps):
        P = np.asarray(P, dtype=float)
        out = np.repeat(P[:, None, :], 6, axis=1)
        sheet = ~self.on_ray(P)
        flat = np.zeros((6, 3))
        flat[:5, :2] = AXES_2D
        ray = np.zeros((6, 3))
        ray[1, 2], ray[2, 2] = 1.0, -1.0
        apex = flat.copy()
        apex[5, 2] = 1.0
        shifts = np.where(sheet[:, None, None], flat[None], ray[None])
        shifts = np.where(self.is_apex(P)[:, None, None], apex[None], shifts)
        return out + eps * shifts

    def jitter(self, P, radius):
        P = np.asarray(P, dtype=float)
        flat = np.zeros((9, 3))
        flat[:8, :2] = COMPASS_2D
        ray = np.zeros((9, 3))
        ray[:, 2] = 1.0
        ray[1::2, 2] = -1.0
        apex = flat.copy()
        apex[8, 2] = 1.0
        shifts = np.where(~self.on_ray(P)[:, None, None], flat[None], ray[None])
        shifts = np.where(self.is_apex(P)[:, None, None], apex[None], shifts)
        moved = P[:, None, :] + (radius / 2) * shifts
        # jitter below the apex folds back onto the ray
        on_ray = self.on_ray(P)[:, None] & (moved[..., 2] < 0)
        moved[..., 2] = np.where(on_ray, 0.0, moved[..., 2])
        return moved


_MODEL_TAG = re.compile(r"^model:K=(?P<K>[-+0-9.eE]+)$")


def rule_for(tag: str) -> Rule:
    """Look up a rule by tag: minkowski, minkowski-open, fan, model:K=<k>."""
    tag = tag.removeprefix("rule:").removeprefix("formula:")
    if tag == MinkowskiRule.tag:
        return MinkowskiRule()
    if tag == OpenConeRule.tag:
        return OpenConeRule()
    if tag == FanRule.tag:
        return FanRule()
    match = _MODEL_TAG.match(tag)
    if match:
        return ModelRule(ModelSpace.of(float(match.group("K"))))
    raise StructuralError(f"unknown rule tag {tag!r}")
