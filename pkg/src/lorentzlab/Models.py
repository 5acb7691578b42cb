"""The two-dimensional Lorentzian model spaces M_K and comparison triangles.

Every kind is charted by (t, x). For K = 1/r² (de Sitter cover) x = r·θ with θ
the unwrapped angle; for K = -1/r² (anti-de Sitter cover) t = r·t' with t' the
unwrapped cover time and x = r·ρ. As r → ∞ both charts become the Minkowski
chart.
"""

import logging
import math
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .Config import DEFAULT_TOLERANCES, Tolerances
from .Errors import (
    InfeasibleTriangleError,
    NoCorrespondenceError,
    NotAdmissibleError,
    PreconditionError,
    StructuralError,
)
from .ExtReal import ExtReal

log = logging.getLogger(__name__)

SURFACE_TOL = 1e-12
# causal-cone comparisons in conformal coordinates
CONE_EPS = 1e-12

SideName = Literal["xy", "yz", "xz"]


class ModelKind(str, Enum):
    MINKOWSKI = "minkowski"
    DE_SITTER = "de_sitter_cover"
    ANTI_DE_SITTER = "anti_de_sitter_cover"


class ModelSpace(BaseModel):
    """M_K: Minkowski for K = 0, de Sitter cover for K > 0, anti-de Sitter cover for K < 0."""

    model_config = ConfigDict(frozen=True)

    K: float = 0.0
    r: float | None = None
    kind: ModelKind = ModelKind.MINKOWSKI

    @model_validator(mode="before")
    @classmethod
    def _derive(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        K = float(data.get("K", 0.0))
        r = data.get("r")
        if K == 0.0:
            if r is not None and math.isfinite(float(r)):
                raise ValueError("K = 0 requires r to be absent")
            data.update(K=0.0, r=None, kind=ModelKind.MINKOWSKI)
            return data
        derived = 1.0 / math.sqrt(abs(K))
        if r is not None and not math.isclose(float(r), derived, rel_tol=1e-9):
            raise ValueError(f"r = {r} does not match K = {K} (expected {derived})")
        data.update(
            r=derived,
            kind=ModelKind.DE_SITTER if K > 0 else ModelKind.ANTI_DE_SITTER,
        )
        return data

    @classmethod
    def of(cls, K: float) -> "ModelSpace":
        return cls(K=K)

    @property
    def radius(self) -> float:
        return math.inf if self.r is None else self.r

    def max_time_separation(self) -> float:
        """π/√(-K) for the anti-de Sitter cover, ∞ otherwise."""
        if self.kind is ModelKind.ANTI_DE_SITTER:
            return math.pi * self.radius
        return math.inf

    # chart helpers, all vectorised over trailing coordinate pairs

    def conformal(self, pts) -> np.ndarray:
        """Coordinates (T, Y) in which p ≤ q iff ΔT ≥ |ΔY|."""
        pts = np.asarray(pts, dtype=float)
        t, x = pts[..., 0], pts[..., 1]
        if self.kind is ModelKind.MINKOWSKI:
            return np.stack([t, x], axis=-1)
        r = self.radius
        if self.kind is ModelKind.DE_SITTER:
            return np.stack([np.arctan(np.sinh(t / r)), x / r], axis=-1)
        return np.stack([t / r, np.arctan(np.sinh(x / r))], axis=-1)

    def embed(self, pts) -> np.ndarray:
        """Points of the chart → ℝ³ (ℝ² for Minkowski) with the ambient form."""
        pts = np.asarray(pts, dtype=float)
        t, x = pts[..., 0], pts[..., 1]
        if self.kind is ModelKind.MINKOWSKI:
            return np.stack([t, x], axis=-1)
        r = self.radius
        if self.kind is ModelKind.DE_SITTER:
            ch = r * np.cosh(t / r)
            return np.stack(
                [r * np.sinh(t / r), ch * np.cos(x / r), ch * np.sin(x / r)], axis=-1
            )
        ch = r * np.cosh(x / r)
        return np.stack(
            [ch * np.cos(t / r), ch * np.sin(t / r), r * np.sinh(x / r)], axis=-1
        )

    def form(self, a, b) -> np.ndarray:
        """Ambient bilinear form ⟨a, b⟩."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind is ModelKind.MINKOWSKI:
            return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
        if self.kind is ModelKind.DE_SITTER:
            return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]
        return -a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]

    def lift(self, E, near: "ModelPoint | None" = None) -> "ModelPoint":
        """Embedded point → chart point, choosing the sheet nearest `near`."""
        E = np.asarray(E, dtype=float)
        if self.kind is ModelKind.MINKOWSKI:
            return ModelPoint(coords=(float(E[0]), float(E[1])))
        r = self.radius
        sign = 1.0 if self.kind is ModelKind.DE_SITTER else -1.0
        defect = float(self.form(E, E)) - sign * r * r
        if abs(defect) > SURFACE_TOL * max(1.0, r * r, float(np.dot(E, E))):
            raise StructuralError(f"point {E.tolist()} is off the {self.kind.value} surface")
        if self.kind is ModelKind.DE_SITTER:
            t = r * math.asinh(E[0] / r)
            angle = math.atan2(E[2], E[1])
            ref = 0.0 if near is None else near.x / r
            angle += 2 * math.pi * round((ref - angle) / (2 * math.pi))
            return ModelPoint(coords=(t, r * angle))
        angle = math.atan2(E[1], E[0])
        ref = 0.0 if near is None else near.t / r
        angle += 2 * math.pi * round((ref - angle) / (2 * math.pi))
        return ModelPoint(coords=(r * angle, r * math.asinh(E[2] / r)))

    def on_surface(self, E) -> bool:
        try:
            self.lift(E)
        except StructuralError:
            return False
        return True


class ModelPoint(BaseModel):
    """A point of M_K in the (t, x) chart."""

    model_config = ConfigDict(frozen=True)

    coords: tuple[float, float]

    @model_validator(mode="after")
    def _finite(self) -> "ModelPoint":
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError(f"model point coordinates must be finite: {self.coords}")
        return self

    @property
    def t(self) -> float:
        return self.coords[0]

    @property
    def x(self) -> float:
        return self.coords[1]

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


class TriangleSides(BaseModel):
    """Side lengths (a, b, c) = (τ(x,y), τ(y,z), τ(x,z))."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(ge=0)
    b: float = Field(ge=0)
    c: float = Field(ge=0)


def model_relations(model: ModelSpace, P, Q) -> tuple[np.ndarray, np.ndarray]:
    """(causal, chronological) masks for pairs P[i] → Q[i]."""
    cp = model.conformal(P)
    cq = model.conformal(Q)
    dT = cq[..., 0] - cp[..., 0]
    dY = np.abs(cq[..., 1] - cp[..., 1])
    scale = CONE_EPS * np.maximum(1.0, np.abs(dT))
    return dT >= dY - scale, dT > dY + scale


def model_tau_array(model: ModelSpace, P, Q) -> np.ndarray:
    """Vectorised time separation τ̄(P[i], Q[i]) with exact ∞."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _, chron = model_relations(model, P, Q)
    if model.kind is ModelKind.MINKOWSKI:
        d = Q - P
        sq = d[..., 0] ** 2 - d[..., 1] ** 2
        return np.where(chron, np.sqrt(np.maximum(sq, 0.0)), 0.0)
    r = model.radius
    D = model.embed(Q) - model.embed(P)
    n = np.maximum(-model.form(D, D), 0.0)
    half = np.sqrt(n) / (2 * r)
    if model.kind is ModelKind.DE_SITTER:
        return np.where(chron, 2 * r * np.arcsinh(half), 0.0)
    # anti-de Sitter: geodesics from P refocus at cover time π, mirrored in space
    cp = model.conformal(P)
    cq = model.conformal(Q)
    reachable = (cp[..., 0] + math.pi - cq[..., 0]) > np.abs(cq[..., 1] + cp[..., 1])
    finite = 2 * r * np.arcsin(np.minimum(half, 1.0))
    return np.where(chron, np.where(reachable, finite, np.inf), 0.0)


def tau_model(model: ModelSpace, p: ModelPoint, q: ModelPoint) -> ExtReal:
    """τ̄(p, q) in M_K."""
    value = model_tau_array(model, p.array()[None, :], q.array()[None, :])[0]
    return ExtReal(float(value))


def is_causal(model: ModelSpace, p: ModelPoint, q: ModelPoint) -> bool:
    causal, _ = model_relations(model, p.array(), q.array())
    return bool(causal)


def _equal(u: float, v: float, tol: Tolerances) -> bool:
    return bool(tol.close(u, v))


def check_size_bounds(
    sides: TriangleSides, K: float, tol: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Timelike size bounds for (a, b, c) and K.

    Degenerate triangles (c = a + b) need c < π/√K when K > 0; for K < 0 every
    triangle needs c < π/√(-K).
    """
    a, b, c = sides.a, sides.b, sides.c
    if bool(tol.definitely_less(c, a + b)):
        raise NotAdmissibleError(f"c = {c} < a + b = {a + b}")
    if K < 0:
        return c < math.pi / math.sqrt(-K)
    if K > 0 and _equal(c, a + b, tol):
        return c < math.pi / math.sqrt(K)
    return True


class ModelSide(BaseModel):
    """A side of a realized triangle, parameterized by τ̄-arclength fraction."""

    model_config = ConfigDict(frozen=True)

    model: ModelSpace
    start: ModelPoint
    end: ModelPoint
    length: float
    causal_type: Literal["timelike", "null", "constant"]

    def point_at(self, s: float) -> ModelPoint:
        if not 0.0 <= s <= 1.0:
            raise PreconditionError(f"fraction {s} outside [0, 1]")
        if self.causal_type == "constant" or s == 0.0:
            return self.start
        if s == 1.0:
            return self.end
        ref = ModelPoint(
            coords=tuple((1 - s) * self.start.array() + s * self.end.array())
        )
        if self.model.kind is ModelKind.MINKOWSKI:
            return ref
        P = self.model.embed(self.start.array())
        Q = self.model.embed(self.end.array())
        if self.causal_type == "null":
            # null geodesics of the quadrics are ambient straight lines
            return self.model.lift(P + s * (Q - P), near=ref)
        r = self.model.radius
        L = self.length
        if self.model.kind is ModelKind.DE_SITTER:
            W = (Q - P * math.cosh(L / r)) / (r * math.sinh(L / r))
            E = P * math.cosh(s * L / r) + W * r * math.sinh(s * L / r)
        else:
            W = (Q - P * math.cos(L / r)) / (r * math.sin(L / r))
            E = P * math.cos(s * L / r) + W * r * math.sin(s * L / r)
        return self.model.lift(E, near=ref)

    def samples(self, count: int) -> list[ModelPoint]:
        return [self.point_at(i / (count - 1)) for i in range(count)]


class ComparisonTriangle(BaseModel):
    """A triangle (x̄, ȳ, z̄) in M_K with prescribed side lengths."""

    model_config = ConfigDict(frozen=True)

    model: ModelSpace
    side_lengths: TriangleSides
    x: ModelPoint
    y: ModelPoint
    z: ModelPoint

    def side(self, name: SideName) -> ModelSide:
        start, end, length = {
            "xy": (self.x, self.y, self.side_lengths.a),
            "yz": (self.y, self.z, self.side_lengths.b),
            "xz": (self.x, self.z, self.side_lengths.c),
        }[name]
        if start == end:
            kind = "constant"
        elif length > 0:
            kind = "timelike"
        else:
            kind = "null"
        return ModelSide(
            model=self.model, start=start, end=end, length=length, causal_type=kind
        )

    def measured(self) -> TriangleSides:
        return TriangleSides(
            a=tau_model(self.model, self.x, self.y).value,
            b=tau_model(self.model, self.y, self.z).value,
            c=tau_model(self.model, self.x, self.z).value,
        )


def _apex(model: ModelSpace, a: float, b: float, c: float) -> ModelPoint:
    if model.kind is ModelKind.MINKOWSKI:
        t = (c * c + a * a - b * b) / (2 * c)
        return ModelPoint(coords=(t, math.sqrt(max(t * t - a * a, 0.0))))
    r = model.radius
    if model.kind is ModelKind.DE_SITTER:
        X = r * math.cosh(a / r)
        T = (X * math.cosh(c / r) - r * math.cosh(b / r)) / math.sinh(c / r)
        Y2 = r * r + T * T - X * X
        if Y2 < -1e-9 * r * r:
            raise InfeasibleTriangleError(f"no de Sitter apex for sides {(a, b, c)}")
        E = np.array([T, X, math.sqrt(max(Y2, 0.0))])
        # re-project onto the surface against round-off
        E[2] = math.sqrt(max(r * r + E[0] ** 2 - E[1] ** 2, 0.0))
        return model.lift(E)
    U = r * math.cos(a / r)
    V = (r * math.cos(b / r) - U * math.cos(c / r)) / math.sin(c / r)
    X2 = U * U + V * V - r * r
    if X2 < -1e-9 * r * r:
        raise InfeasibleTriangleError(f"no anti-de Sitter apex for sides {(a, b, c)}")
    E = np.array([U, V, math.sqrt(max(X2, 0.0))])
    return model.lift(E, near=ModelPoint(coords=(c / 2, 0.0)))


def realize_triangle(
    model: ModelSpace, sides: TriangleSides, tol: Tolerances = DEFAULT_TOLERANCES
) -> ComparisonTriangle:
    """Canonical placement: x̄ at the origin, z̄ on the time axis, ȳ with x ≥ 0."""
    if not check_size_bounds(sides, model.K, tol):
        raise PreconditionError(f"sides {sides} violate size bounds for K = {model.K}")
    a, b, c = sides.a, sides.b, sides.c
    if c <= 0:
        raise NotAdmissibleError("an admissible triangle has a timelike side")
    origin = ModelPoint(coords=(0.0, 0.0))
    top = ModelPoint(coords=(c, 0.0))
    if a == 0 and b == 0:
        raise NotAdmissibleError("an admissible triangle has a timelike side")
    if b == 0 and _equal(a, c, tol):
        apex = top
    elif a == 0 and _equal(b, c, tol):
        apex = origin
    else:
        apex = _apex(model, a, b, c)
    triangle = ComparisonTriangle(model=model, side_lengths=sides, x=origin, y=apex, z=top)
    check = tol if model.kind is ModelKind.MINKOWSKI else Tolerances(
        absolute=tol.comparison, relative=tol.relative, comparison=tol.comparison
    )
    got = triangle.measured()
    for want, have in ((a, got.a), (b, got.b), (c, got.c)):
        if not _equal(want, have, check):
            raise InfeasibleTriangleError(
                f"realized sides {got} differ from requested {sides}"
            )
    log.debug("realized %s in %s: y = %s", sides, model.kind.value, apex.coords)
    return triangle


def corresponding_point(
    triangle: ComparisonTriangle, side: SideName, s: float
) -> ModelPoint:
    """Point at τ̄-fraction s of the side, measured from its past vertex."""
    geodesic = triangle.side(side)
    if geodesic.causal_type != "timelike":
        raise NoCorrespondenceError(f"side {side} is {geodesic.causal_type}")
    return geodesic.point_at(s)
