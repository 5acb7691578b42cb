"""Builders for the shipped exemplar spaces and Poisson sprinklings."""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .Errors import EmptySpaceError
from .Extension import ExtensionCandidate, inclusion_map
from .LongestPath import longest_paths
from .Models import ModelSpace
from .Rules import FanRule, MinkowskiRule, ModelRule, Rule, pairwise
from .Space import SpaceDescription, ball_atlas, euclidean_metric, metric_balls

log = logging.getLogger(__name__)

ExemplarKind = Literal[
    "minkowski_patch",
    "model_patch",
    "fan_space",
    "punctured_patch",
    "slit_patch",
    "half_space_patch",
    "toy_dag",
]
Bounds = tuple[float, float]

ATLAS_RADIUS = 4.0
SLIT_HALF_WIDTH = 1.0

# 0 → 1 → 3 and 0 → 2 → 3 tie; 3 → 4 continues both
TOY_DAG_EDGES = ((0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (3, 4, 2.0))


class ExemplarSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ExemplarKind
    resolution: float = Field(default=0.25, gt=0)
    extent: tuple[Bounds, Bounds] = ((-2.0, 2.0), (-2.0, 2.0))
    ray_length: float = Field(default=3.0, gt=0)
    K: float = 0.0
    seed: int = 0
    step_radius: float | Literal["grid"] | None = None
    fan_compatible: bool = False
    ambient_complete: bool = False
    name: str | None = None

    @model_validator(mode="after")
    def _nonempty(self) -> "ExemplarSpec":
        for lo, hi in self.extent:
            if not lo < hi:
                raise ValueError(f"empty extent {self.extent}")
        return self

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "model_patch":
            return f"model_patch(K={self.K:g})"
        return self.kind

    def step_limit(self) -> float | None:
        if self.step_radius == "grid":
            return 2 * self.resolution * math.sqrt(2)
        return self.step_radius


class SprinklingSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    density: float = Field(gt=0)
    region: tuple[Bounds, Bounds] = ((0.0, 1.0), (-0.5, 0.5))
    shape: Literal["box", "diamond"] = "box"
    model: ModelSpace = Field(default_factory=ModelSpace)
    seed: int = 0


# lattices


def _axis(bounds: Bounds, h: float) -> np.ndarray:
    lo, hi = bounds
    return lo + h * np.arange(int(math.floor((hi - lo) / h + 1e-9)) + 1)


def plane_lattice(extent: tuple[Bounds, Bounds], h: float) -> np.ndarray:
    """Lattice points of the box, sorted by (t, x)."""
    t, x = np.meshgrid(_axis(extent[0], h), _axis(extent[1], h), indexing="ij")
    return np.column_stack([t.ravel(), x.ravel()])


def _box_frame(coords: np.ndarray, extent: tuple[Bounds, Bounds], h: float) -> np.ndarray:
    frame = np.zeros(len(coords), dtype=bool)
    for axis, bounds in enumerate(extent):
        grid = _axis(bounds, h)
        for edge in (grid[0], grid[-1]):
            frame |= np.abs(coords[:, axis] - edge) <= 1e-9
    return frame


def _next_to(coords: np.ndarray, omitted: np.ndarray, h: float) -> np.ndarray:
    """Carrier points one lattice step from an omitted point; the sample ends there."""
    if len(omitted) == 0:
        return np.zeros(len(coords), dtype=bool)
    gap = np.linalg.norm(coords[:, None, :] - omitted[None, :, :], axis=-1)
    return (gap <= h * (1 + 1e-9)).any(axis=1)


def _sorted(coords: np.ndarray) -> np.ndarray:
    return coords[np.lexsort(coords.T[::-1])]


def blocked_steps(coords: np.ndarray, holes: np.ndarray, radius: float) -> np.ndarray:
    """Pairs whose straight segment passes within `radius` of an excised point."""
    P, Q = pairwise(coords)
    d = Q - P
    dd = np.einsum("ijk,ijk->ij", d, d)
    dd = np.where(dd == 0, 1.0, dd)
    blocked = np.zeros(dd.shape, dtype=bool)
    for hole in holes:
        s = np.clip(np.einsum("ijk,ijk->ij", hole - P, d) / dd, 0.0, 1.0)
        nearest = P + s[..., None] * d
        blocked |= np.linalg.norm(nearest - hole, axis=-1) <= radius + 1e-9
    return blocked


# assembly


def _assemble(
    name: str,
    coords: np.ndarray,
    rule: Rule,
    h: float,
    *,
    frame: np.ndarray,
    holes: np.ndarray | None = None,
    step_limit: float | None = None,
    regular: bool = True,
    ambient_complete: bool = False,
    notes: dict[str, str] | None = None,
) -> SpaceDescription:
    n = len(coords)
    if n == 0:
        raise EmptySpaceError(f"{name} has no carrier points")
    metric = euclidean_metric(coords)
    causal, chron, tau = rule.materialize(coords)
    P, Q = pairwise(coords)
    steps = rule.step(P, Q) & ~np.eye(n, dtype=bool)
    if step_limit is not None:
        steps &= metric <= step_limit + 1e-9
    lipschitz = 1.0
    kept_rule: Rule | None = rule
    if holes is not None and len(holes):
        steps &= ~blocked_steps(coords, holes, h / 2)
        paths = longest_paths(steps, np.where(steps, tau, 0.0))
        causal = paths.reach
        tau = np.where(causal, np.maximum(paths.values, 0.0), 0.0)
        np.fill_diagonal(tau, 0.0)
        chron = tau > 0
        lipschitz = math.sqrt(float(metric.max()) / h)
        kept_rule = None
    space = SpaceDescription(
        name=name,
        metric=metric,
        causal=causal,
        chron=chron,
        tau=tau,
        steps=steps,
        coords=coords,
        basis=metric_balls(metric, h),
        ambient_complete=ambient_complete,
        resolution=h,
        frame=frame,
        holes=holes,
        rule=kept_rule,
        metric_kind="euclidean",
        lipschitz=lipschitz,
        notes=dict(notes or {}),
    )
    isolated = ~(space.chron_steps.any(axis=0) | space.chron_steps.any(axis=1))
    if n > 1 and isolated.any():
        log.warning(
            "%s: resolution %g too coarse for path-connectedness at %s",
            name,
            h,
            space.label(int(np.flatnonzero(isolated)[0])),
        )
    return space.replace(atlas=ball_atlas(space, ATLAS_RADIUS * h, regular))


def _plane(spec: ExemplarSpec, rule: Rule, **extra) -> SpaceDescription:
    h = spec.resolution
    lattice = plane_lattice(spec.extent, h)
    cone = _past_null_cone(lattice) if spec.fan_compatible else np.zeros(len(lattice), dtype=bool)
    coords = lattice[~cone]
    return _assemble(
        spec.label,
        coords,
        rule,
        h,
        frame=_box_frame(coords, spec.extent, h) | _next_to(coords, lattice[cone], h),
        step_limit=spec.step_limit(),
        ambient_complete=spec.ambient_complete,
        notes={"kind": spec.kind},
        **extra,
    )


def _excised(spec: ExemplarSpec, removed: np.ndarray, omitted: np.ndarray | None = None) -> SpaceDescription:
    h = spec.resolution
    lattice = plane_lattice(spec.extent, h)
    drop = removed if omitted is None else removed | omitted
    coords = lattice[~drop]
    frame = _box_frame(coords, spec.extent, h)
    if omitted is not None:
        frame |= _next_to(coords, lattice[omitted], h)
    return _assemble(
        spec.label,
        coords,
        MinkowskiRule(),
        h,
        frame=frame,
        holes=lattice[removed],
        step_limit=spec.step_limit(),
        regular=False,
        ambient_complete=spec.ambient_complete,
        notes={"kind": spec.kind},
    )


def _past_null_cone(coords: np.ndarray) -> np.ndarray:
    """N-points on the past light cone of the origin, the origin excluded."""
    t, x = coords[:, 0], coords[:, 1]
    return (t < -1e-9) & (np.abs(t + np.abs(x)) <= 1e-9)


def fan_space(spec: ExemplarSpec) -> SpaceDescription:
    """Minkowski sheet N with the ray Γ over its origin; 0 is a carrier point."""
    h = spec.resolution
    sheet = plane_lattice(spec.extent, h)
    if not (np.abs(sheet).max(axis=1) <= 1e-9).any():
        raise EmptySpaceError("the fan carrier needs the origin on its lattice")
    cone = _past_null_cone(sheet)
    omitted = np.column_stack([sheet[cone], np.zeros(int(cone.sum()))])
    sheet = sheet[~cone]
    zs = h * np.arange(1, int(math.floor(spec.ray_length / h + 1e-9)) + 1)
    ray = np.column_stack([np.zeros_like(zs), np.zeros_like(zs), zs])
    coords = _sorted(np.vstack([np.column_stack([sheet, np.zeros(len(sheet))]), ray]))
    frame = _box_frame(coords[:, :2], spec.extent, h) & (coords[:, 2] <= 1e-9)
    frame |= _next_to(coords, omitted, h)
    if len(zs):
        frame |= np.abs(coords[:, 2] - zs[-1]) <= 1e-9
    return _assemble(
        spec.label,
        coords,
        FanRule(),
        h,
        frame=frame,
        step_limit=spec.step_limit(),
        ambient_complete=spec.ambient_complete,
        notes={"kind": spec.kind},
    )


def build_exemplar(spec: ExemplarSpec) -> SpaceDescription:
    """A fully populated space for the given exemplar spec."""
    log.debug("building %s at h = %g", spec.label, spec.resolution)
    if spec.kind == "minkowski_patch":
        return _plane(spec, MinkowskiRule())
    if spec.kind == "model_patch":
        return _plane(spec, ModelRule(ModelSpace.of(spec.K)))
    if spec.kind == "fan_space":
        return fan_space(spec)
    lattice = plane_lattice(spec.extent, spec.resolution)
    t, x = lattice[:, 0], lattice[:, 1]
    if spec.kind == "punctured_patch":
        origin = (np.abs(t) <= 1e-9) & (np.abs(x) <= 1e-9)
        return _excised(spec, origin, _past_null_cone(lattice) if spec.fan_compatible else None)
    if spec.kind == "slit_patch":
        slit = (np.abs(t) <= 1e-9) & (np.abs(x) <= SLIT_HALF_WIDTH + 1e-9)
        return _excised(spec, slit)
    if spec.kind == "half_space_patch":
        return _excised(spec, t >= -1e-9)
    return SpaceDescription.from_edges(5, TOY_DAG_EDGES, name=spec.label, notes={"kind": spec.kind})


def extension_pair(
    kind: Literal["punctured_in_fan", "half_space_in_minkowski", "slit_in_minkowski"],
    resolution: float = 0.25,
    extent: tuple[Bounds, Bounds] = ((-2.0, 2.0), (-2.0, 2.0)),
    ray_length: float = 3.0,
) -> ExtensionCandidate:
    """Shipped extension candidates, embedded by coordinate inclusion."""
    common = dict(resolution=resolution, extent=extent)
    if kind == "punctured_in_fan":
        base = build_exemplar(ExemplarSpec(kind="punctured_patch", fan_compatible=True, **common))
        ambient = build_exemplar(ExemplarSpec(kind="fan_space", ray_length=ray_length, **common))
    elif kind == "half_space_in_minkowski":
        base = build_exemplar(ExemplarSpec(kind="half_space_patch", **common))
        ambient = build_exemplar(ExemplarSpec(kind="minkowski_patch", **common))
    else:
        base = build_exemplar(ExemplarSpec(kind="slit_patch", **common))
        ambient = build_exemplar(ExemplarSpec(kind="minkowski_patch", **common))
    return ExtensionCandidate(base=base, ambient=ambient, embedding=inclusion_map(base, ambient))


# sprinkling


def _inside(points: np.ndarray, spec: SprinklingSpec) -> np.ndarray:
    (t0, t1), (x0, x1) = spec.region
    if spec.shape == "box":
        return np.ones(len(points), dtype=bool)
    xc = (x0 + x1) / 2
    t, x = points[:, 0], points[:, 1]
    return np.abs(x - xc) <= np.minimum(t - t0, t1 - t)


def sprinkle(spec: SprinklingSpec) -> SpaceDescription:
    """Poisson points in the region with the model's relations and τ."""
    (t0, t1), (x0, x1) = spec.region
    if spec.shape == "box":
        volume = (t1 - t0) * (x1 - x0)
    else:
        half = min((t1 - t0) / 2, (x1 - x0) / 2)
        volume = 2 * half * half
    rng = np.random.default_rng(spec.seed)
    count = int(rng.poisson(spec.density * volume))
    if count == 0:
        raise EmptySpaceError(f"sprinkling at density {spec.density:g} drew no points")
    points = np.empty((0, 2))
    while len(points) < count:
        draw = rng.uniform((t0, x0), (t1, x1), size=(2 * count, 2))
        points = np.vstack([points, draw[_inside(draw, spec)]])
    coords = _sorted(points[:count])
    rule = ModelRule(spec.model)
    h = 1.0 / math.sqrt(spec.density)
    metric = euclidean_metric(coords)
    causal, chron, tau = rule.materialize(coords)
    space = SpaceDescription(
        name=f"sprinkling(K={spec.model.K:g}, density={spec.density:g}, seed={spec.seed})",
        metric=metric,
        causal=causal,
        chron=chron,
        tau=tau,
        coords=coords,
        basis=metric_balls(metric, h),
        resolution=h,
        rule=rule,
        metric_kind="euclidean",
        notes={"kind": "sprinkling", "shape": spec.shape},
    )
    log.debug("sprinkled %d points", count)
    return space.replace(atlas=ball_atlas(space, ATLAS_RADIUS * h, regular=False))
