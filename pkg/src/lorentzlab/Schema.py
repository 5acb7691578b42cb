"""JSON space documents: pydantic models, validation with JSON pointers, load/save."""

import json
import logging
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from .Config import SCHEMA_VERSION
from .Errors import SchemaError, StructuralError
from .ExtReal import INF_TOKEN, encode_matrix
from .Rules import Rule, rule_for
from .Space import LocalisingAtlas, SpaceDescription, ball_atlas, euclidean_metric

log = logging.getLogger(__name__)

Cell = float | str


class PointDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: int
    coords: list[float] | None = None


class MatrixDoc(BaseModel):
    """"matrix" with values, "euclidean", or "formula:<tag>"."""

    model_config = ConfigDict(extra="forbid")

    kind: str
    values: list[list[Cell]] | None = None


class RelationDoc(BaseModel):
    """"edges" with an edge list, or "rule:<tag>"."""

    model_config = ConfigDict(extra="forbid")

    kind: str
    edges: list[tuple[int, int]] | None = None


class AtlasDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["balls", "explicit"] = "explicit"
    regular: bool = False
    radius: float | None = None
    members: list[list[int]] | None = None
    omega: list[list[list[Cell]]] | None = None


class SpaceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = SCHEMA_VERSION
    name: str
    points: list[PointDoc]
    metric: MatrixDoc
    causal: RelationDoc
    chron: RelationDoc
    tau: MatrixDoc
    steps: RelationDoc | None = None
    nbhd_basis: list[list[list[int]]] | None = None
    atlas: AtlasDoc | None = None
    ambient_complete: bool = False
    reflexive: bool = True
    resolution: float | None = None
    frame: list[int] | None = None
    holes: list[list[float]] | None = None
    rule: str | None = None
    lipschitz: float = 1.0
    notes: dict[str, str] = {}

    # document → space

    def _coords(self) -> np.ndarray | None:
        present = [p.coords is not None for p in self.points]
        if not any(present):
            return None
        if not all(present):
            i = present.index(False)
            raise SchemaError(f"/points/{i}/coords", "coordinates must be given for every point or none")
        dims = {len(p.coords or []) for p in self.points}
        if len(dims) != 1:
            raise SchemaError("/points", f"mixed coordinate dimensions {sorted(dims)}")
        return np.array([p.coords for p in self.points], dtype=float)

    def _rule(self, tag: str, pointer: str, coords: np.ndarray | None) -> Rule:
        try:
            rule = rule_for(tag)
        except StructuralError as e:
            raise SchemaError(pointer, str(e)) from None
        if coords is None:
            raise SchemaError(pointer, f"{tag} needs point coordinates")
        if coords.shape[1] != rule.dim:
            raise SchemaError(pointer, f"{tag} expects {rule.dim} coordinates, points have {coords.shape[1]}")
        return rule

    def to_space(self) -> SpaceDescription:
        if self.schema_version != SCHEMA_VERSION:
            raise SchemaError("/schema_version", f"unsupported version {self.schema_version}")
        n = len(self.points)
        for i, p in enumerate(self.points):
            if p.id != i:
                raise SchemaError(f"/points/{i}/id", f"expected id {i}, got {p.id}")
        coords = self._coords()
        rule = None if self.rule is None else self._rule(self.rule, "/rule", coords)

        materialized = None
        for label in ("causal", "chron"):
            doc: RelationDoc = getattr(self, label)
            if doc.kind.startswith("rule:"):
                rule = self._rule(doc.kind, f"/{label}/kind", coords)
                materialized = rule.materialize(coords)
        relations = {}
        for k, label in enumerate(("causal", "chron")):
            doc = getattr(self, label)
            if doc.kind.startswith("rule:"):
                relations[label] = materialized[k]
            else:
                relations[label] = _edges(doc, n, f"/{label}")
        if self.reflexive:
            relations["causal"] |= np.eye(n, dtype=bool)

        if self.tau.kind.startswith("formula:"):
            formula = self._rule(self.tau.kind, "/tau/kind", coords)
            tau = formula.materialize(coords)[2]
            tau = np.where(relations["chron"], tau, 0.0)
        else:
            tau = _matrix(self.tau, n, "/tau")

        if self.metric.kind in ("euclidean", "formula:euclidean"):
            if coords is None:
                raise SchemaError("/metric/kind", "a euclidean metric needs point coordinates")
            metric, metric_kind = euclidean_metric(coords), "euclidean"
        else:
            metric, metric_kind = _matrix(self.metric, n, "/metric"), "matrix"

        steps = None if self.steps is None else _edges(self.steps, n, "/steps")
        frame = None
        if self.frame is not None:
            frame = np.zeros(n, dtype=bool)
            for i, p in enumerate(self.frame):
                _check_id(p, n, f"/frame/{i}")
                frame[p] = True
        basis = None
        if self.nbhd_basis is not None:
            if len(self.nbhd_basis) != n:
                raise SchemaError("/nbhd_basis", f"expected {n} entries, got {len(self.nbhd_basis)}")
            for x, members in enumerate(self.nbhd_basis):
                for k, U in enumerate(members):
                    for j, p in enumerate(U):
                        _check_id(p, n, f"/nbhd_basis/{x}/{k}/{j}")
            basis = tuple(tuple(np.array(U, dtype=np.int64) for U in members) for members in self.nbhd_basis)
        try:
            space = SpaceDescription(
                name=self.name,
                metric=metric,
                causal=relations["causal"],
                chron=relations["chron"],
                tau=tau,
                steps=steps,
                coords=coords,
                basis=basis,
                ambient_complete=self.ambient_complete,
                reflexive=self.reflexive,
                resolution=self.resolution,
                frame=frame,
                holes=_holes(self.holes, coords),
                rule=rule,
                metric_kind=metric_kind,
                lipschitz=self.lipschitz,
                notes=dict(self.notes),
            )
        except StructuralError as e:
            raise SchemaError("", str(e)) from None
        if self.atlas is not None:
            space = space.replace(atlas=_atlas(self.atlas, space))
        return space

    # space → document

    @classmethod
    def from_space(cls, space: SpaceDescription) -> "SpaceDocument":
        def edges(matrix: np.ndarray, drop_diagonal: bool) -> RelationDoc:
            pairs = np.argwhere(matrix & ~np.eye(space.n, dtype=bool) if drop_diagonal else matrix)
            return RelationDoc(kind="edges", edges=[(int(u), int(v)) for u, v in pairs])

        atlas = None
        if space.atlas is not None:
            a = space.atlas
            if a.kind == "balls" and a.radius is not None:
                atlas = AtlasDoc(kind="balls", regular=a.regular, radius=a.radius)
            else:
                atlas = AtlasDoc(
                    kind="explicit",
                    regular=a.regular,
                    radius=a.radius,
                    members=[m.tolist() for m in a.members],
                    omega=[encode_matrix(w) for w in a.omega],
                )
        metric = (
            MatrixDoc(kind="euclidean")
            if space.metric_kind == "euclidean"
            else MatrixDoc(kind="matrix", values=encode_matrix(space.metric))
        )
        return cls(
            name=space.name,
            points=[
                PointDoc(id=i, coords=None if space.coords is None else space.coords[i].tolist())
                for i in range(space.n)
            ],
            metric=metric,
            causal=edges(space.causal, drop_diagonal=space.reflexive),
            chron=edges(space.chron, drop_diagonal=False),
            tau=MatrixDoc(kind="matrix", values=encode_matrix(space.tau)),
            steps=edges(space.steps, drop_diagonal=False),
            nbhd_basis=None
            if space.basis is None
            else [[U.tolist() for U in members] for members in space.basis],
            atlas=atlas,
            ambient_complete=space.ambient_complete,
            reflexive=space.reflexive,
            resolution=space.resolution,
            frame=None if space.frame is None else np.flatnonzero(space.frame).tolist(),
            holes=None if space.holes is None else space.holes.tolist(),
            rule=None if space.rule is None else space.rule.tag,
            lipschitz=space.lipschitz,
            notes=dict(space.notes),
        )


def _holes(holes: list[list[float]] | None, coords: np.ndarray | None) -> np.ndarray | None:
    if holes is None:
        return None
    dim = coords.shape[1] if coords is not None else (len(holes[0]) if holes else 0)
    return np.array(holes, dtype=float).reshape(len(holes), dim)


def _check_id(p: int, n: int, pointer: str) -> None:
    if not 0 <= p < n:
        raise SchemaError(pointer, f"point id {p} outside 0..{n - 1}")


def _edges(doc: RelationDoc, n: int, pointer: str) -> np.ndarray:
    if doc.kind != "edges":
        raise SchemaError(f"{pointer}/kind", f"unknown relation kind {doc.kind!r}")
    if doc.edges is None:
        raise SchemaError(f"{pointer}/edges", "edge list missing")
    out = np.zeros((n, n), dtype=bool)
    for k, (u, v) in enumerate(doc.edges):
        _check_id(u, n, f"{pointer}/edges/{k}/0")
        _check_id(v, n, f"{pointer}/edges/{k}/1")
        out[u, v] = True
    return out


def _cells(rows: list[list[Cell]], shape: tuple[int, int], pointer: str) -> np.ndarray:
    if len(rows) != shape[0]:
        raise SchemaError(pointer, f"expected {shape[0]} rows, got {len(rows)}")
    out = np.empty(shape)
    for i, row in enumerate(rows):
        if len(row) != shape[1]:
            raise SchemaError(f"{pointer}/{i}", f"expected {shape[1]} entries, got {len(row)}")
        for j, cell in enumerate(row):
            if isinstance(cell, str):
                if cell != INF_TOKEN:
                    raise SchemaError(f"{pointer}/{i}/{j}", f"expected a number or {INF_TOKEN!r}, got {cell!r}")
                out[i, j] = np.inf
            elif cell < 0 or np.isnan(cell):
                raise SchemaError(f"{pointer}/{i}/{j}", f"value {cell} must be nonnegative")
            else:
                out[i, j] = cell
    return out


def _matrix(doc: MatrixDoc, n: int, pointer: str) -> np.ndarray:
    if doc.kind != "matrix":
        raise SchemaError(f"{pointer}/kind", f"unknown matrix kind {doc.kind!r}")
    if doc.values is None:
        raise SchemaError(f"{pointer}/values", "matrix values missing")
    return _cells(doc.values, (n, n), f"{pointer}/values")


def _atlas(doc: AtlasDoc, space: SpaceDescription) -> LocalisingAtlas:
    if doc.kind == "balls":
        if doc.radius is None:
            raise SchemaError("/atlas/radius", "a ball atlas needs a radius")
        return ball_atlas(space, doc.radius, doc.regular)
    if doc.members is None or doc.omega is None:
        raise SchemaError("/atlas", "an explicit atlas needs members and omega")
    if len(doc.members) != space.n or len(doc.omega) != space.n:
        raise SchemaError("/atlas/members", f"expected {space.n} neighbourhoods")
    omega = []
    for x, (members, rows) in enumerate(zip(doc.members, doc.omega)):
        for j, p in enumerate(members):
            _check_id(p, space.n, f"/atlas/members/{x}/{j}")
        omega.append(_cells(rows, (len(members), len(members)), f"/atlas/omega/{x}"))
    try:
        return LocalisingAtlas(
            members=tuple(np.array(m, dtype=np.int64) for m in doc.members),
            omega=tuple(omega),
            regular=doc.regular,
            kind="explicit",
            radius=doc.radius,
        )
    except StructuralError as e:
        raise SchemaError("/atlas", str(e)) from None


def _pointer(error: ValidationError) -> tuple[str, str]:
    first = error.errors()[0]
    return "/" + "/".join(str(part) for part in first["loc"]), first["msg"]


def parse_space(data: dict | str) -> SpaceDescription:
    """Validate a document (parsed or raw JSON) and build its space."""
    try:
        if isinstance(data, str):
            doc = SpaceDocument.model_validate_json(data)
        else:
            doc = SpaceDocument.model_validate(data)
    except ValidationError as e:
        raise SchemaError(*_pointer(e)) from None
    return doc.to_space()


def dump_space(space: SpaceDescription) -> str:
    return SpaceDocument.from_space(space).model_dump_json(exclude_none=True)


def load_space(path: str | Path) -> SpaceDescription:
    """Read a space document; SchemaError carries the offending JSON pointer."""
    path = Path(path)
    with open(path, "r") as f:
        text = f.read()
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("", f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    space = parse_space(text)
    log.debug("loaded %s (%d points) from %s", space.name, space.n, path)
    return space


def save_space(space: SpaceDescription, path: str | Path) -> None:
    with open(path, "w") as f:
        f.write(dump_space(space))
