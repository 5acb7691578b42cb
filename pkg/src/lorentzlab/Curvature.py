"""Causal curvature bounds by triangle comparison, branching of maximal
chains, and the curvature-singularity sweep.

Bounded below by K means τ(p, q) ≤ τ̄(p̄, q̄) for corresponding points of
every admissible triangle in the region; bounded above means ≥.
"""

import logging
from itertools import combinations, islice
from typing import Iterator, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from .Config import DEFAULT_BUDGET, DEFAULT_TOLERANCES, Budget, Tolerances
from .Curves import find_maximal_curve, saturate_chain
from .Errors import InfeasibleTriangleError, NotAdmissibleError, RegionRejectedError
from .ExtReal import ExtReal
from .Models import (
    ComparisonTriangle,
    ModelKind,
    ModelSpace,
    SideName,
    TriangleSides,
    check_size_bounds,
    corresponding_point,
    model_tau_array,
    realize_triangle,
)
from .Reports import Report
from .Shooting import ensure_model_validated
from .Space import SpaceDescription

log = logging.getLogger(__name__)

Direction = Literal["bounded_below", "bounded_above"]
DIRECTIONS: tuple[Direction, ...] = ("bounded_below", "bounded_above")
FRACTIONS = 11
SIDES: tuple[SideName, ...] = ("xy", "yz", "xz")


class AdmissibleTriangle(BaseModel):
    """x ≪ y ≤ z or x ≤ y ≪ z with finite τ(x, z) and realized sides."""

    model_config = ConfigDict(frozen=True)

    vertices: tuple[int, int, int]
    sides: dict[SideName, list[int]]
    side_lengths: TriangleSides

    def chain(self, side: SideName) -> list[int]:
        return self.sides[side]


class CurvatureWitness(BaseModel):
    triangle: tuple[int, int, int]
    p: int
    q: int
    p_side: SideName
    q_side: SideName
    p_bar: tuple[float, float]
    q_bar: tuple[float, float]
    tau: ExtReal
    tau_bar: ExtReal
    labels: list[str] | None = None


class CurvatureVerdict(Report):
    space: str
    region: list[int]
    direction: Direction
    K: float
    status: Literal["pass", "fail", "vacuous"]
    witness: CurvatureWitness | None = None
    timelike_only: bool = False
    triangles_checked: int = 0
    triangles_skipped: int = 0
    pairs_compared: int = 0
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def summary(self) -> str:
        line = f"curvature {self.direction} K={self.K:g} on {self.space}: {self.status}"
        if self.witness is not None:
            w = self.witness
            line += f" (τ = {w.tau.to_json()}, τ̄ = {w.tau_bar.to_json()})"
        if self.truncated:
            line += " [triangle budget reached]"
        return line


class BranchingWitness(BaseModel):
    point: int
    start: int
    ends: tuple[int, int]
    chains: tuple[list[int], list[int]]
    label: str | None = None


class SingularityReport(Report):
    space: str
    region: list[int]
    K_grid: list[float]
    branching_witnesses: list[BranchingWitness]
    sweep_results: list[CurvatureVerdict]
    unbounded_below: bool
    no_bound_found_in_sweep: bool = False

    def summary(self) -> str:
        if self.unbounded_below:
            w = self.branching_witnesses[0]
            return f"{self.space}: curvature unbounded below, branching at {w.label or w.point}"
        if self.no_bound_found_in_sweep:
            return f"{self.space}: no lower bound found in sweep {self.K_grid}"
        return f"{self.space}: no singularity detected over K in {self.K_grid}"


# triangles


def _check_region(space: SpaceDescription, region: list[int]) -> None:
    for x in region:
        for y in region:
            if x == y or not space.causal[x, y]:
                continue
            if np.isinf(space.tau[x, y]):
                raise RegionRejectedError((x, y), "τ = ∞ on the pair")
            if not space.paths.chain(x, y):
                raise RegionRejectedError((x, y), "no maximal chain between the pair")


def _admissible(space: SpaceDescription, x: int, y: int, z: int, timelike_only: bool) -> bool:
    if x == z:
        return False
    if timelike_only:
        return bool(space.chron[x, y] and space.chron[y, z] and space.chron[x, z])
    return bool(
        (space.chron[x, y] and (y == z or space.causal[y, z]))
        or ((x == y or space.causal[x, y]) and space.chron[y, z])
    )


def _triangles(
    space: SpaceDescription, region: list[int], timelike_only: bool, tol: Tolerances
) -> Iterator[AdmissibleTriangle]:
    for x in region:
        for y in region:
            for z in region:
                if not _admissible(space, x, y, z, timelike_only):
                    continue
                sides = {}
                for name, (u, v) in zip(SIDES, ((x, y), (y, z), (x, z))):
                    sides[name] = [u] if u == v else list(find_maximal_curve(space, u, v, tol=tol).points)
                yield AdmissibleTriangle(
                    vertices=(x, y, z),
                    sides=sides,
                    side_lengths=TriangleSides(
                        a=float(space.tau[x, y]),
                        b=float(space.tau[y, z]),
                        c=float(space.tau[x, z]),
                    ),
                )


def _enumerate(
    space: SpaceDescription, region, timelike_only: bool, budget: Budget, tol: Tolerances
) -> tuple[list[AdmissibleTriangle], bool]:
    region = sorted(int(p) for p in dict.fromkeys(region))
    _check_region(space, region)
    found = _triangles(space, region, timelike_only, tol)
    out = list(islice(found, budget.max_triangles))
    truncated = next(found, None) is not None
    if truncated:
        log.warning("triangle budget %d reached after %s", budget.max_triangles, out[-1].vertices)
    return out, truncated


def enumerate_triangles(
    space: SpaceDescription,
    region,
    timelike_only: bool = False,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[AdmissibleTriangle]:
    """Admissible triples of the region in lexicographic order, sides realized."""
    return _enumerate(space, region, timelike_only, budget, tol)[0]


# comparison


def _side_samples(
    space: SpaceDescription,
    triangle: AdmissibleTriangle,
    comparison: ComparisonTriangle,
    side: SideName,
    fractions: int,
) -> list[tuple[int, np.ndarray]]:
    """Chain points nearest the fraction grid, with their model counterparts."""
    if comparison.side(side).causal_type != "timelike":
        return []
    chain = triangle.chain(side)
    length = {"xy": triangle.side_lengths.a, "yz": triangle.side_lengths.b, "xz": triangle.side_lengths.c}[side]
    steps = [space.tau[u, v] for u, v in zip(chain, chain[1:])]
    s = np.minimum(np.concatenate([[0.0], np.cumsum(steps)]) / length, 1.0)
    picks = dict.fromkeys(int(np.argmin(np.abs(s - g))) for g in np.linspace(0.0, 1.0, fractions))
    return [(chain[i], corresponding_point(comparison, side, float(s[i])).array()) for i in picks]


def _violates(tau: float, tau_bar: float, direction: Direction, tol: Tolerances) -> bool:
    if np.isinf(tau) and np.isinf(tau_bar):
        return False
    slack = tol.comparison + tol.relative * (0.0 if np.isinf(tau_bar) else abs(tau_bar))
    if direction == "bounded_below":
        return bool(tau - tau_bar > slack)
    return bool(tau_bar - tau > slack)


def _compare(
    space: SpaceDescription,
    triangle: AdmissibleTriangle,
    comparison: ComparisonTriangle,
    direction: Direction,
    fractions: int,
    tol: Tolerances,
) -> tuple[CurvatureWitness | None, int]:
    model = comparison.model
    samples = {side: _side_samples(space, triangle, comparison, side, fractions) for side in SIDES}
    rows = [(side, p, bar) for side in SIDES for p, bar in samples[side]]
    if not rows:
        return None, 0
    P = np.array([bar for _, _, bar in rows])
    bars = model_tau_array(model, P[:, None, :], P[None, :, :])
    ids = [p for _, p, _ in rows]
    taus = space.tau[np.ix_(ids, ids)]
    compared = 0
    for i, (p_side, p, p_bar) in enumerate(rows):
        for j, (q_side, q, q_bar) in enumerate(rows):
            if p == q:
                continue
            compared += 1
            if _violates(taus[i, j], bars[i, j], direction, tol):
                witness = CurvatureWitness(
                    triangle=triangle.vertices,
                    p=p,
                    q=q,
                    p_side=p_side,
                    q_side=q_side,
                    p_bar=(float(p_bar[0]), float(p_bar[1])),
                    q_bar=(float(q_bar[0]), float(q_bar[1])),
                    tau=ExtReal(float(taus[i, j])),
                    tau_bar=ExtReal(float(bars[i, j])),
                    labels=[space.label(p), space.label(q)],
                )
                return witness, compared
    return None, compared


def check_curvature_bound(
    space: SpaceDescription,
    region,
    K: float,
    direction: Direction = "bounded_below",
    timelike_only: bool = False,
    fractions: int = FRACTIONS,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CurvatureVerdict:
    model = ModelSpace.of(K)
    if model.kind is not ModelKind.MINKOWSKI:
        ensure_model_validated(model)
    triangles, truncated = _enumerate(space, region, timelike_only, budget, tol)
    verdict = dict(
        space=space.name,
        region=sorted(int(p) for p in dict.fromkeys(region)),
        direction=direction,
        K=K,
        timelike_only=timelike_only,
        truncated=truncated,
        tolerances=tol,
    )
    checked = skipped = compared = 0
    for triangle in triangles:
        try:
            if not check_size_bounds(triangle.side_lengths, K, tol):
                skipped += 1
                continue
        except NotAdmissibleError as e:
            log.warning("skipping triangle %s: %s", triangle.vertices, e)
            skipped += 1
            continue
        try:
            comparison = realize_triangle(model, triangle.side_lengths, tol)
        except InfeasibleTriangleError as e:
            log.warning("skipping triangle %s: %s", triangle.vertices, e)
            skipped += 1
            continue
        witness, n = _compare(space, triangle, comparison, direction, fractions, tol)
        checked += 1
        compared += n
        if witness is not None:
            result = CurvatureVerdict(
                status="fail",
                witness=witness,
                triangles_checked=checked,
                triangles_skipped=skipped,
                pairs_compared=compared,
                **verdict,
            )
            log.info(result.summary())
            return result
    result = CurvatureVerdict(
        status="pass" if checked else "vacuous",
        triangles_checked=checked,
        triangles_skipped=skipped,
        pairs_compared=compared,
        **verdict,
    )
    log.info(result.summary())
    return result


# branching


def _prefix_end(a: list[int], b: list[int]) -> int:
    """Index of the last point shared by the common prefix of two chains."""
    k = 0
    while k + 1 < min(len(a), len(b)) and a[k + 1] == b[k + 1]:
        k += 1
    return k


def _beyond(space: SpaceDescription, x: int, u: int, v: int, tol: Tolerances) -> bool:
    """v continues a maximizer x → u τ-additively."""
    return bool(space.causal[u, v] and tol.close(space.tau[x, u] + space.tau[u, v], space.tau[x, v]))


def detect_branching(
    space: SpaceDescription,
    region,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> list[BranchingWitness]:
    """Points where two maximal chains agree up to w and then separate."""
    region = sorted(int(p) for p in dict.fromkeys(region))
    found: dict[tuple, BranchingWitness] = {}

    def record(w: int, x: int, ends: tuple[int, int], a: list[int], b: list[int]) -> None:
        key = (w, x, ends)
        if key not in found:
            found[key] = BranchingWitness(point=w, start=x, ends=ends, chains=(a, b), label=space.label(w))

    chains: dict[tuple[int, int], list[int]] = {}
    for x in region:
        for y in region:
            if x != y and space.causal[x, y] and space.paths.chain(x, y):
                chains[x, y] = list(find_maximal_curve(space, x, y, tol=tol).points)

    # distinct maximizers between the same endpoints
    for (x, y), first in chains.items():
        distinct = {tuple(first)}
        for raw in space.paths.maximizers(x, y, limit=8):
            distinct.add(tuple(saturate_chain(space, raw, tol)))
        if len(distinct) > 1:
            a, b = sorted(distinct)[:2]
            k = _prefix_end(list(a), list(b))
            record(a[k], x, (y, y), list(a), list(b))

    # a common start with two futures that are not on one maximizer
    for x in region:
        for v1, v2 in combinations(region, 2):
            if (x, v1) not in chains or (x, v2) not in chains:
                continue
            a, b = chains[x, v1], chains[x, v2]
            k = _prefix_end(a, b)
            if k == 0 or k + 1 >= len(a) or k + 1 >= len(b):
                continue
            if _beyond(space, x, v1, v2, tol) or _beyond(space, x, v2, v1, tol):
                continue
            record(a[k], x, (v1, v2), a, b)
        if len(found) >= budget.max_witnesses:
            break
    witnesses = sorted(found.values(), key=lambda w: (w.point, w.start, w.ends))
    log.debug("%d branching witnesses in %s", len(witnesses), space.name)
    return witnesses[: budget.max_witnesses]


def singularity_sweep(
    space: SpaceDescription,
    region,
    K_grid,
    timelike_only: bool = False,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> SingularityReport:
    """Both-direction verdicts for every K plus branching detection."""
    K_grid = [float(K) for K in K_grid]
    results = [
        check_curvature_bound(space, region, K, direction, timelike_only, budget=budget, tol=tol)
        for K in K_grid
        for direction in DIRECTIONS
    ]
    branching = detect_branching(space, region, budget, tol)
    below = [v for v in results if v.direction == "bounded_below"]
    report = SingularityReport(
        space=space.name,
        region=sorted(int(p) for p in dict.fromkeys(region)),
        K_grid=K_grid,
        branching_witnesses=branching,
        sweep_results=results,
        unbounded_below=bool(branching),
        no_bound_found_in_sweep=bool(below) and all(v.status == "fail" for v in below),
        tolerances=tol,
    )
    log.info(report.summary())
    return report
