"""Discrete causal curves: classification, τ-length, 𝒯, maximal curves,
geodesics, extension at a half-open end, and the (TC) witness search.

A curve is a chain of carrier ids with strictly increasing parameters. Chains
move along the space's steps; relations decide their causal character.
"""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .Config import DEFAULT_BUDGET, DEFAULT_TOLERANCES, Budget, Tolerances
from .Errors import NoCurveError, NotCheckableError, PreconditionError
from .ExtReal import ExtReal
from .LongestPath import chain_sum, longest_paths
from .Reports import Report
from .Rules import Rule
from .Space import SpaceDescription

log = logging.getLogger(__name__)

CurveKind = Literal["causal", "timelike", "null", "invalid"]
End = Literal["future", "past"]


class CausalCurve(BaseModel):
    """A finite parameterized chain of carrier points."""

    model_config = ConfigDict(frozen=True)

    points: tuple[int, ...]
    params: tuple[float, ...] = ()
    open_end: tuple[bool, bool] = (False, False)

    @model_validator(mode="after")
    def _params(self) -> "CausalCurve":
        if not self.params:
            object.__setattr__(self, "params", tuple(float(i) for i in range(len(self.points))))
        if len(self.params) != len(self.points):
            raise ValueError("params and points differ in length")
        if any(b <= a for a, b in zip(self.params, self.params[1:])):
            raise ValueError("params must be strictly increasing")
        return self

    @classmethod
    def of(cls, points, open_end: tuple[bool, bool] = (False, False)) -> "CausalCurve":
        return cls(points=tuple(int(p) for p in points), open_end=open_end)

    def __len__(self) -> int:
        return len(self.points)

    def window(self, c: int, d: int) -> list[int]:
        return list(self.points[c : d + 1])

    def with_open_end(self, future: bool | None = None, past: bool | None = None) -> "CausalCurve":
        start, stop = self.open_end
        return self.model_copy(
            update={
                "open_end": (
                    start if past is None else past,
                    stop if future is None else future,
                )
            }
        )


class CurveClass(BaseModel):
    kind: CurveKind
    witness: tuple[int, int] | None = None
    reason: str | None = None


class LengthResult(BaseModel):
    value: ExtReal
    partition_used: list[int]
    converged: bool = True
    refinements: int = 0


class FailingWindow(BaseModel):
    """Index t₀ of the curve with no window that is maximal in an atlas neighbourhood.

    `window` spans curve indices; `endpoints` are the carrier points compared,
    which may lie inside a leg once the chain is saturated.
    """

    index: int
    window: tuple[int, int]
    endpoints: tuple[int, int]
    chart: int
    curve_length: ExtReal
    witness_chain: list[int]
    witness_length: ExtReal


class GeodesicVerdict(BaseModel):
    is_geodesic: bool
    failing_window: FailingWindow | None = None

    @model_validator(mode="after")
    def _window_iff_fail(self) -> "GeodesicVerdict":
        if self.is_geodesic == (self.failing_window is not None):
            raise ValueError("failing_window must be present exactly when is_geodesic is false")
        return self


class ExtensionOutcome(BaseModel):
    end: End
    status: Literal["extended", "inextendible"]
    curve: CausalCurve
    reason: str | None = None
    leaves_sample: bool = False


class TCWitness(BaseModel):
    curve: CausalCurve
    length: ExtReal
    future: ExtensionOutcome
    past: ExtensionOutcome


class TCReport(Report):
    space: str
    holds_within_budget: bool
    witness: TCWitness | None = None
    seeds_examined: int = 0
    budget: Budget = Field(default_factory=lambda: DEFAULT_BUDGET)

    @property
    def ok(self) -> bool:
        return self.holds_within_budget

    def summary(self) -> str:
        if self.witness is None:
            return f"TC on {self.space}: holds within budget ({self.seeds_examined} seeds)"
        return f"TC on {self.space}: witness of length {self.witness.length.to_json()}"


# classification and length


def classify_curve(space: SpaceDescription, curve: CausalCurve) -> CurveClass:
    pts = np.asarray(curve.points, dtype=np.int64)
    if len(pts) < 2 or (pts == pts[0]).all():
        return CurveClass(kind="invalid", reason="constant")
    for i, (u, v) in enumerate(zip(pts, pts[1:])):
        if not space.causal[u, v]:
            return CurveClass(kind="invalid", witness=(i, i + 1), reason="consecutive points not causally related")
    upper = np.triu(np.ones((len(pts), len(pts)), dtype=bool), k=1)
    chron = space.chron[np.ix_(pts, pts)] & upper
    if chron[upper].all():
        return CurveClass(kind="timelike")
    if not chron.any():
        return CurveClass(kind="null")
    return CurveClass(kind="causal")


def _require_causal(space: SpaceDescription, curve: CausalCurve) -> CurveClass:
    kind = classify_curve(space, curve)
    if kind.kind == "invalid":
        raise PreconditionError(f"not a causal curve: {kind.reason} at {kind.witness}")
    return kind


def tau_length(space: SpaceDescription, curve: CausalCurve) -> LengthResult:
    """L_τ of a discrete chain: the consecutive-pair sum, which no partition undercuts."""
    _require_causal(space, curve)
    total = chain_sum(space.tau, list(curve.points))
    return LengthResult(value=ExtReal(total), partition_used=list(range(len(curve))))


def tau_length_along(
    rule: Rule,
    waypoints,
    tol: Tolerances = DEFAULT_TOLERANCES,
    max_refinements: int = 16,
) -> LengthResult:
    """L_τ of the chart-linear curve through `waypoints`, refining partitions until stable."""
    waypoints = np.asarray(waypoints, dtype=float)
    if len(waypoints) < 2:
        raise PreconditionError("constant curve")
    causal, _ = rule.relations(waypoints[:-1], waypoints[1:])
    if not causal.all():
        i = int(np.flatnonzero(~causal)[0])
        raise PreconditionError(f"waypoints {i} and {i + 1} are not causally related")
    previous = math.inf
    for level in range(max_refinements + 1):
        k = 2**level
        s = np.linspace(0.0, 1.0, k + 1)[:-1]
        starts = waypoints[:-1, None, :] + s[None, :, None] * (waypoints[1:] - waypoints[:-1])[:, None, :]
        pts = np.concatenate([starts.reshape(-1, waypoints.shape[1]), waypoints[-1:]])
        value = float(rule.tau(pts[:-1], pts[1:]).sum())
        if abs(previous - value) <= tol.slack(value):
            return LengthResult(
                value=ExtReal(value), partition_used=list(range(len(pts))), refinements=level
            )
        previous = value
    return LengthResult(
        value=ExtReal(previous),
        partition_used=list(range(len(pts))),
        converged=False,
        refinements=max_refinements,
    )


# 𝒯 and maximal curves


def compute_T(space: SpaceDescription, x: int, y: int) -> ExtReal:
    """Supremum of τ-lengths of causal chains x → y; 0 where none exists."""
    return ExtReal(space.paths.value(x, y))


def saturate_chain(space: SpaceDescription, chain: list[int], tol: Tolerances) -> list[int]:
    """Insert every carrier point lying τ-additively on each step of the chain."""
    out = [chain[0]]
    for a, b in zip(chain, chain[1:]):
        through = space.tau[a] + space.tau[:, b]
        on = space.steps[a] & space.steps[:, b] & tol.close(through, space.tau[a, b])
        on[[a, b]] = False
        cur = a
        for w in sorted(np.flatnonzero(on), key=lambda w: (space.tau[a, w], space.metric[a, w], w)):
            if space.steps[cur, w] and space.steps[w, b]:
                out.append(int(w))
                cur = int(w)
        out.append(b)
    return out


def find_maximal_curve(
    space: SpaceDescription,
    x: int,
    y: int,
    saturate: bool = True,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> CausalCurve:
    """The smallest-id chain realizing 𝒯(x, y)."""
    if x == y:
        raise NoCurveError("x = y: maximal curves are non-constant")
    if not space.causal[x, y]:
        raise NoCurveError(f"{space.label(x)} ≰ {space.label(y)}")
    chain = space.paths.chain(x, y)
    if not chain:
        raise NoCurveError(f"no causal chain from {space.label(x)} to {space.label(y)}")
    if saturate:
        chain = saturate_chain(space, chain, tol)
    return CausalCurve.of(chain)


def maximal_curves(space: SpaceDescription, x: int, y: int, limit: int | None = None) -> list[CausalCurve]:
    """All maximizers x → y in lexicographic order (up to `limit`)."""
    if x == y or not space.causal[x, y]:
        raise NoCurveError(f"{space.label(x)} ≰ {space.label(y)} or equal")
    return [CausalCurve.of(c) for c in space.paths.maximizers(x, y, limit)]


# geodesics


def _windows(i: int, last: int):
    """Windows [c, d] with c < i < d (or touching an end of the curve), tightest first."""
    lo = 0 if i == 0 else i - 1
    hi = last if i == last else i + 1
    spans = []
    for c in range(0, lo + 1):
        for d in range(hi, last + 1):
            if c < d:
                spans.append((d - c, c, d))
    for _, c, d in sorted(spans):
        yield c, d


def is_geodesic(space: SpaceDescription, curve: CausalCurve, tol: Tolerances = DEFAULT_TOLERANCES) -> GeodesicVerdict:
    """Local maximality in atlas neighbourhoods at every index.

    The chain is saturated first so that long legs are tested through the
    carrier points on them. A window fails only against a strictly longer
    chain of its chart.
    """
    if space.atlas is None:
        raise NotCheckableError(f"{space.name} has no localising atlas")
    _require_causal(space, curve)
    atlas = space.atlas
    pts = list(curve.points)
    refined, origin = [pts[0]], [0]
    for k in range(1, len(pts)):
        leg = saturate_chain(space, pts[k - 1 : k + 1], tol)[1:]
        refined.extend(leg)
        origin.extend([k - 1] * (len(leg) - 1) + [k])
    last = len(refined) - 1
    for i in range(len(refined)):
        maximal, covered, failure = False, False, None
        for c, d in _windows(i, last):
            window = refined[c : d + 1]
            length = chain_sum(space.tau, window)
            charts = [x for x in dict.fromkeys(window) if np.isin(window, atlas.members[x]).all()]
            if not charts:
                continue
            covered = True
            omega = [atlas.local(x, window[0], window[-1]) for x in charts]
            if not any(tol.definitely_less(length, w) for w in omega):
                maximal = True
                break
            if failure is None:
                chart = charts[int(np.argmax(omega))]
                failure = (c, d, chart, length)
        if maximal:
            continue
        if not covered:
            raise NotCheckableError(f"no chart of {space.name} contains a window at {space.label(refined[i])}")
        c, d, chart, length = failure
        chain, best = _local_witness(space, chart, refined[c], refined[d])
        index = origin[i]
        span = (origin[c], origin[d] if refined[d] == pts[origin[d]] else origin[d] + 1)
        log.debug("not a geodesic at index %d (window %s)", index, span)
        return GeodesicVerdict(
            is_geodesic=False,
            failing_window=FailingWindow(
                index=index,
                window=span,
                endpoints=(refined[c], refined[d]),
                chart=chart,
                curve_length=ExtReal(length),
                witness_chain=chain,
                witness_length=ExtReal(best),
            ),
        )
    return GeodesicVerdict(is_geodesic=True)


def _local_witness(space: SpaceDescription, chart: int, p: int, q: int) -> tuple[list[int], float]:
    m = space.atlas.members[chart]
    sub = np.ix_(m, m)
    local = longest_paths(space.steps[sub], space.tau[sub])
    i, j = int(np.searchsorted(m, p)), int(np.searchsorted(m, q))
    chain = [int(m[k]) for k in local.chain(i, j)]
    return chain, local.value(i, j)


# extension at a half-open end


def _blocked_by_hole(space: SpaceDescription, prev: int, last: int) -> bool:
    """The straight continuation beyond `last` runs into an excised point."""
    if space.holes is None or len(space.holes) == 0 or space.coords is None or space.resolution is None:
        return False
    h = space.resolution
    a = space.coords[last]
    direction = a - space.coords[prev]
    norm = np.linalg.norm(direction)
    if norm == 0:
        return False
    b = a + 1.5 * h * direction / norm
    ab = b - a
    s = np.clip(((space.holes - a) @ ab) / (ab @ ab), 0.0, 1.0)
    dist = np.linalg.norm(space.holes - (a + s[:, None] * ab), axis=1)
    return bool((dist <= h / 2 + 1e-9).any())


def extend_geodesic(
    space: SpaceDescription,
    curve: CausalCurve,
    end: End = "future",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ExtensionOutcome:
    """Attach the nearest carrier point keeping the end window maximal."""
    open_past, open_future = curve.open_end
    if (end == "future" and not open_future) or (end == "past" and not open_past):
        raise PreconditionError(f"curve is not half-open at its {end} end")
    if len(curve) < 2:
        raise PreconditionError("constant curve")
    pts = list(curve.points)
    if end == "future":
        prev, last = pts[-2], pts[-1]
        ok = (
            space.steps[last]
            & space.steps[prev]
            & tol.close(space.tau[prev, last] + space.tau[last], space.tau[prev])
        )
    else:
        prev, last = pts[1], pts[0]
        ok = (
            space.steps[:, last]
            & space.steps[:, prev]
            & tol.close(space.tau[:, last] + space.tau[last, prev], space.tau[:, prev])
        )
    ok[pts] = False
    candidates = np.flatnonzero(ok)
    if len(candidates):
        q = int(min(candidates, key=lambda q: (space.metric[last, q], q)))
        if end == "future":
            extended = curve.model_copy(
                update={"points": (*pts, q), "params": (*curve.params, curve.params[-1] + 1.0)}
            )
        else:
            extended = curve.model_copy(
                update={"points": (q, *pts), "params": (curve.params[0] - 1.0, *curve.params)}
            )
        return ExtensionOutcome(end=end, status="extended", curve=extended)
    if _blocked_by_hole(space, prev, last):
        return ExtensionOutcome(
            end=end, status="inextendible", curve=curve, reason="no limit point in carrier"
        )
    if space.frame is not None and space.frame[last]:
        if space.ambient_complete:
            return ExtensionOutcome(
                end=end,
                status="extended",
                curve=curve,
                reason="continues in the ambient space",
                leaves_sample=True,
            )
        return ExtensionOutcome(
            end=end,
            status="inextendible",
            curve=curve,
            reason="leaves the sample frame",
            leaves_sample=True,
        )
    return ExtensionOutcome(
        end=end, status="inextendible", curve=curve, reason="no maximal continuation in carrier"
    )


def extend_maximally(
    space: SpaceDescription,
    curve: CausalCurve,
    end: End,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ExtensionOutcome:
    """Extend one end until it is inextendible or leaves the sample."""
    if end == "future":
        curve = curve.with_open_end(future=True)
    else:
        curve = curve.with_open_end(past=True)
    outcome = extend_geodesic(space, curve, end, tol)
    for _ in range(budget.max_extension_steps):
        if outcome.status == "inextendible" or outcome.leaves_sample:
            return outcome
        outcome = extend_geodesic(space, outcome.curve, end, tol)
    if outcome.status == "extended" and not outcome.leaves_sample:
        return outcome.model_copy(update={"reason": "extension budget exhausted"})
    return outcome


# (TC)


def tc_seeds(space: SpaceDescription, budget: Budget) -> list[tuple[int, int]]:
    """Chronological step pairs within the seed radius, lexicographic."""
    radius = budget.seed_radius
    if radius is None:
        radius = 2 * space.resolution if space.resolution is not None else math.inf
    near = space.chron_steps & (space.metric <= radius + 1e-9)
    return [(int(x), int(y)) for x, y in np.argwhere(near)[: budget.max_seeds]]


def _counts(outcome: ExtensionOutcome, budget: Budget) -> bool:
    return outcome.status == "inextendible" and (budget.count_sample_exits or not outcome.leaves_sample)


def check_TC(
    space: SpaceDescription,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> TCReport:
    """Bounded search for a finite-length inextendible timelike geodesic."""
    space.require_atlas()
    seen: set[tuple[int, ...]] = set()
    examined = 0
    for x, y in tc_seeds(space, budget):
        examined += 1
        seed = find_maximal_curve(space, x, y, tol=tol)
        future = extend_maximally(space, seed, "future", budget, tol)
        past = extend_maximally(space, future.curve.with_open_end(future=False), "past", budget, tol)
        curve = past.curve.with_open_end(future=False, past=False)
        if curve.points in seen:
            continue
        seen.add(curve.points)
        ends = (future, past)
        if any(o.status == "extended" for o in ends):
            continue
        if not any(_counts(o, budget) for o in ends):
            continue
        if not all(o.status == "inextendible" for o in ends):
            continue
        if classify_curve(space, curve).kind != "timelike":
            continue
        length = tau_length(space, curve).value
        if length.is_inf or not is_geodesic(space, curve, tol).is_geodesic:
            continue
        witness = TCWitness(
            curve=curve,
            length=length,
            future=future.model_copy(update={"curve": curve}),
            past=past.model_copy(update={"curve": curve}),
        )
        report = TCReport(
            space=space.name,
            holds_within_budget=False,
            witness=witness,
            seeds_examined=examined,
            budget=budget,
            tolerances=tol,
        )
        log.info(report.summary())
        return report
    report = TCReport(
        space=space.name, holds_within_budget=True, seeds_examined=examined, budget=budget, tolerances=tol
    )
    log.info(report.summary())
    return report
