"""Auditing supplied extensions ι: X → X̃ of Lorentzian length spaces.

Covers the five extension clauses, τ-monotonicity under ι, the future and
past boundary of the image, and the consistency cross-check against the
inextendibility theorem's hypotheses.
"""

import logging
from dataclasses import dataclass
from typing import Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel

from .Axioms import check_causality_ladder, check_regular
from .Config import DEFAULT_BUDGET, DEFAULT_TOLERANCES, Budget, Tolerances
from .Curvature import BranchingWitness, check_curvature_bound, detect_branching
from .Curves import CausalCurve, TCWitness, check_TC, classify_curve, saturate_chain, tau_length
from .Errors import RegionRejectedError, StructuralError
from .Reports import AxiomReport, Report, Verdict
from .Space import SpaceDescription, ball

log = logging.getLogger(__name__)

CLAUSES = ("connected", "isometry", "open-image", "relations", "curves")
HYPOTHESES = ("base_strongly_causal", "base_tc", "ambient_regular", "ambient_bounded_above")
DEFAULT_K_GRID = (0.0, -1.0, 1.0)


def _labels(space: SpaceDescription, ids) -> list[str]:
    return [space.label(int(i)) for i in ids]


@dataclass(frozen=True, eq=False)
class ExtensionCandidate:
    """A base space, an ambient space and an injective embedding of carrier ids."""

    base: SpaceDescription
    ambient: SpaceDescription
    embedding: np.ndarray

    def __post_init__(self) -> None:
        e = np.array(self.embedding, dtype=np.int64)
        e.setflags(write=False)
        object.__setattr__(self, "embedding", e)
        if e.shape != (self.base.n,):
            raise StructuralError(f"embedding must map all {self.base.n} base points, got {e.shape}")
        if len(e) and (e.min() < 0 or e.max() >= self.ambient.n):
            raise StructuralError("embedding leaves the ambient carrier")
        values, counts = np.unique(e, return_counts=True)
        if (counts > 1).any():
            clash = int(values[counts > 1][0])
            raise StructuralError(f"embedding is not injective: {np.flatnonzero(e == clash).tolist()} ↦ {clash}")

    @property
    def image(self) -> np.ndarray:
        mask = np.zeros(self.ambient.n, dtype=bool)
        mask[self.embedding] = True
        return mask

    def pulled_back(self, matrix: np.ndarray) -> np.ndarray:
        """Ambient matrix restricted to the image, indexed by base ids."""
        return matrix[np.ix_(self.embedding, self.embedding)]

    def map_chain(self, chain) -> list[int]:
        return [int(self.embedding[p]) for p in chain]


def inclusion_map(base: SpaceDescription, ambient: SpaceDescription, tol: float = 1e-9) -> np.ndarray:
    """Embedding that matches coordinates, padding base points with zeros."""
    if base.coords is None or ambient.coords is None:
        raise StructuralError("inclusion needs coordinates on both spaces")
    pad = ambient.coords.shape[1] - base.coords.shape[1]
    if pad < 0:
        raise StructuralError("base has more coordinates than the ambient space")
    coords = np.hstack([base.coords, np.zeros((base.n, pad))])
    out = np.empty(base.n, dtype=np.int64)
    for i, point in enumerate(coords):
        try:
            out[i] = ambient.index_of(point, tol)
        except KeyError as e:
            raise StructuralError(f"base point {base.label(i)} has no ambient counterpart") from e
    return out


class ExtensionReport(AxiomReport):
    base: str
    ambient: str


class BoundaryReport(Report):
    base: str
    ambient: str
    future: list[int]
    past: list[int]
    future_curves: dict[int, list[int]]
    past_curves: dict[int, list[int]]
    lemma_violation: bool

    @property
    def ok(self) -> bool:
        return not self.lemma_violation

    def summary(self) -> str:
        if self.lemma_violation:
            return f"boundary of {self.base} in {self.ambient}: EMPTY (lemma violation)"
        return f"boundary of {self.base} in {self.ambient}: {len(self.future)} future, {len(self.past)} past"


class Hypothesis(BaseModel):
    holds: bool
    source: Literal["checked", "assumed"] = "checked"
    detail: str | None = None


class ConsistencyReport(Report):
    base: str
    ambient: str
    hypotheses: dict[str, Hypothesis]
    inconsistency: bool
    failing: list[str]
    tc_witness: TCWitness | None = None
    ambient_branching: list[BranchingWitness] = []
    weak_regularity: bool = False

    @property
    def ok(self) -> bool:
        return not self.inconsistency

    def summary(self) -> str:
        if self.inconsistency:
            return f"{self.base} → {self.ambient}: INCONSISTENCY, every theorem hypothesis holds"
        return f"{self.base} → {self.ambient}: consistent, failing hypotheses {self.failing}"


# clauses


def _connected(ambient: SpaceDescription) -> Verdict:
    name = CLAUSES[0]
    if ambient.resolution is None:
        return Verdict.not_checkable(name, "ambient space declares no resolution")
    eps = 2 * ambient.resolution
    graph = nx.Graph()
    graph.add_nodes_from(range(ambient.n))
    near = np.triu(ambient.metric <= eps * (1 + 1e-9), k=1)
    graph.add_edges_from((int(u), int(v)) for u, v in np.argwhere(near))
    if ambient.n == 0 or nx.is_connected(graph):
        return Verdict.passed(name, f"ε-chain connected at ε = {eps:g}")
    reached = nx.node_connected_component(graph, 0)
    stray = min(set(range(ambient.n)) - reached)
    return Verdict.failed(name, [0, stray], f"no ε-chain at ε = {eps:g}", _labels(ambient, [0, stray]))


def _isometry(cand: ExtensionCandidate, tol: Tolerances) -> Verdict:
    name = CLAUSES[1]
    d = cand.base.metric
    d_tilde = cand.pulled_back(cand.ambient.metric)
    bad = np.argwhere(~tol.close(d, d_tilde))
    if len(bad) == 0:
        return Verdict.passed(name)
    x, y = (int(v) for v in bad[0])
    return Verdict.failed(
        name, [x, y], f"d = {d[x, y]:.12g} but d̃ = {d_tilde[x, y]:.12g}", _labels(cand.base, [x, y])
    )


def _at_edge(base: SpaceDescription, radius: float) -> np.ndarray:
    """Base points at the sample frame or within `radius` of an excised point."""
    edge = np.zeros(base.n, dtype=bool) if base.frame is None else base.frame.copy()
    if base.holes is not None and len(base.holes) and base.coords is not None:
        gap = np.linalg.norm(base.coords[:, None, :] - base.holes[None, :, :], axis=-1)
        edge |= (gap <= radius * (1 + 1e-9)).any(axis=1)
    return edge


def _open_image(cand: ExtensionCandidate) -> Verdict:
    """ι(X) is a proper subset and the smallest ambient basis member with two
    points lies inside it around every interior image point.

    Image points at the frame of X or next to its holes are left unresolved.
    """
    name = CLAUSES[2]
    image = cand.image
    if image.all():
        return Verdict.failed(name, [], "ι(X) is all of X̃")
    ambient = cand.ambient
    if ambient.basis is None:
        return Verdict.not_checkable(name, "ambient space has no neighbourhood basis")
    edge = _at_edge(cand.base, ambient.resolution or cand.base.resolution or 0.0)
    resolved = unresolved = 0
    for x, p in enumerate(cand.embedding):
        members = [U for U in ambient.basis[p] if len(U) >= 2]
        if not members:
            continue
        U = members[0]
        if image[U].all():
            resolved += 1
            continue
        if edge[x]:
            unresolved += 1
            continue
        q = int(U[~image[U]][0])
        return Verdict.failed(
            name,
            [x, q],
            f"ambient point {ambient.label(q)} next to ι({cand.base.label(x)}) lies outside the image",
            _labels(cand.base, [x]),
        )
    if resolved == 0:
        return Verdict.not_checkable(name, "ambient basis too coarse to witness openness")
    return Verdict.passed(
        name,
        f"{int(image.sum())} of {ambient.n} ambient points in the image, {unresolved} at the edge of X",
    )


def _relations(cand: ExtensionCandidate) -> Verdict:
    name = CLAUSES[3]
    for label, mine, theirs in (
        ("≤", cand.base.causal, cand.ambient.causal),
        ("≪", cand.base.chron, cand.ambient.chron),
    ):
        bad = np.argwhere(mine & ~cand.pulled_back(theirs))
        if len(bad):
            x, y = (int(v) for v in bad[0])
            return Verdict.failed(name, [x, y], f"x {label} y but ι x {label}̸ ι y", _labels(cand.base, [x, y]))
    return Verdict.passed(name)


def curve_suite(space: SpaceDescription, budget: Budget = DEFAULT_BUDGET) -> list[list[int]]:
    """Maximal chains between related pairs, then seeded random timelike chains."""
    suite = []
    for x, y in np.argwhere(space.causal & ~np.eye(space.n, dtype=bool)):
        chain = space.paths.chain(int(x), int(y))
        if len(chain) >= 2:
            suite.append(chain)
        if len(suite) >= budget.max_chains:
            break
    rng = np.random.default_rng(budget.seed)
    for _ in range(budget.random_chains):
        chain = [int(rng.integers(space.n))]
        for _ in range(budget.random_chain_length - 1):
            successors = np.flatnonzero(space.chron_steps[chain[-1]])
            if len(successors) == 0:
                break
            chain.append(int(rng.choice(successors)))
        if len(chain) >= 2:
            suite.append(chain)
    return suite


def _curves(cand: ExtensionCandidate, budget: Budget, tol: Tolerances) -> Verdict:
    name = CLAUSES[4]
    tau, tau_tilde = cand.base.tau, cand.pulled_back(cand.ambient.tau)
    one_step = np.argwhere(cand.base.steps & ~tol.close(tau, tau_tilde))
    if len(one_step):
        x, y = (int(v) for v in one_step[0])
        return Verdict.failed(
            name, [x, y], f"L_τ = {tau[x, y]:.12g} but L_τ̃ = {tau_tilde[x, y]:.12g}", _labels(cand.base, [x, y])
        )
    suite = curve_suite(cand.base, budget)
    for chain in suite:
        mine = CausalCurve.of(chain)
        theirs = CausalCurve.of(cand.map_chain(chain))
        kind, kind_tilde = classify_curve(cand.base, mine).kind, classify_curve(cand.ambient, theirs).kind
        if kind != kind_tilde:
            return Verdict.failed(name, chain, f"{kind} in X but {kind_tilde} in X̃", _labels(cand.base, chain))
        if kind == "invalid":
            continue
        length = tau_length(cand.base, mine).value
        length_tilde = tau_length(cand.ambient, theirs).value
        if not tol.close(length.value, length_tilde.value):
            return Verdict.failed(
                name,
                chain,
                f"L_τ = {length.to_json()} but L_τ̃ = {length_tilde.to_json()}",
                _labels(cand.base, chain),
            )
    return Verdict.passed(name, f"{len(suite)} curves and every one-step chain agree")


def check_extension(
    cand: ExtensionCandidate,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ExtensionReport:
    """Clauses (i)–(v) of an extension, in order."""
    verdicts = [
        _connected(cand.ambient),
        _isometry(cand, tol),
        _open_image(cand),
        _relations(cand),
        _curves(cand, budget, tol),
    ]
    for v in verdicts:
        log.debug("extension clause %s: %s", v.name, v.status)
    report = ExtensionReport(
        check="extension",
        space=f"{cand.base.name} → {cand.ambient.name}",
        base=cand.base.name,
        ambient=cand.ambient.name,
        verdicts=verdicts,
        tolerances=tol,
    )
    log.info(report.summary())
    return report


def check_tau_monotone(cand: ExtensionCandidate, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """τ̃(ι x, ι y) ≥ τ(x, y) on every base pair."""
    name = "tau-monotone"
    tau, tau_tilde = cand.base.tau, cand.pulled_back(cand.ambient.tau)
    bad = np.argwhere(tol.definitely_less(tau_tilde, tau))
    if len(bad) == 0:
        return Verdict.passed(name)
    x, y = (int(v) for v in bad[0])
    return Verdict.failed(
        name, [x, y], f"τ = {tau[x, y]:.12g} > τ̃ = {tau_tilde[x, y]:.12g}", _labels(cand.base, [x, y])
    )


# boundary


def _reaching_chain(cand: ExtensionCandidate, b: int, future: bool, tol: Tolerances) -> list[int] | None:
    """A timelike chain inside the image except for its endpoint b."""
    ambient = cand.ambient
    image = cand.image
    steps = ambient.chron_steps[:, b] if future else ambient.chron_steps[b]
    candidates = np.flatnonzero(steps & image)
    if ambient.resolution is not None:
        candidates = candidates[ambient.metric[candidates, b] <= 2 * ambient.resolution * (1 + 1e-9)]
    for a in sorted(candidates, key=lambda a: (ambient.metric[a, b], a)):
        chain = [int(a), b] if future else [b, int(a)]
        chain = saturate_chain(ambient, chain, tol)
        inside = chain[:-1] if future else chain[1:]
        if image[inside].all():
            return chain
    return None


def compute_boundary(cand: ExtensionCandidate, tol: Tolerances = DEFAULT_TOLERANCES) -> BoundaryReport:
    """∂⁺ and ∂⁻ of ι(X) in X̃ with one reaching chain per point."""
    future: dict[int, list[int]] = {}
    past: dict[int, list[int]] = {}
    for b in np.flatnonzero(~cand.image):
        b = int(b)
        chain = _reaching_chain(cand, b, True, tol)
        if chain is not None:
            future[b] = chain
        chain = _reaching_chain(cand, b, False, tol)
        if chain is not None:
            past[b] = chain
    report = BoundaryReport(
        base=cand.base.name,
        ambient=cand.ambient.name,
        future=sorted(future),
        past=sorted(past),
        future_curves=future,
        past_curves=past,
        lemma_violation=not future and not past,
        tolerances=tol,
    )
    if report.lemma_violation:
        log.warning(report.summary())
    else:
        log.info(report.summary())
    return report


# theorem cross-check


def _comparison_region(cand: ExtensionCandidate, boundary: BoundaryReport) -> np.ndarray:
    ambient = cand.ambient
    points = boundary.future + boundary.past
    if not points:
        return np.arange(min(ambient.n, 16))
    radius = 2 * ambient.resolution if ambient.resolution is not None else 1.0
    return ball(ambient.metric, min(points), radius)


def cross_check_inextendibility(
    cand: ExtensionCandidate,
    budget: Budget = DEFAULT_BUDGET,
    tol: Tolerances = DEFAULT_TOLERANCES,
    K_grid=DEFAULT_K_GRID,
    assume: dict[str, bool] | None = None,
    weak_regularity: bool = False,
) -> ConsistencyReport:
    """Evaluate the inextendibility theorem's hypotheses on a candidate.

    All of them holding alongside an extension is reported as an inconsistency.
    """
    assume = dict(assume or {})
    unknown = set(assume) - set(HYPOTHESES)
    if unknown:
        raise StructuralError(f"unknown hypotheses {sorted(unknown)}; expected {list(HYPOTHESES)}")
    hypotheses: dict[str, Hypothesis] = {}
    boundary = compute_boundary(cand, tol)

    def evaluate(name: str, check) -> None:
        if name in assume:
            hypotheses[name] = Hypothesis(holds=assume[name], source="assumed")
        else:
            holds, detail = check()
            hypotheses[name] = Hypothesis(holds=holds, detail=detail)

    def strongly_causal():
        verdict = check_causality_ladder(cand.base, tol).verdict("strong-causality")
        return verdict.status == "pass", verdict.detail

    tc_report = None

    def tc():
        nonlocal tc_report
        tc_report = check_TC(cand.base, budget, tol)
        return tc_report.holds_within_budget, tc_report.summary()

    def regular():
        points = boundary.future + boundary.past if weak_regularity else None
        verdict = check_regular(cand.ambient, points, tol)
        return verdict.status == "pass", verdict.detail

    region = _comparison_region(cand, boundary)

    def bounded_above():
        for K in K_grid:
            try:
                verdict = check_curvature_bound(cand.ambient, region, K, "bounded_above", budget=budget, tol=tol)
            except RegionRejectedError as e:
                return False, str(e)
            if verdict.status == "pass":
                return True, f"bounded above by K = {K:g} near the boundary"
        return False, f"no upper bound in K ∈ {list(K_grid)}"

    evaluate("base_strongly_causal", strongly_causal)
    evaluate("base_tc", tc)
    evaluate("ambient_regular", regular)
    evaluate("ambient_bounded_above", bounded_above)
    failing = [name for name in HYPOTHESES if not hypotheses[name].holds]
    report = ConsistencyReport(
        base=cand.base.name,
        ambient=cand.ambient.name,
        hypotheses=hypotheses,
        inconsistency=not failing,
        failing=failing,
        tc_witness=None if tc_report is None else tc_report.witness,
        ambient_branching=detect_branching(cand.ambient, region, budget, tol),
        weak_regularity=weak_regularity,
        tolerances=tol,
    )
    if report.inconsistency:
        log.error(report.summary())
    else:
        log.info(report.summary())
    return report
