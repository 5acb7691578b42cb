"""Checkers for the causal-space, pre-length, ladder, closedness,
path-connectedness, localisability and length-space conditions.

Checkers never raise for axiom failures: they return verdicts whose
witnesses are the lexicographically smallest violating tuples.
"""

import logging

import networkx as nx
import numpy as np

from .Config import DEFAULT_TOLERANCES, Tolerances
from .Errors import NotADagError, NotCheckableError
from .LongestPath import NO_PATH, longest_paths, max_plus
from .Reports import AxiomReport, Verdict
from .Space import SpaceDescription, ball

log = logging.getLogger(__name__)

CLOSEDNESS_LEVELS = (4, 5, 6)
LSC_LEVELS = (3,)


def _labels(space: SpaceDescription, ids) -> list[str]:
    return [space.label(int(i)) for i in ids]


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    return None if len(hits) == 0 else tuple(int(v) for v in hits[0])


def _bool_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return (A.astype(np.float32) @ B.astype(np.float32)) > 0


# futures and pasts


def chronological_future(space: SpaceDescription, x: int) -> set[int]:
    return {int(i) for i in np.flatnonzero(space.chron[x])}


def chronological_past(space: SpaceDescription, x: int) -> set[int]:
    return {int(i) for i in np.flatnonzero(space.chron[:, x])}


def causal_future(space: SpaceDescription, x: int) -> set[int]:
    return {int(i) for i in np.flatnonzero(space.causal[x])}


def causal_past(space: SpaceDescription, x: int) -> set[int]:
    return {int(i) for i in np.flatnonzero(space.causal[:, x])}


def _open_by_rule(space: SpaceDescription, relation: np.ndarray, past: bool) -> tuple[int, int] | None:
    """Related pair (x, y) with y a limit of points outside the set at every ε level."""
    rule, coords = space.rule, space.coords
    pairs = np.argwhere(relation)
    left = np.arange(len(pairs))
    for level in CLOSEDNESS_LEVELS:
        moved = rule.perturb(coords, space.resolution / 2**level)
        keep = []
        for start in range(0, len(left), 4096):
            chunk = left[start : start + 4096]
            anchor = coords[pairs[chunk, 0]][:, None, :]
            near = moved[pairs[chunk, 1]]
            _, inside = rule.relations(near, anchor) if past else rule.relations(anchor, near)
            keep.append(chunk[~inside.all(axis=1)])
        left = np.concatenate(keep) if keep else left
        if len(left) == 0:
            return None
    x, y = pairs[left[0]]
    return int(x), int(y)


def _check_open(space: SpaceDescription, relation: np.ndarray, name: str, past: bool = False) -> Verdict:
    """Each I±(x) contains a neighbourhood of each of its points.

    With a rule this is an ε-test at the closedness levels. On bare matrices the
    smallest basis member with at least two points must lie in the set; pairs
    within one cell of the boundary stay unresolved.
    """
    if space.basis is None:
        return Verdict.not_checkable(name, "no neighbourhood basis")
    if space.rule is not None and space.coords is not None and space.resolution is not None:
        found = _open_by_rule(space, relation, past)
        if found is None:
            return Verdict.passed(name)
        x, y = found
        return Verdict.failed(
            name, [x, y], "y is a limit of points outside the set", _labels(space, [x, y])
        )
    resolved = unresolved = 0
    for y, members in enumerate(space.basis):
        candidates = [m for m in members if len(m) >= 2]
        xs = np.flatnonzero(relation[:, y])
        if not candidates or len(xs) == 0:
            continue
        # U lies in I⁺(x) iff every u ∈ U is ≪-after x
        inside = relation[np.ix_(xs, candidates[0])].all(axis=1)
        resolved += int(inside.sum())
        unresolved += int((~inside).sum())
    if resolved == 0:
        return Verdict.not_checkable(name, "basis too coarse to witness openness")
    if unresolved:
        return Verdict.passed(name, f"{unresolved} pairs within one cell of the boundary unresolved")
    return Verdict.passed(name)


# causal space


def _transitivity(R: np.ndarray) -> tuple[int, int, int] | None:
    """Smallest (x, y, z) with x R y R z but not x R z."""
    broken = _bool_product(R, R) & ~R
    first = _first(broken)
    if first is None:
        return None
    x = first[0]
    for y in np.flatnonzero(R[x]):
        zs = np.flatnonzero(R[y] & ~R[x])
        if len(zs):
            return x, int(y), int(zs[0])
    return None


def _check_metric(space: SpaceDescription, tol: Tolerances) -> Verdict:
    d = space.metric
    if space.metric_kind == "euclidean":
        return Verdict.passed("metric", "Euclidean coordinate metric")
    if (d < 0).any() or np.isinf(d).any():
        return Verdict.failed("metric", list(_first((d < 0) | np.isinf(d))), "negative or infinite distance")
    if not np.allclose(d, d.T, atol=tol.absolute):
        return Verdict.failed("metric", list(_first(~np.isclose(d, d.T, atol=tol.absolute))), "not symmetric")
    if np.abs(np.diag(d)).max(initial=0.0) > tol.absolute:
        x = int(np.argmax(np.abs(np.diag(d))))
        return Verdict.failed("metric", [x], "d(x, x) ≠ 0")
    off = ~np.eye(space.n, dtype=bool)
    if (off & (d <= tol.absolute)).any():
        return Verdict.failed("metric", list(_first(off & (d <= tol.absolute))), "distinct points at distance 0")
    for y in range(space.n):
        broken = tol.definitely_less(d[:, y, None] + d[None, y, :], d)
        if broken.any():
            x, z = _first(broken)
            return Verdict.failed("metric", [x, y, z], "triangle inequality violated")
    return Verdict.passed("metric")


def check_causal_space(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """≤ a preorder (or irreflexive if so declared), ≪ transitive, ≪ ⊆ ≤."""
    n = space.n
    verdicts = []
    diag = np.diag(space.causal)
    if space.reflexive and not diag.all():
        x = int(np.flatnonzero(~diag)[0])
        verdicts.append(Verdict.failed("reflexive", [x], "x ≤ x missing", _labels(space, [x])))
    elif not space.reflexive and diag.any():
        x = int(np.flatnonzero(diag)[0])
        verdicts.append(Verdict.failed("reflexive", [x], "x ≤ x in an irreflexive declaration", _labels(space, [x])))
    else:
        verdicts.append(Verdict.passed("reflexive"))
    for name, R in (("causal-transitive", space.causal), ("chron-transitive", space.chron)):
        witness = _transitivity(R)
        if witness is None:
            verdicts.append(Verdict.passed(name))
        else:
            verdicts.append(
                Verdict.failed(name, list(witness), "x R y R z without x R z", _labels(space, witness))
            )
    inside = space.chron & ~space.causal
    first = _first(inside)
    if first is None:
        verdicts.append(Verdict.passed("chron-in-causal"))
    else:
        verdicts.append(Verdict.failed("chron-in-causal", list(first), "x ≪ y without x ≤ y", _labels(space, first)))
    verdicts.append(_check_metric(space, tol))
    verdicts.append(_check_open(space, space.chron, "futures-open"))
    verdicts.append(_check_open(space, space.chron.T, "pasts-open", past=True))
    report = AxiomReport(check="causal-space", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info("%s (%d points)", report.summary(), n)
    return report


# pre-length space


def _reverse_triangle(space: SpaceDescription, tol: Tolerances) -> tuple[int, int, int] | None:
    best: tuple[int, int, int] | None = None
    for y in range(space.n):
        xs = np.flatnonzero(space.causal[:, y])
        zs = np.flatnonzero(space.causal[y])
        if best is not None:
            xs = xs[xs <= best[0]]
        if len(xs) == 0 or len(zs) == 0:
            continue
        with np.errstate(invalid="ignore"):
            total = space.tau[xs, y][:, None] + space.tau[y, zs][None, :]
        broken = tol.definitely_less(space.tau[np.ix_(xs, zs)], total)
        first = _first(broken)
        if first is not None:
            candidate = (int(xs[first[0]]), y, int(zs[first[1]]))
            if best is None or candidate < best:
                best = candidate
    return best


def _lsc_rule(space: SpaceDescription, tol: Tolerances) -> tuple[int, int, float] | None:
    """Finest-level perturbation minimum of τ against τ at the limit pair."""
    h = space.resolution
    allowed = 2 * space.lipschitz * h
    coords = space.coords
    pairs = np.argwhere(space.chron & np.isfinite(space.tau))
    for level in LSC_LEVELS:
        moved = space.rule.perturb(coords, h / 2**level)
        for start in range(0, len(pairs), 4096):
            block = pairs[start : start + 4096]
            P = moved[block[:, 0]][:, :, None, :]
            Q = moved[block[:, 1]][:, None, :, :]
            lowest = space.rule.tau(P, Q).reshape(len(block), -1).min(axis=1)
            limit = space.tau[block[:, 0], block[:, 1]]
            drop = limit - lowest
            bad = np.flatnonzero(drop > allowed + tol.slack(limit))
            if len(bad):
                i = bad[0]
                return int(block[i, 0]), int(block[i, 1]), float(drop[i])
    return None


def _lsc_basis(space: SpaceDescription, tol: Tolerances) -> tuple[int, int, float] | None:
    """Same test with basis neighbours at resolution in place of perturbations."""
    h = space.resolution
    allowed = 2 * space.lipschitz * h
    near = [ball(space.metric, p, h) for p in range(space.n)]
    tau = space.tau
    col_min = np.stack([tau[:, near[q]].min(axis=1) for q in range(space.n)], axis=1)
    lowest = np.stack([col_min[near[p]].min(axis=0) for p in range(space.n)], axis=0)
    drop = np.where(space.chron & np.isfinite(space.tau), space.tau - lowest, -np.inf)
    first = _first(drop > allowed + tol.slack(space.tau))
    if first is None:
        return None
    return first[0], first[1], float(drop[first])


def check_lower_semicontinuity(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """ε-liminf surrogate at resolution h with allowance 2·Lip·h; failures are flagged."""
    name = "lower-semicontinuous"
    if space.resolution is None:
        return Verdict.not_checkable(name, "no resolution declared")
    if space.rule is not None and space.coords is not None:
        found = _lsc_rule(space, tol)
    else:
        found = _lsc_basis(space, tol)
    if found is None:
        return Verdict.passed(name)
    p, q, drop = found
    return Verdict.flagged(
        name, [p, q, drop], f"τ drops by {drop:.3g} within resolution", _labels(space, [p, q])
    )


def check_prelength(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """τ vanishes off ≤, is positive exactly on ≪, and satisfies the reverse triangle inequality."""
    verdicts = []
    first = _first((space.tau > 0) & ~space.causal)
    if first is None:
        verdicts.append(Verdict.passed("tau-null"))
    else:
        verdicts.append(
            Verdict.failed("tau-null", list(first), "τ positive without x ≤ y", _labels(space, first))
        )
    first = _first((space.tau > 0) != space.chron)
    if first is None:
        verdicts.append(Verdict.passed("tau-positive"))
    else:
        x, y = first
        detail = "x ≪ y with τ = 0" if space.chron[x, y] else "τ > 0 without x ≪ y"
        verdicts.append(Verdict.failed("tau-positive", [x, y], detail, _labels(space, first)))
    witness = _reverse_triangle(space, tol)
    if witness is None:
        verdicts.append(Verdict.passed("reverse-triangle"))
    else:
        x, y, z = witness
        verdicts.append(
            Verdict.failed(
                "reverse-triangle",
                [x, y, z],
                f"τ(x,z) = {space.tau[x, z]:.12g} < τ(x,y) + τ(y,z) = {space.tau[x, y] + space.tau[y, z]:.12g}",
                _labels(space, witness),
            )
        )
    verdicts.append(check_lower_semicontinuity(space, tol))
    report = AxiomReport(check="prelength", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info(report.summary())
    return report


# causal ladder


def _closed_chain(relation: np.ndarray) -> list[int] | None:
    """A cycle of the relation through its smallest point, if any."""
    n = len(relation)
    loops = np.flatnonzero(np.diag(relation))
    if len(loops):
        return [int(loops[0])]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((int(u), int(v)) for u, v in np.argwhere(relation))
    for x in range(n):
        try:
            return [int(u) for u, _ in nx.find_cycle(graph, source=x)]
        except nx.NetworkXNoCycle:
            continue
    return None


def check_causality_ladder(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Chronology, causality and strong causality; each rung implies the one below."""
    verdicts = []
    loop = _closed_chain(space.chron)
    if loop is None:
        chronology = Verdict.passed("chronology")
    else:
        chronology = Verdict.failed("chronology", loop, "closed timelike chain", _labels(space, loop))
    verdicts.append(chronology)

    off = ~np.eye(space.n, dtype=bool)
    two_cycle = _first(space.causal & space.causal.T & off)
    causal_graph = space.causal & off
    if not chronology.ok:
        causality = Verdict.failed("causality", chronology.witness, "chronology fails", chronology.labels)
    elif two_cycle is not None:
        causality = Verdict.failed("causality", list(two_cycle), "distinct x ≤ y ≤ x", _labels(space, two_cycle))
    else:
        loop = _closed_chain(causal_graph)
        if loop is None:
            causality = Verdict.passed("causality")
        else:
            causality = Verdict.failed("causality", loop, "closed causal chain", _labels(space, loop))
    verdicts.append(causality)

    if not causality.ok:
        verdicts.append(Verdict.failed("strong-causality", causality.witness, "causality fails", causality.labels))
    elif space.basis is None:
        verdicts.append(Verdict.not_checkable("strong-causality", "no neighbourhood basis"))
    else:
        verdicts.append(_strong_causality(space))
    report = AxiomReport(check="causality-ladder", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info(report.summary())
    return report


def _strong_causality(space: SpaceDescription) -> Verdict:
    """Every U ∋ x contains a V ∋ x with all ≤-chains between points of V inside U.

    Basis members are nested and J(V) grows with V, so the smallest member with
    at least two points is the only candidate worth testing.
    """
    name = "strong-causality"
    for x, members in enumerate(space.basis):
        candidates = [m for m in members if len(m) >= 2]
        if not candidates:
            continue
        V = candidates[0]
        hull = space.causal[V].any(axis=0) & space.causal[:, V].any(axis=1)
        for level, U in enumerate(candidates):
            outside = hull.copy()
            outside[U] = False
            if outside.any():
                r = int(np.flatnonzero(outside)[0])
                return Verdict.failed(
                    name,
                    [x, level, r],
                    "a causal chain between points near x leaves the neighbourhood",
                    _labels(space, [x, r]),
                )
    return Verdict.passed(name)


# local causal closedness


def _closed_near(space: SpaceDescription, x: int, members: np.ndarray, radius: float) -> tuple[int, np.ndarray, np.ndarray] | None:
    """Unrelated pair of U (with jittered copies of x) that is a limit of related pairs."""
    rule = space.rule
    points = np.concatenate(
        [space.coords[members], rule.jitter(space.coords[[x]], radius).reshape(-1, rule.dim)]
    )
    P, Q = points[:, None, :], points[None, :, :]
    causal, _ = rule.relations(P, Q)
    unrelated = np.argwhere(~causal)
    if len(unrelated) == 0:
        return None
    limit = np.ones(len(unrelated), dtype=bool)
    for level in CLOSEDNESS_LEVELS:
        moved = rule.perturb(points, space.resolution / 2**level)
        A = moved[unrelated[:, 0]][:, :, None, :]
        B = moved[unrelated[:, 1]][:, None, :, :]
        related, _ = rule.relations(A, B)
        limit &= related.reshape(len(unrelated), -1).any(axis=1)
    if not limit.any():
        return None
    i = int(np.flatnonzero(limit)[0])
    return i, points[unrelated[i, 0]], points[unrelated[i, 1]]


def check_locally_causally_closed(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Each point has a basis neighbourhood U with ≤ closed on U × U (ε-test)."""
    name = "locally-causally-closed"
    if space.basis is None:
        verdict = Verdict.not_checkable(name, "no neighbourhood basis")
    elif space.rule is None or space.coords is None or space.resolution is None:
        verdict = Verdict.passed(name, "finite relation matrices are closed")
    else:
        verdict = Verdict.passed(name)
        radii = _basis_radii(space)
        for x, members in enumerate(space.basis):
            found = None
            for U, radius in zip(members, radii):
                if len(U) < 2:
                    continue
                found = _closed_near(space, x, U, radius)
                if found is None:
                    break
            if found is not None:
                _, p, q = found
                verdict = Verdict.failed(
                    name,
                    [x, p.tolist(), q.tolist()],
                    f"unrelated pair {p.tolist()} → {q.tolist()} is a limit of related pairs",
                    _labels(space, [x]),
                )
                break
    report = AxiomReport(check="locally-causally-closed", space=space.name, verdicts=[verdict], tolerances=tol)
    log.info(report.summary())
    return report


def _basis_radii(space: SpaceDescription) -> list[float]:
    h = space.resolution
    radii = [h / 2, h]
    depth = max(len(m) for m in space.basis)
    while len(radii) < depth:
        radii.append(radii[-1] * 2)
    return radii


# causal path-connectedness


def chronological_reach(space: SpaceDescription) -> np.ndarray:
    """Pairs joined by a chain of timelike steps (reflexive)."""
    return longest_paths(space.chron_steps, space.tau).reach


def check_causally_path_connected(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Every x ≪ y has a timelike chain, every x < y a causal chain."""
    verdicts = []
    off = ~np.eye(space.n, dtype=bool)
    try:
        reach = space.paths.reach
        treach = chronological_reach(space)
    except NotADagError as e:
        verdicts.append(Verdict.failed("causal-chains", e.cycle, "steps contain a cycle"))
        verdicts.append(Verdict.failed("timelike-chains", e.cycle, "steps contain a cycle"))
    else:
        for name, relation, joined, kind in (
            ("timelike-chains", space.chron, treach, "timelike"),
            ("causal-chains", space.causal & off, reach, "causal"),
        ):
            first = _first(relation & ~joined)
            if first is None:
                verdicts.append(Verdict.passed(name))
            else:
                verdicts.append(
                    Verdict.failed(name, list(first), f"no {kind} chain joins the pair", _labels(space, first))
                )
    report = AxiomReport(check="causally-path-connected", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info(report.summary())
    return report


# localisability


def _interior(space: SpaceDescription, members: np.ndarray) -> np.ndarray:
    inside = np.zeros(space.n, dtype=bool)
    inside[members] = True
    keep = []
    for p in members:
        if space.frame is not None and space.frame[p]:
            continue
        if space.resolution is not None and not inside[ball(space.metric, p, space.resolution)].all():
            continue
        keep.append(p)
    return np.array(keep, dtype=np.int64)


def _chart_rti(omega: np.ndarray, reach: np.ndarray, tol: Tolerances) -> tuple[int, int, int] | None:
    for y in range(len(omega)):
        xs = np.flatnonzero(reach[:, y])
        zs = np.flatnonzero(reach[y])
        broken = tol.definitely_less(omega[np.ix_(xs, zs)], omega[xs, y][:, None] + omega[y, zs][None, :])
        first = _first(broken)
        if first is not None:
            return int(xs[first[0]]), y, int(zs[first[1]])
    return None


def check_localisable(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Localisability (i)–(iv) on every atlas neighbourhood."""
    names = ("bounded-d-length", "local-prelength", "local-maximizers", "regular")
    try:
        atlas = space.require_atlas()
    except NotCheckableError as e:
        return AxiomReport(
            check="localisable",
            space=space.name,
            verdicts=[Verdict.not_checkable(name, str(e)) for name in names],
            tolerances=tol,
        )
    failures: dict[str, Verdict] = {}
    longest_d = 0.0
    for x in range(space.n):
        m, omega = atlas.chart(x)
        sub = np.ix_(m, m)
        steps = space.steps[sub]
        try:
            d_paths = longest_paths(steps, space.metric[sub])
            local = longest_paths(steps, space.tau[sub])
        except NotADagError as e:
            failures.setdefault(names[0], Verdict.failed(names[0], [x] + [int(m[i]) for i in e.cycle], "causal cycle in Ω_x"))
            continue
        longest_d = max(longest_d, float(d_paths.values[d_paths.reach].max(initial=0.0)))

        # (ii)
        if names[1] not in failures:
            bad = ~np.isfinite(omega) | (omega < 0)
            rti = _chart_rti(omega, local.reach, tol)
            if bad.any():
                i, j = _first(bad)
                failures[names[1]] = Verdict.failed(names[1], [x, int(m[i]), int(m[j])], "ω_x not finite and nonnegative")
            elif rti is not None:
                failures[names[1]] = Verdict.failed(names[1], [x] + [int(m[i]) for i in rti], "ω_x violates the reverse triangle inequality")
            else:
                chron = space.chron[sub]
                for p in _interior(space, m):
                    i = int(np.searchsorted(m, p))
                    if not chron[i].any() or not chron[:, i].any():
                        failures[names[1]] = Verdict.failed(
                            names[1], [x, int(p)], "I⁺(p) or I⁻(p) misses Ω_x", _labels(space, [x, p])
                        )
                        break

        # (iii)
        if names[2] not in failures:
            related = space.causal[sub] & ~np.eye(len(m), dtype=bool)
            recomputed = np.where(local.reach, np.maximum(local.values, 0.0), 0.0)
            missing = _first(related & ~local.reach)
            above = _first(tol.definitely_less(space.tau[sub], omega) & related)
            mismatch = _first(~tol.close(recomputed, omega) & related)
            if missing is not None:
                i, j = missing
                failures[names[2]] = Verdict.failed(names[2], [x, int(m[i]), int(m[j])], "no causal chain inside Ω_x")
            elif above is not None:
                i, j = above
                failures[names[2]] = Verdict.failed(
                    names[2], [x, int(m[i]), int(m[j])], f"ω_x = {omega[i, j]:.12g} > τ = {space.tau[m[i], m[j]]:.12g}"
                )
            elif mismatch is not None:
                i, j = mismatch
                failures[names[2]] = Verdict.failed(
                    names[2], [x, int(m[i]), int(m[j])], f"local maximizer has length {recomputed[i, j]:.12g} ≠ ω_x = {omega[i, j]:.12g}"
                )

        # (iv)
        if atlas.regular and names[3] not in failures:
            found = _irregular_pair(space, m, local, omega, tol)
            if found is not None:
                i, j, reason = found
                failures[names[3]] = Verdict.failed(names[3], [x, int(m[i]), int(m[j])], reason)

    verdicts = []
    for name in names:
        if name in failures:
            verdicts.append(failures[name])
        elif name == names[0]:
            verdicts.append(Verdict.passed(name, f"longest d-length {longest_d:.6g}"))
        elif name == names[3] and not atlas.regular:
            verdicts.append(Verdict.passed(name, "regularity not claimed"))
        else:
            verdicts.append(Verdict.passed(name))
    report = AxiomReport(check="localisable", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info(report.summary())
    return report


def _irregular_pair(space, m, local, omega, tol) -> tuple[int, int, str] | None:
    """First p ≪ q in Ω whose maximizer is not timelike or not beaten strictly by null-containing chains."""
    sub = np.ix_(m, m)
    chron = space.chron[sub]
    steps = space.steps[sub] & ~np.eye(len(m), dtype=bool)
    null_steps = steps & ~chron
    L = local.values
    via_null = max_plus(max_plus(L, np.where(null_steps, 0.0, NO_PATH)), L)
    for i, j in np.argwhere(chron):
        chain = local.chain(int(i), int(j))
        if any(not chron[u, v] for u, v in zip(chain, chain[1:])):
            return int(i), int(j), "maximizer between ≪-related points has a null step"
        if via_null[i, j] > NO_PATH and not tol.definitely_less(via_null[i, j], omega[i, j]):
            return int(i), int(j), f"a chain with a null segment reaches {via_null[i, j]:.12g} ≥ ω_x"
    return None


def check_regular(space: SpaceDescription, points=None, tol: Tolerances = DEFAULT_TOLERANCES) -> Verdict:
    """Regularity of the atlas neighbourhoods of `points` (all points by default)."""
    name = "regular"
    if space.atlas is None:
        return Verdict.not_checkable(name, "no localising atlas")
    if not space.atlas.regular:
        return Verdict.failed(name, [], "the atlas does not claim regularity")
    for x in range(space.n) if points is None else sorted(int(p) for p in points):
        m, omega = space.atlas.chart(x)
        sub = np.ix_(m, m)
        local = longest_paths(space.steps[sub], space.tau[sub])
        found = _irregular_pair(space, m, local, omega, tol)
        if found is not None:
            i, j, reason = found
            return Verdict.failed(name, [x, int(m[i]), int(m[j])], reason, _labels(space, [m[i], m[j]]))
    return Verdict.passed(name)


def check_length_space(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Closedness, path-connectedness, localisability, and τ = 𝒯 on every pair."""
    verdicts = []
    verdicts.extend(check_locally_causally_closed(space, tol).verdicts)
    verdicts.extend(check_causally_path_connected(space, tol).verdicts)
    verdicts.extend(check_localisable(space, tol).verdicts)
    try:
        paths = space.paths
    except NotADagError as e:
        verdicts.append(Verdict.failed("tau-equals-T", e.cycle, "not a DAG"))
    else:
        T = np.where(paths.reach, np.maximum(paths.values, 0.0), 0.0)
        np.fill_diagonal(T, 0.0)
        with np.errstate(invalid="ignore"):
            gap = np.where(tol.close(space.tau, T), 0.0, np.abs(space.tau - T))
        gap = np.nan_to_num(gap, nan=np.inf)
        if gap.max(initial=0.0) == 0.0:
            verdicts.append(Verdict.passed("tau-equals-T"))
        else:
            worst = _first(gap == gap.max())
            x, y = worst
            verdicts.append(
                Verdict.failed(
                    "tau-equals-T",
                    [x, y],
                    f"τ = {space.tau[x, y]:.12g} but 𝒯 = {T[x, y]:.12g}",
                    _labels(space, worst),
                )
            )
    report = AxiomReport(check="length-space", space=space.name, verdicts=verdicts, tolerances=tol)
    log.info(report.summary())
    return report


def check_axioms(space: SpaceDescription, tol: Tolerances = DEFAULT_TOLERANCES) -> AxiomReport:
    """Causal-space and pre-length verdicts in one report."""
    verdicts = check_causal_space(space, tol).verdicts + check_prelength(space, tol).verdicts
    return AxiomReport(check="axioms", space=space.name, verdicts=verdicts, tolerances=tol)
