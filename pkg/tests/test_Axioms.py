from unittest import TestCase

import numpy as np

from src.lorentzlab.Axioms import (
    causal_future,
    check_axioms,
    check_causal_space,
    check_causality_ladder,
    check_causally_path_connected,
    check_length_space,
    check_localisable,
    check_locally_causally_closed,
    check_lower_semicontinuity,
    check_prelength,
    check_regular,
    chronological_future,
    chronological_past,
)
from src.lorentzlab.Exemplars import ExemplarSpec, build_exemplar, plane_lattice
from src.lorentzlab.Rules import OpenConeRule
from src.lorentzlab.Space import LocalisingAtlas, SpaceDescription, euclidean_metric, metric_balls

SMALL = ((-1.0, 1.0), (-1.0, 1.0))


def two_point(tau01=1.0, tau10=0.0, chron10=False) -> SpaceDescription:
    causal = np.ones((2, 2), dtype=bool)
    chron = np.array([[False, True], [chron10, False]])
    tau = np.array([[0.0, tau01], [tau10, 0.0]])
    return SpaceDescription(name="pair", metric=np.array([[0.0, 1.0], [1.0, 0.0]]), causal=causal, chron=chron, tau=tau)


def open_cone_patch(h=0.5) -> SpaceDescription:
    coords = plane_lattice(SMALL, h)
    rule = OpenConeRule()
    causal, chron, tau = rule.materialize(coords)
    metric = euclidean_metric(coords)
    return SpaceDescription(
        name="open-cone",
        metric=metric,
        causal=causal,
        chron=chron,
        tau=tau,
        coords=coords,
        basis=metric_balls(metric, h),
        resolution=h,
        rule=rule,
        metric_kind="euclidean",
    )


class TestCausalSpace(TestCase):
    def setUp(self):
        self.toy = build_exemplar(ExemplarSpec(kind="toy_dag"))

    def test_toy_dag_passes(self):
        report = check_causal_space(self.toy)
        self.assertEqual(report.status, "pass")
        self.assertTrue(report.ok)

    def test_futures_and_pasts(self):
        self.assertEqual(chronological_future(self.toy, 0), {1, 2, 3, 4})
        self.assertEqual(chronological_past(self.toy, 3), {0, 1, 2})
        self.assertIn(0, causal_future(self.toy, 0))

    def test_chron_outside_causal(self):
        """x ≪ y without x ≤ y is reported with the pair."""
        causal = np.eye(2, dtype=bool)
        space = two_point().replace(causal=causal)
        verdict = check_causal_space(space).verdict("chron-in-causal")
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [0, 1])

    def test_asymmetric_metric(self):
        space = two_point().replace(metric=np.array([[0.0, 1.0], [2.0, 0.0]]))
        self.assertEqual(check_causal_space(space).verdict("metric").status, "fail")

    def test_open_futures_on_a_lattice(self):
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, resolution=0.5))
        report = check_causal_space(space)
        self.assertEqual(report.verdict("futures-open").status, "pass")
        self.assertEqual(report.verdict("pasts-open").status, "pass")
        self.assertEqual(check_causal_space(open_cone_patch()).verdict("futures-open").status, "pass")

    def test_closed_cone_futures_are_not_open(self):
        """With ≪ = ≤ minus the diagonal, null pairs are limits of spacelike ones."""
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, resolution=0.5))
        closed = space.replace(chron=space.causal & ~np.eye(space.n, dtype=bool))
        report = check_causal_space(closed)
        verdict = report.verdict("futures-open")
        self.assertEqual(verdict.status, "fail")
        x, y = verdict.witness
        self.assertTrue(closed.chron[x, y])
        self.assertEqual(space.tau[x, y], 0.0)
        self.assertEqual(report.verdict("pasts-open").status, "fail")

    def test_openness_without_rule(self):
        """Bare matrices leave pairs within one cell of the cone unresolved."""
        space = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL))
        verdict = check_causal_space(space).verdict("futures-open")
        self.assertEqual(verdict.status, "pass")
        self.assertIn("unresolved", verdict.detail)


class TestPrelength(TestCase):
    def test_minkowski_patch(self):
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL))
        report = check_prelength(space)
        self.assertEqual(report.status, "pass")

    def test_zero_tau_on_timelike_pair(self):
        report = check_prelength(two_point(tau01=0.0))
        self.assertEqual(report.verdict("tau-positive").witness, [0, 1])
        self.assertEqual(report.verdict("tau-positive").detail, "x ≪ y with τ = 0")

    def test_reverse_triangle_failure(self):
        """A closed timelike loop breaks τ(x,x) ≥ τ(x,y) + τ(y,x)."""
        report = check_prelength(two_point(tau10=1.0, chron10=True))
        verdict = report.verdict("reverse-triangle")
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [0, 1, 0])

    def test_lower_semicontinuity_needs_resolution(self):
        self.assertEqual(check_lower_semicontinuity(two_point()).status, "not-checkable")

    def test_axioms_combines_reports(self):
        space = build_exemplar(ExemplarSpec(kind="toy_dag"))
        names = [v.name for v in check_axioms(space).verdicts]
        self.assertIn("reflexive", names)
        self.assertIn("reverse-triangle", names)


class TestReverseTriangleScan(TestCase):
    def test_shipped_exemplars(self):
        """The full triple scan passes on every shipped exemplar."""
        for kind in ("minkowski_patch", "fan_space", "punctured_patch", "slit_patch", "half_space_patch"):
            space = build_exemplar(ExemplarSpec(kind=kind))
            with self.subTest(kind=kind):
                self.assertEqual(check_prelength(space).verdict("reverse-triangle").status, "pass")
        for K in (1.0, -1.0):
            space = build_exemplar(ExemplarSpec(kind="model_patch", K=K, extent=SMALL))
            with self.subTest(K=K):
                self.assertEqual(check_prelength(space).verdict("reverse-triangle").status, "pass")


class TestCausalityLadder(TestCase):
    def test_chronology_violation(self):
        report = check_causality_ladder(two_point(tau10=1.0, chron10=True))
        self.assertEqual(report.verdict("chronology").witness, [0, 1])
        self.assertEqual(report.verdict("causality").status, "fail")
        self.assertEqual(report.verdict("strong-causality").status, "fail")

    def test_causality_violation(self):
        """Distinct mutually causal points fail causality but not chronology."""
        report = check_causality_ladder(two_point())
        self.assertEqual(report.verdict("chronology").status, "pass")
        self.assertEqual(report.verdict("causality").witness, [0, 1])

    def test_without_basis(self):
        report = check_causality_ladder(build_exemplar(ExemplarSpec(kind="toy_dag")))
        self.assertEqual(report.verdict("strong-causality").status, "not-checkable")
        self.assertTrue(report.ok)

    def test_minkowski_is_strongly_causal(self):
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL))
        self.assertEqual(check_causality_ladder(space).status, "pass")


class TestClosedness(TestCase):
    def test_open_cones_are_not_closed(self):
        """Null pairs are limits of timelike pairs but unrelated under open cones."""
        report = check_locally_causally_closed(open_cone_patch())
        self.assertEqual(report.status, "fail")

    def test_closed_cones(self):
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, resolution=0.5))
        self.assertEqual(check_locally_causally_closed(space).status, "pass")

    def test_finite_spaces_are_closed(self):
        space = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL, resolution=0.5))
        verdict = check_locally_causally_closed(space).verdicts[0]
        self.assertEqual(verdict.detail, "finite relation matrices are closed")


class TestLengthSpace(TestCase):
    def test_minkowski_patch(self):
        space = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL))
        self.assertEqual(check_length_space(space).status, "pass")

    def test_punctured_patch(self):
        """Excised patches are length spaces by construction."""
        space = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL))
        report = check_length_space(space)
        self.assertEqual(report.verdict("tau-equals-T").status, "pass")
        self.assertEqual(report.verdict("causal-chains").status, "pass")

    def test_missing_chain(self):
        """τ above every chain value fails τ = 𝒯 and path-connectedness."""
        space = build_exemplar(ExemplarSpec(kind="toy_dag"))
        tau = space.tau.copy()
        tau[0, 4] = 10.0
        broken = space.replace(tau=tau)
        self.assertEqual(check_length_space(broken).verdict("tau-equals-T").witness, [0, 4])
        steps = space.steps.copy()
        steps[3, 4] = False
        cut = space.replace(steps=steps)
        self.assertEqual(check_causally_path_connected(cut).verdict("causal-chains").status, "fail")

    def test_localisable_without_atlas(self):
        report = check_localisable(build_exemplar(ExemplarSpec(kind="toy_dag")))
        self.assertEqual(report.status, "not-checkable")


class TestLocalisability(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.patch = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, resolution=0.5))
        cls.fan = build_exemplar(ExemplarSpec(kind="fan_space"))

    def test_omega_is_tau_near_the_centre(self):
        """Inside B(x, h) the local maximizers measure τ itself."""
        for space in (self.patch, self.fan):
            h = space.resolution
            for x in range(space.n):
                m, omega = space.atlas.chart(x)
                near = space.metric[x, m] <= h + 1e-9
                np.testing.assert_allclose(omega[np.ix_(near, near)], space.tau[np.ix_(m[near], m[near])], atol=1e-9)

    def test_patch_has_local_maximizers(self):
        self.assertEqual(check_localisable(self.patch).verdict("local-maximizers").status, "pass")

    def test_raised_omega_is_not_a_maximizer(self):
        """ω_x above τ at one pair fails the local-maximizer clause with that pair."""
        atlas = self.patch.atlas
        x = self.patch.index_of((0, 0))
        p, q = self.patch.index_of((-0.5, 0)), self.patch.index_of((0.5, 0))
        m, omega = atlas.chart(x)
        raised = omega.copy()
        raised[np.searchsorted(m, p), np.searchsorted(m, q)] = 1.5
        forged = LocalisingAtlas(
            members=atlas.members,
            omega=atlas.omega[:x] + (raised,) + atlas.omega[x + 1 :],
            regular=atlas.regular,
            kind=atlas.kind,
            radius=atlas.radius,
        )
        verdict = check_localisable(self.patch.replace(atlas=forged)).verdict("local-maximizers")
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [x, p, q])
        self.assertIn("> τ", verdict.detail)


class TestFanSpace(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.fan = build_exemplar(ExemplarSpec(kind="fan_space"))

    def test_prelength(self):
        """All axioms hold; lower semicontinuity at the ray is only flagged."""
        report = check_prelength(self.fan)
        self.assertTrue(report.ok)
        for name in ("tau-null", "tau-positive", "reverse-triangle"):
            self.assertEqual(report.verdict(name).status, "pass")

    def test_length_space(self):
        self.assertEqual(check_length_space(self.fan).status, "pass")

    def test_regular_localisable(self):
        report = check_localisable(self.fan)
        self.assertTrue(self.fan.atlas.regular)
        self.assertEqual(report.verdict("regular").status, "pass")
        self.assertEqual(report.status, "pass")
        self.assertEqual(check_regular(self.fan, points=[0, 1]).status, "pass")

    def test_causality_ladder(self):
        self.assertEqual(check_causality_ladder(self.fan).status, "pass")


class TestRegular(TestCase):
    def test_unclaimed_regularity(self):
        space = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL, resolution=0.5))
        verdict = check_regular(space)
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [])

    def test_no_atlas(self):
        self.assertEqual(check_regular(build_exemplar(ExemplarSpec(kind="toy_dag"))).status, "not-checkable")
