from unittest import TestCase

import numpy as np

from src.lorentzlab.Errors import StructuralError
from src.lorentzlab.Exemplars import ExemplarSpec, build_exemplar, extension_pair
from src.lorentzlab.Extension import (
    CLAUSES,
    HYPOTHESES,
    ExtensionCandidate,
    check_extension,
    check_tau_monotone,
    compute_boundary,
    cross_check_inextendibility,
    inclusion_map,
)

SMALL = ((-1.0, 1.0), (-1.0, 1.0))


class TestPuncturedInFan(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cand = extension_pair("punctured_in_fan", extent=SMALL, ray_length=1.0)
        cls.apex = cls.cand.ambient.index_of((0, 0, 0))

    def test_is_an_extension(self):
        report = check_extension(self.cand)
        self.assertEqual([v.name for v in report.verdicts], list(CLAUSES))
        for v in report.verdicts:
            self.assertEqual(v.status, "pass", v.name)
        self.assertTrue(report.ok)
        self.assertEqual(check_tau_monotone(self.cand).status, "pass")

    def test_image(self):
        self.assertEqual(int(self.cand.image.sum()), self.cand.base.n)
        self.assertFalse(self.cand.image[self.apex])

    def test_boundary_contains_apex(self):
        boundary = compute_boundary(self.cand)
        self.assertTrue(boundary.ok)
        self.assertIn(self.apex, boundary.future)
        self.assertIn(self.apex, boundary.past)
        chain = boundary.future_curves[self.apex]
        self.assertEqual(chain[-1], self.apex)
        self.assertTrue(self.cand.image[chain[:-1]].all())
        # the ray is reached only through the apex
        ray = [i for i in range(self.cand.ambient.n) if self.cand.ambient.coords[i, 2] > 0]
        self.assertFalse(set(ray) & set(boundary.future))

    def test_cross_check_is_consistent(self):
        report = cross_check_inextendibility(self.cand)
        self.assertFalse(report.inconsistency)
        self.assertTrue(report.ok)
        self.assertTrue(report.failing)
        self.assertEqual(set(report.hypotheses), set(HYPOTHESES))
        for name in report.failing:
            self.assertFalse(report.hypotheses[name].holds)
            self.assertEqual(report.hypotheses[name].source, "checked")

    def test_assuming_every_hypothesis_is_flagged(self):
        report = cross_check_inextendibility(self.cand, assume={name: True for name in HYPOTHESES})
        self.assertTrue(report.inconsistency)
        self.assertFalse(report.ok)
        self.assertEqual(report.failing, [])
        self.assertIn("INCONSISTENCY", report.summary())

    def test_unknown_hypothesis(self):
        with self.assertRaises(StructuralError):
            cross_check_inextendibility(self.cand, assume={"ambient_flat": True})


class TestPlaneInFan(TestCase):
    def test_apex_in_the_image_is_not_open(self):
        """Every neighbourhood of the apex reaches up the ray, outside the plane."""
        base = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, fan_compatible=True))
        ambient = build_exemplar(ExemplarSpec(kind="fan_space", extent=SMALL, ray_length=1.0))
        cand = ExtensionCandidate(base=base, ambient=ambient, embedding=inclusion_map(base, ambient))
        verdict = check_extension(cand).verdict("open-image")
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [base.index_of((0, 0)), ambient.index_of((0, 0, 0.25))])


class TestHalfSpace(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cand = extension_pair("half_space_in_minkowski", extent=SMALL)

    def test_boundary_is_the_cut(self):
        boundary = compute_boundary(self.cand)
        coords = self.cand.ambient.coords
        self.assertTrue(boundary.future)
        for b in boundary.future:
            self.assertAlmostEqual(coords[b, 0], 0.0)
        self.assertEqual(boundary.past, [])

    def test_scrambled_embedding_breaks_isometry(self):
        scrambled = ExtensionCandidate(
            base=self.cand.base, ambient=self.cand.ambient, embedding=np.roll(self.cand.embedding, 1)
        )
        report = check_extension(scrambled)
        self.assertEqual(report.verdict("isometry").status, "fail")
        self.assertFalse(report.ok)


class TestSlitInMinkowski(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cand = extension_pair("slit_in_minkowski")

    def test_ambient_opens_a_shortcut_through_the_slit(self):
        """Across the slit X has τ = 0 where X̃ has τ̃ = 2."""
        base, ambient = self.cand.base, self.cand.ambient
        x, y = base.index_of((-1, 0)), base.index_of((1, 0))
        self.assertEqual(base.tau[x, y], 0.0)
        self.assertAlmostEqual(ambient.tau[self.cand.embedding[x], self.cand.embedding[y]], 2.0)
        self.assertEqual(check_tau_monotone(self.cand).status, "pass")


class TestShippedPairs(TestCase):
    def test_cross_check_never_contradicts(self):
        """Every shipped extension fails at least one hypothesis of the theorem."""
        for kind in ("punctured_in_fan", "half_space_in_minkowski", "slit_in_minkowski"):
            report = cross_check_inextendibility(extension_pair(kind, extent=SMALL, ray_length=1.0))
            self.assertFalse(report.inconsistency, kind)
            self.assertTrue(report.failing, kind)

    def test_shorter_ambient_step_breaks_curve_lengths(self):
        cand = extension_pair("half_space_in_minkowski", extent=SMALL)
        x, y = cand.base.index_of((-1, 0)), cand.base.index_of((-0.5, 0))
        self.assertTrue(cand.base.steps[x, y])
        tau = cand.ambient.tau.copy()
        tau[cand.embedding[x], cand.embedding[y]] = 0.25
        shortened = ExtensionCandidate(base=cand.base, ambient=cand.ambient.replace(tau=tau), embedding=cand.embedding)
        verdict = check_extension(shortened).verdict("curves")
        self.assertEqual(verdict.status, "fail")
        self.assertEqual(verdict.witness, [x, y])
        self.assertEqual(check_tau_monotone(shortened).witness, [x, y])


class TestCandidate(TestCase):
    def setUp(self):
        self.base = build_exemplar(ExemplarSpec(kind="half_space_patch", extent=SMALL))
        self.ambient = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL))

    def test_inclusion(self):
        embedding = inclusion_map(self.base, self.ambient)
        np.testing.assert_allclose(self.ambient.coords[embedding], self.base.coords)

    def test_not_injective(self):
        with self.assertRaises(StructuralError):
            ExtensionCandidate(base=self.base, ambient=self.ambient, embedding=np.zeros(self.base.n))

    def test_wrong_length(self):
        with self.assertRaises(StructuralError):
            ExtensionCandidate(base=self.base, ambient=self.ambient, embedding=np.arange(3))

    def test_no_counterpart(self):
        with self.assertRaises(StructuralError):
            inclusion_map(self.ambient, self.base)
