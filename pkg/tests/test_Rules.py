from unittest import TestCase

import numpy as np

from src.lorentzlab.Errors import StructuralError
from src.lorentzlab.Models import ModelSpace
from src.lorentzlab.Rules import FanRule, MinkowskiRule, ModelRule, OpenConeRule, rule_for


def one(values) -> float:
    return float(np.asarray(values))


class TestMinkowskiRules(TestCase):
    def test_closed_and_open_cones(self):
        """The open-cone rule drops null pairs from ≤."""
        p, q = np.array([0.0, 0.0]), np.array([1.0, 1.0])
        causal, chron = MinkowskiRule().relations(p, q)
        self.assertTrue(causal)
        self.assertFalse(chron)
        causal, chron = OpenConeRule().relations(p, q)
        self.assertFalse(causal)
        causal, _ = OpenConeRule().relations(p, p)
        self.assertTrue(causal)

    def test_tau(self):
        rule = MinkowskiRule()
        self.assertEqual(one(rule.tau(np.array([0.0, 0.0]), np.array([2.0, 0.0]))), 2.0)
        self.assertEqual(one(rule.tau(np.array([2.0, 0.0]), np.array([0.0, 0.0]))), 0.0)

    def test_materialize(self):
        """≤ is reflexive and ≪ irreflexive on a materialized carrier."""
        coords = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        causal, chron, tau = MinkowskiRule().materialize(coords)
        self.assertTrue(causal.diagonal().all())
        self.assertFalse(chron.diagonal().any())
        self.assertEqual(tau[0, 1], 1.0)
        self.assertTrue(causal[0, 2])
        self.assertEqual(tau[0, 2], 0.0)

    def test_perturb_keeps_the_point_first(self):
        P = np.array([[0.0, 0.0], [1.0, 0.5]])
        out = MinkowskiRule().perturb(P, 0.1)
        self.assertEqual(out.shape, (2, 5, 2))
        np.testing.assert_array_equal(out[:, 0], P)


class TestFanRule(TestCase):
    def setUp(self):
        self.rule = FanRule()

    def tau(self, p, q) -> float:
        return one(self.rule.tau(np.array(p, dtype=float), np.array(q, dtype=float)))

    def test_sheet_into_ray(self):
        """τ((−2,0,0),(0,0,3)) = τ_N((−2,0),0) + 3 = 5."""
        self.assertEqual(self.tau((-2, 0, 0), (0, 0, 3)), 5.0)

    def test_along_ray(self):
        self.assertEqual(self.tau((0, 0, 1), (0, 0, 4)), 3.0)
        self.assertEqual(self.tau((0, 0, 4), (0, 0, 1)), 0.0)

    def test_sheet_outside_past_cone(self):
        """Only the causal past of the apex reaches the ray."""
        causal, _ = self.rule.relations(np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]))
        self.assertFalse(causal)
        self.assertEqual(self.tau((0, 1, 0), (0, 0, 1)), 0.0)

    def test_ray_does_not_reach_sheet(self):
        causal, _ = self.rule.relations(np.array([0.0, 0.0, 1.0]), np.array([2.0, 0.0, 0.0]))
        self.assertFalse(causal)

    def test_steps_into_ray_leave_from_apex(self):
        """Curves from the sheet into the ray pass through 0."""
        P = np.array([[-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        Q = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
        self.assertEqual(self.rule.step(P, Q).tolist(), [False, True])

    def test_jitter_stays_on_ray(self):
        jitter = self.rule.jitter(np.array([[0.0, 0.0, 0.25]]), 1.0)
        self.assertTrue((jitter[..., 2] >= 0).all())


class TestRuleFor(TestCase):
    def test_tags(self):
        self.assertIsInstance(rule_for("minkowski"), MinkowskiRule)
        self.assertIsInstance(rule_for("rule:minkowski-open"), OpenConeRule)
        self.assertIsInstance(rule_for("formula:fan"), FanRule)
        model = rule_for("model:K=-1.0")
        self.assertIsInstance(model, ModelRule)
        self.assertEqual(model.model, ModelSpace.of(-1.0))

    def test_equality_by_tag(self):
        self.assertEqual(rule_for("fan"), FanRule())
        self.assertEqual(rule_for(ModelRule(ModelSpace.of(1.0)).tag), ModelRule(ModelSpace.of(1.0)))

    def test_unknown_tag(self):
        with self.assertRaises(StructuralError):
            rule_for("schwarzschild")
