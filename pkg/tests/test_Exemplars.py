from unittest import TestCase

import numpy as np
from pydantic import ValidationError

from src.lorentzlab.Curvature import detect_branching
from src.lorentzlab.Errors import EmptySpaceError
from src.lorentzlab.Exemplars import (
    ATLAS_RADIUS,
    ExemplarSpec,
    SprinklingSpec,
    blocked_steps,
    build_exemplar,
    plane_lattice,
    sprinkle,
)
from src.lorentzlab.Models import ModelSpace
from src.lorentzlab.Rules import FanRule

SMALL = ((-1.0, 1.0), (-1.0, 1.0))


class TestLattices(TestCase):
    def test_plane_lattice(self):
        coords = plane_lattice(SMALL, 0.5)
        self.assertEqual(coords.shape, (25, 2))
        np.testing.assert_allclose(coords[0], [-1, -1])
        np.testing.assert_allclose(coords[1], [-1, -0.5])
        np.testing.assert_allclose(coords[-1], [1, 1])

    def test_blocked_steps(self):
        coords = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        blocked = blocked_steps(coords, np.array([[0.0, 0.0]]), 0.1)
        self.assertTrue(blocked[0, 1])
        self.assertFalse(blocked[0, 2])

    def test_empty_extent(self):
        with self.assertRaises(ValidationError):
            ExemplarSpec(kind="minkowski_patch", extent=((1.0, 1.0), (0.0, 1.0)))


class TestPatches(TestCase):
    def test_minkowski_patch(self):
        patch = build_exemplar(ExemplarSpec(kind="minkowski_patch"))
        self.assertEqual(patch.n, 17 * 17)
        self.assertEqual(patch.rule.tag, "minkowski")
        self.assertEqual(patch.atlas.radius, ATLAS_RADIUS * 0.25)
        self.assertTrue(patch.atlas.regular)
        a, b = patch.index_of((-1, 0)), patch.index_of((1, 0.5))
        self.assertAlmostEqual(patch.tau[a, b], np.sqrt(4 - 0.25))
        self.assertTrue(patch.frame[patch.index_of((-2, 0))])
        self.assertFalse(patch.frame[patch.index_of((0, 0))])

    def test_model_patch_name(self):
        patch = build_exemplar(ExemplarSpec(kind="model_patch", K=-1.0, extent=SMALL))
        self.assertEqual(patch.name, "model_patch(K=-1)")
        self.assertEqual(patch.rule.tag, "model:K=-1.0")

    def test_punctured_patch(self):
        patch = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL))
        self.assertEqual(patch.n, 9 * 9 - 1)
        self.assertIsNone(patch.rule)
        with self.assertRaises(KeyError):
            patch.index_of((0, 0))
        a, b = patch.index_of((-0.5, 0)), patch.index_of((0.5, 0))
        self.assertTrue(patch.chron[a, b])
        # no straight segment through the hole
        self.assertLess(patch.tau[a, b], 1.0)
        self.assertFalse(patch.steps[a, b])

    def test_fan_compatible_puncture(self):
        patch = build_exemplar(ExemplarSpec(kind="punctured_patch", fan_compatible=True, extent=SMALL))
        self.assertEqual(patch.n, 9 * 9 - 1 - 8)
        with self.assertRaises(KeyError):
            patch.index_of((-0.5, 0.5))

    def test_half_space(self):
        patch = build_exemplar(ExemplarSpec(kind="half_space_patch", extent=SMALL))
        self.assertTrue((patch.coords[:, 0] < 0).all())
        self.assertEqual(patch.n, 4 * 9)

    def test_slit(self):
        patch = build_exemplar(ExemplarSpec(kind="slit_patch", extent=SMALL))
        a, b = patch.index_of((-0.5, 0)), patch.index_of((0.5, 0))
        self.assertFalse(patch.causal[a, b])

    def test_step_radius(self):
        patch = build_exemplar(ExemplarSpec(kind="minkowski_patch", extent=SMALL, step_radius="grid"))
        a, b = patch.index_of((-1, 0)), patch.index_of((1, 0))
        self.assertFalse(patch.steps[a, b])
        self.assertTrue(patch.causal[a, b])


class TestFan(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.fan = build_exemplar(ExemplarSpec(kind="fan_space"))

    def test_carrier(self):
        self.assertEqual(self.fan.n, 17 * 17 - 16 + 12)
        self.assertEqual(self.fan.dim, 3)
        self.assertEqual(int(FanRule.on_ray(self.fan.coords).sum()), 12)

    def test_tau_through_apex(self):
        p = self.fan.index_of((-1, 0, 0))
        self.assertAlmostEqual(self.fan.tau[p, self.fan.index_of((0, 0, 3))], 4.0)
        q = self.fan.index_of((-0.5, 0.25, 0))
        self.assertTrue(self.fan.chron[q, self.fan.index_of((0, 0, 1))])

    def test_sheet_does_not_step_onto_ray(self):
        p = self.fan.index_of((-1, 0, 0))
        self.assertFalse(self.fan.steps[p, self.fan.index_of((0, 0, 1))])
        self.assertTrue(self.fan.steps[self.fan.index_of((0, 0, 0)), self.fan.index_of((0, 0, 1))])

    def test_frame_next_to_the_omitted_cone(self):
        """Points beside the dropped past null cone end the sample; the apex does not."""
        for point in ((-1.5, -1.25, 0), (-0.25, 0, 0), (0, 0, 3), (-2, 0, 0)):
            self.assertTrue(self.fan.frame[self.fan.index_of(point)], point)
        for point in ((0, 0, 0), (-1.5, -1.0, 0), (0, 0, 1)):
            self.assertFalse(self.fan.frame[self.fan.index_of(point)], point)

    def test_needs_origin(self):
        with self.assertRaises(EmptySpaceError):
            build_exemplar(ExemplarSpec(kind="fan_space", extent=((0.1, 1.0), (0.1, 1.0))))


class TestToyDag(TestCase):
    def test_tie(self):
        dag = build_exemplar(ExemplarSpec(kind="toy_dag"))
        self.assertEqual(dag.n, 5)
        self.assertEqual(dag.tau[0, 4], 4.0)
        self.assertEqual(dag.tau[1, 2], 0.0)
        witnesses = detect_branching(dag, range(5))
        self.assertTrue(witnesses)
        self.assertEqual(witnesses[0].point, 0)
        self.assertEqual({tuple(c) for c in witnesses[0].chains}, {(0, 1, 3), (0, 2, 3)})


class TestSprinkling(TestCase):
    def test_deterministic(self):
        spec = SprinklingSpec(density=200, seed=7)
        a, b = sprinkle(spec), sprinkle(spec)
        np.testing.assert_array_equal(a.coords, b.coords)
        np.testing.assert_array_equal(a.tau, b.tau)
        self.assertEqual(a.rule.tag, "model:K=0.0")
        self.assertEqual(a.metric_kind, "euclidean")

    def test_points_in_region(self):
        space = sprinkle(SprinklingSpec(density=400, shape="diamond", seed=1))
        t, x = space.coords[:, 0], space.coords[:, 1]
        self.assertTrue((np.abs(x) <= np.minimum(t, 1 - t) + 1e-12).all())

    def test_model(self):
        space = sprinkle(SprinklingSpec(density=100, model=ModelSpace.of(1.0), seed=3))
        self.assertEqual(space.rule.tag, "model:K=1.0")

    def test_empty(self):
        with self.assertRaises(EmptySpaceError):
            sprinkle(SprinklingSpec(density=1e-9))
