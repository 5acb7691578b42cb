import copy
import json
import tempfile
from pathlib import Path
from shutil import rmtree
from unittest import TestCase

import numpy as np

from src.lorentzlab.Errors import SchemaError
from src.lorentzlab.Exemplars import ExemplarSpec, build_exemplar
from src.lorentzlab.Schema import SpaceDocument, dump_space, load_space, parse_space, save_space

SMALL = ((-1.0, 1.0), (-1.0, 1.0))

TWO_POINTS = {
    "name": "two",
    "points": [{"id": 0}, {"id": 1}],
    "metric": {"kind": "matrix", "values": [[0, 1], [1, 0]]},
    "causal": {"kind": "edges", "edges": [[0, 1]]},
    "chron": {"kind": "edges", "edges": [[0, 1]]},
    "tau": {"kind": "matrix", "values": [[0, "inf"], [0, 0]]},
}

RULED = {
    "name": "diamond",
    "points": [{"id": 0, "coords": [0, 0]}, {"id": 1, "coords": [1, 0.5]}, {"id": 2, "coords": [0.5, -1]}],
    "metric": {"kind": "euclidean"},
    "causal": {"kind": "rule:minkowski"},
    "chron": {"kind": "rule:minkowski"},
    "tau": {"kind": "formula:minkowski"},
}


def broken(doc: dict, path: list, value) -> dict:
    doc = copy.deepcopy(doc)
    target = doc
    for key in path[:-1]:
        target = target[key]
    target[path[-1]] = value
    return doc


def assert_same_space(test: TestCase, a, b):
    test.assertEqual(a.name, b.name)
    test.assertEqual(a.n, b.n)
    for label in ("metric", "causal", "chron", "tau", "steps"):
        np.testing.assert_array_equal(getattr(a, label), getattr(b, label), err_msg=label)
    test.assertEqual(a.rule, b.rule)
    test.assertEqual(a.resolution, b.resolution)
    test.assertEqual(a.notes, b.notes)


class TestParse(TestCase):
    def test_explicit(self):
        space = parse_space(TWO_POINTS)
        self.assertEqual(space.n, 2)
        self.assertEqual(space.tau[0, 1], np.inf)
        self.assertTrue(space.causal[0, 0])
        self.assertIsNone(space.coords)

    def test_from_json_text(self):
        space = parse_space(json.dumps(TWO_POINTS))
        self.assertEqual(space.name, "two")

    def test_rules(self):
        space = parse_space(RULED)
        self.assertEqual(space.rule.tag, "minkowski")
        self.assertEqual(space.metric_kind, "euclidean")
        self.assertAlmostEqual(space.tau[0, 1], np.sqrt(0.75))
        self.assertFalse(space.causal[0, 2])
        self.assertAlmostEqual(space.metric[0, 2], np.sqrt(1.25))

    def test_not_reflexive(self):
        space = parse_space(broken(TWO_POINTS, ["reflexive"], False))
        self.assertFalse(space.causal[0, 0])


class TestPointers(TestCase):
    def assertPointer(self, doc, pointer):
        with self.assertRaises(SchemaError) as ctx:
            parse_space(doc)
        self.assertEqual(ctx.exception.pointer, pointer)

    def test_bad_tau_cell(self):
        self.assertPointer(broken(TWO_POINTS, ["tau", "values", 0, 1], "infinity"), "/tau/values/0/1")

    def test_negative_tau(self):
        self.assertPointer(broken(TWO_POINTS, ["tau", "values", 1, 0], -1), "/tau/values/1/0")

    def test_short_row(self):
        self.assertPointer(broken(TWO_POINTS, ["metric", "values", 1], [1]), "/metric/values/1")

    def test_edge_out_of_range(self):
        self.assertPointer(broken(TWO_POINTS, ["causal", "edges"], [[0, 1], [1, 5]]), "/causal/edges/1/1")

    def test_ids_in_order(self):
        self.assertPointer(broken(TWO_POINTS, ["points", 1, "id"], 3), "/points/1/id")

    def test_missing_field(self):
        doc = copy.deepcopy(TWO_POINTS)
        del doc["points"][0]["id"]
        self.assertPointer(doc, "/points/0/id")

    def test_unknown_field(self):
        self.assertPointer(broken(TWO_POINTS, ["colour"], "blue"), "/colour")

    def test_unknown_rule(self):
        self.assertPointer(broken(RULED, ["causal", "kind"], "rule:galilean"), "/causal/kind")

    def test_rule_without_coords(self):
        self.assertPointer(broken(TWO_POINTS, ["rule"], "minkowski"), "/rule")

    def test_partial_coords(self):
        self.assertPointer(broken(RULED, ["points", 2], {"id": 2}), "/points/2/coords")

    def test_version(self):
        self.assertPointer(broken(TWO_POINTS, ["schema_version"], 99), "/schema_version")

    def test_ball_atlas_needs_radius(self):
        self.assertPointer(broken(TWO_POINTS, ["atlas"], {"kind": "balls"}), "/atlas/radius")


class TestRoundTrip(TestCase):
    def test_exemplars(self):
        for kind in ("minkowski_patch", "punctured_patch", "toy_dag"):
            with self.subTest(kind=kind):
                space = build_exemplar(ExemplarSpec(kind=kind, extent=SMALL))
                again = parse_space(dump_space(space))
                assert_same_space(self, space, again)
                self.assertEqual(space.atlas is None, again.atlas is None)

    def test_holes_and_frame(self):
        space = build_exemplar(ExemplarSpec(kind="punctured_patch", extent=SMALL))
        again = parse_space(dump_space(space))
        np.testing.assert_array_equal(space.holes, again.holes)
        np.testing.assert_array_equal(space.frame, again.frame)
        self.assertEqual(again.atlas.radius, space.atlas.radius)
        self.assertEqual(again.atlas.kind, "balls")

    def test_reflexive_diagonal_not_written(self):
        space = build_exemplar(ExemplarSpec(kind="toy_dag"))
        doc = SpaceDocument.from_space(space)
        self.assertNotIn((0, 0), doc.causal.edges)
        self.assertIn((0, 4), doc.causal.edges)


class TestFiles(TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())

    def tearDown(self):
        rmtree(self.temp_dir)

    def test_save_and_load(self):
        space = build_exemplar(ExemplarSpec(kind="toy_dag"))
        path = self.temp_dir / "toy.json"
        save_space(space, path)
        assert_same_space(self, space, load_space(path))

    def test_invalid_json(self):
        path = self.temp_dir / "bad.json"
        path.write_text("{not json")
        with self.assertRaises(SchemaError) as ctx:
            load_space(path)
        self.assertEqual(ctx.exception.pointer, "")
