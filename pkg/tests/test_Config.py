import json
import math
import os
import tempfile
from pathlib import Path
from shutil import rmtree
from unittest import TestCase
from unittest.mock import patch

import numpy as np
from pydantic import ValidationError

from src.lorentzlab.Config import Budget, Tolerances, load_config_file


class TestTolerances(TestCase):
    def test_defaults(self):
        tol = Tolerances()
        self.assertEqual((tol.absolute, tol.relative, tol.comparison), (1e-9, 1e-6, 1e-6))

    def test_positive(self):
        """Tolerances must be positive."""
        with self.assertRaises(ValidationError):
            Tolerances(absolute=0)

    def test_close_handles_infinity(self):
        tol = Tolerances()
        self.assertTrue(tol.close(math.inf, math.inf))
        self.assertFalse(tol.close(1.0, math.inf))
        self.assertTrue(tol.close(1.0, 1.0 + 1e-12))
        self.assertFalse(tol.close(1.0, 1.1))

    def test_close_is_vectorised(self):
        tol = Tolerances()
        got = tol.close(np.array([1.0, 2.0, np.inf]), np.array([1.0, 2.5, np.inf]))
        self.assertEqual(got.tolist(), [True, False, True])

    def test_definitely_less(self):
        tol = Tolerances()
        self.assertTrue(tol.definitely_less(1.0, math.inf))
        self.assertTrue(tol.definitely_less(1.0, 2.0))
        self.assertFalse(tol.definitely_less(1.0, 1.0 + 1e-12))
        self.assertFalse(tol.definitely_less(math.inf, math.inf))

    def test_from_env(self):
        """LORENTZLAB_* variables override the defaults."""
        with patch.dict(os.environ, {"LORENTZLAB_ABS_TOL": "1e-6", "LORENTZLAB_CMP_TOL": "1e-3"}):
            tol = Tolerances.from_env()
        self.assertEqual(tol.absolute, 1e-6)
        self.assertEqual(tol.comparison, 1e-3)
        self.assertEqual(tol.relative, 1e-6)


class TestBudget(TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        rmtree(self.temp_dir)

    def test_defaults(self):
        budget = Budget()
        self.assertEqual(budget.max_seeds, 400)
        self.assertEqual(budget.random_chains, 200)
        self.assertFalse(budget.count_sample_exits)

    def test_limits_must_be_positive(self):
        with self.assertRaises(ValidationError):
            Budget(max_triangles=0)

    def test_load_config_file(self):
        """A config file supplies tolerances and budget sections."""
        path = Path(self.temp_dir) / "config.json"
        path.write_text(json.dumps({"tolerances": {"comparison": 1e-4}, "budget": {"max_seeds": 10}}))
        data = load_config_file(path)
        self.assertEqual(Tolerances(**data["tolerances"]).comparison, 1e-4)
        self.assertEqual(Budget(**data["budget"]).max_seeds, 10)

    def test_load_config_file_rejects_lists(self):
        path = Path(self.temp_dir) / "config.json"
        path.write_text("[1, 2]")
        with self.assertRaises(ValueError):
            load_config_file(path)
