import math
from unittest import TestCase

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from pydantic import BaseModel, ValidationError

from src.lorentzlab.ExtReal import INF_TOKEN, ExtReal, decode_value, encode_matrix


class Holder(BaseModel):
    value: ExtReal


finite = st.floats(min_value=0, max_value=1e6, allow_nan=False)


class TestExtReal(TestCase):
    def test_inf_token(self):
        """The string "inf" parses to +∞ and back."""
        v = ExtReal(INF_TOKEN)
        self.assertTrue(v.is_inf)
        self.assertEqual(v.to_json(), "inf")
        self.assertEqual(ExtReal.inf(), v)

    def test_rejects_negative_and_nan(self):
        """Values outside [0, ∞] are refused."""
        for bad in (-1.0, math.nan, "infinity"):
            with self.assertRaises(ValueError):
                ExtReal(bad)

    def test_ordering(self):
        """Finite values sit below ∞."""
        self.assertLess(ExtReal(3), ExtReal.inf())
        self.assertLess(ExtReal(1.5), 2)
        self.assertEqual(ExtReal(2), 2.0)

    def test_addition_absorbs_infinity(self):
        self.assertTrue((ExtReal(2) + ExtReal.inf()).is_inf)
        self.assertEqual(ExtReal(2) + 3, ExtReal(5))

    def test_pydantic_field(self):
        """ExtReal fields serialize ∞ as "inf" and validate it back."""
        self.assertEqual(Holder(value=ExtReal.inf()).model_dump(mode="json"), {"value": "inf"})
        self.assertTrue(Holder.model_validate({"value": "inf"}).value.is_inf)
        self.assertEqual(Holder.model_validate({"value": 2.5}).value, 2.5)
        with self.assertRaises(ValidationError):
            Holder.model_validate({"value": -1})

    def test_encode_matrix(self):
        """Matrices carry ∞ as the token."""
        encoded = encode_matrix(np.array([[0.0, np.inf], [1.5, 0.0]]))
        self.assertEqual(encoded, [[0.0, "inf"], [1.5, 0.0]])
        self.assertEqual(decode_value("inf"), math.inf)
        self.assertEqual(decode_value(1.5), 1.5)

    @given(finite, finite)
    def test_addition_commutes(self, a, b):
        self.assertEqual(ExtReal(a) + ExtReal(b), ExtReal(b) + ExtReal(a))

    @given(finite, finite)
    def test_addition_monotone(self, a, b):
        self.assertLessEqual(ExtReal(a), ExtReal(a) + ExtReal(b))
