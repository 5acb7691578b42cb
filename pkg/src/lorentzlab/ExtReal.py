import math
from functools import total_ordering
from typing import Any

import numpy as np
from pydantic import GetCoreSchemaHandler
from pydantic_core import core_schema

INF_TOKEN = "inf"


@total_ordering
class ExtReal:
    """A value of [0, ∞] with exact +∞.

    Matrices hold the same values as float64 with IEEE `inf`; ExtReal is the
    scalar form handed across the API and written to JSON ("inf").
    """

    __slots__ = ("_value",)

    def __init__(self, value: "float | int | str | ExtReal") -> None:
        if isinstance(value, ExtReal):
            value = value._value
        elif isinstance(value, str):
            if value != INF_TOKEN:
                raise ValueError(f"expected a number or {INF_TOKEN!r}, got {value!r}")
            value = math.inf
        value = float(value)
        if math.isnan(value) or value < 0:
            raise ValueError(f"extended real must lie in [0, inf], got {value}")
        self._value = value

    @classmethod
    def inf(cls) -> "ExtReal":
        return cls(math.inf)

    @property
    def value(self) -> float:
        return self._value

    @property
    def is_inf(self) -> bool:
        return math.isinf(self._value)

    def __add__(self, other: "ExtReal | float") -> "ExtReal":
        return ExtReal(self._value + ExtReal(other)._value)

    __radd__ = __add__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, ExtReal)):
            return self._value == ExtReal(other)._value
        return NotImplemented

    def __lt__(self, other: "ExtReal | float") -> bool:
        return self._value < ExtReal(other)._value

    def __hash__(self) -> int:
        return hash(self._value)

    def __float__(self) -> float:
        return self._value

    def __repr__(self) -> str:
        return f"ExtReal({self.to_json()!r})"

    def to_json(self) -> float | str:
        return INF_TOKEN if self.is_inf else self._value

    @classmethod
    def __get_pydantic_core_schema__(
        cls, source: Any, handler: GetCoreSchemaHandler
    ) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda v: v.to_json()
            ),
        )


def encode_matrix(values: np.ndarray) -> list[list[float | str]]:
    """float64 matrix → nested lists with "inf" tokens."""
    return [[INF_TOKEN if math.isinf(v) else float(v) for v in row] for row in values]


def decode_value(value: float | str) -> float:
    return ExtReal(value).value
