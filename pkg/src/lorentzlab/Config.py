import json
import os
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1

ENV_PREFIX = "LORENTZLAB_"


class Tolerances(BaseModel):
    """Global comparison constants.

    `absolute` and `relative` govern every real comparison; `comparison` is the
    looser absolute bound used when τ is compared against a model value.
    """

    model_config = ConfigDict(frozen=True)

    absolute: float = Field(default=1e-9, gt=0)
    relative: float = Field(default=1e-6, gt=0)
    comparison: float = Field(default=1e-6, gt=0)

    @classmethod
    def from_env(cls, base: "Tolerances | None" = None) -> "Tolerances":
        """Apply LORENTZLAB_ABS_TOL / _REL_TOL / _CMP_TOL overrides."""
        values = (base or cls()).model_dump()
        for field, var in (
            ("absolute", "ABS_TOL"),
            ("relative", "REL_TOL"),
            ("comparison", "CMP_TOL"),
        ):
            raw = os.environ.get(ENV_PREFIX + var)
            if raw is not None:
                values[field] = float(raw)
        return cls(**values)

    def slack(self, scale):
        """Allowed error around a value of magnitude `scale` (∞-safe)."""
        scale = np.abs(np.asarray(scale, dtype=float))
        finite = np.where(np.isfinite(scale), scale, 0.0)
        return self.absolute + self.relative * finite

    def close(self, a, b):
        """Elementwise a ≈ b; two infinities compare equal."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        both_inf = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
        with np.errstate(invalid="ignore"):
            near = np.abs(a - b) <= self.slack(np.maximum(np.abs(a), np.abs(b)))
        return both_inf | near

    def definitely_less(self, a, b):
        """Elementwise a < b beyond tolerance; a finite value is below ∞."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        with np.errstate(invalid="ignore"):
            return b - a > self.slack(np.maximum(np.abs(a), np.abs(b)))


class Budget(BaseModel):
    """Search limits; defaults keep each shipped exemplar fast on one core."""

    model_config = ConfigDict(frozen=True)

    max_seeds: int = Field(default=400, gt=0)
    seed_radius: float | None = Field(default=None, gt=0)
    max_extension_steps: int = Field(default=64, gt=0)
    max_chains: int = Field(default=5000, gt=0)
    random_chains: int = Field(default=200, ge=0)
    random_chain_length: int = Field(default=12, ge=2)
    max_triangles: int = Field(default=200, gt=0)
    max_witnesses: int = Field(default=16, gt=0)
    count_sample_exits: bool = False
    seed: int = 0


def load_config_file(path: str | Path) -> dict:
    """Read an optional JSON config file with "tolerances" and "budget" keys."""
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return data


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_BUDGET = Budget()
