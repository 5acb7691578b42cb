"""Geodesic-shooting oracle for the model spaces.

Integrates the geodesic equations of M_K in the (t, x) chart and solves the
two-point problem by shooting on (rapidity, proper time). It shares no
formula with `Models.model_tau_array`, so agreement between the two is
evidence for the closed forms.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .Errors import OracleError
from .Models import ModelKind, ModelPoint, ModelSpace, model_tau_array

log = logging.getLogger(__name__)

RTOL = 1e-11
ATOL = 1e-12
VALIDATION_TOL = 1e-6


def metric_coefficients(model: ModelSpace, t: float, x: float) -> tuple[float, ...]:
    """(A, A_t, A_x, B, B_t, B_x) for the metric -A dt² + B dx²."""
    if model.kind is ModelKind.MINKOWSKI:
        return 1.0, 0.0, 0.0, 1.0, 0.0, 0.0
    r = model.radius
    if model.kind is ModelKind.DE_SITTER:
        return 1.0, 0.0, 0.0, math.cosh(t / r) ** 2, math.sinh(2 * t / r) / r, 0.0
    return math.cosh(x / r) ** 2, 0.0, math.sinh(2 * x / r) / r, 1.0, 0.0, 0.0


def _rhs(model: ModelSpace):
    def rhs(_s, y):
        t, x, vt, vx = y
        A, At, Ax, B, Bt, Bx = metric_coefficients(model, t, x)
        at = -(At / (2 * A)) * vt * vt - 2 * (Ax / (2 * A)) * vt * vx - (Bt / (2 * A)) * vx * vx
        ax = -(Ax / (2 * B)) * vt * vt - 2 * (Bt / (2 * B)) * vt * vx - (Bx / (2 * B)) * vx * vx
        return [vt, vx, at, ax]

    return rhs


def shoot(model: ModelSpace, p: ModelPoint, rapidity: float, proper_time: float) -> np.ndarray:
    """End point of the unit-speed timelike geodesic leaving p with the given rapidity."""
    A, _, _, B, _, _ = metric_coefficients(model, p.t, p.x)
    y0 = [p.t, p.x, math.cosh(rapidity) / math.sqrt(A), math.sinh(rapidity) / math.sqrt(B)]
    if proper_time == 0:
        return np.array(y0[:2])
    sol = integrate.solve_ivp(
        _rhs(model), (0.0, proper_time), y0, method="DOP853", rtol=RTOL, atol=ATOL
    )
    if not sol.success:
        raise OracleError(f"integration failed: {sol.message}")
    return sol.y[:2, -1]


def shoot_tau(model: ModelSpace, p: ModelPoint, q: ModelPoint) -> float:
    """Length of the timelike geodesic from p to q found by shooting."""
    dt, dx = q.t - p.t, q.x - p.x
    if dt <= abs(dx):
        raise OracleError(f"{q.coords} is not in the chronological future of {p.coords}")
    guess = [math.atanh(dx / dt), math.sqrt(dt * dt - dx * dx)]
    target = q.array()

    def residual(unknowns):
        rapidity, proper_time = unknowns
        if proper_time <= 0:
            return [1e3 * (1 - proper_time), 1e3]
        return shoot(model, p, rapidity, proper_time) - target

    sol = optimize.root(residual, guess, method="hybr", tol=1e-13)
    miss = float(np.max(np.abs(residual(sol.x))))
    if not sol.success and miss > 1e-8:
        raise OracleError(f"shooting from {p.coords} to {q.coords} missed by {miss:g}")
    return float(sol.x[1])


def validation_pairs(model: ModelSpace, count: int = 12) -> list[tuple[ModelPoint, ModelPoint]]:
    """Deterministic chronological pairs well inside the geodesically convex region.

    Candidates are drawn inside the flat cone and kept only where τ̄ > 0.
    """
    span = min(1.0, 0.4 * model.radius)
    rng = np.random.default_rng(20240229)
    pairs = []
    while len(pairs) < count:
        t0, x0 = rng.uniform(-span, span, size=2)
        dt = rng.uniform(0.25 * span, span)
        dx = rng.uniform(-0.8, 0.8) * dt
        p, q = np.array([t0, x0]), np.array([t0 + dt, x0 + dx])
        if model_tau_array(model, p[None, :], q[None, :])[0] > 0:
            pairs.append((ModelPoint(coords=(t0, x0)), ModelPoint(coords=(t0 + dt, x0 + dx))))
    return pairs


@lru_cache(maxsize=None)
def ensure_model_validated(model: ModelSpace, tol: float = VALIDATION_TOL) -> float:
    """Compare the closed-form τ against shooting; returns the worst deviation.

    Raises OracleError when any pair differs by more than `tol`. Cached per model.
    """
    worst = 0.0
    for p, q in validation_pairs(model):
        closed = float(model_tau_array(model, p.array()[None, :], q.array()[None, :])[0])
        shot = shoot_tau(model, p, q)
        worst = max(worst, abs(closed - shot))
        if abs(closed - shot) > tol:
            raise OracleError(
                f"{model.kind.value} τ{p.coords, q.coords}: closed form {closed} "
                f"vs shooting {shot}"
            )
    log.info("validated %s (K=%g) against shooting, max deviation %.2e", model.kind.value, model.K, worst)
    return worst
