"""Quasi-Newton machinery: forward-difference gradients, the rank-two
inverse-Hessian update, and a golden-section line search.

The line search brackets along ``x - alpha * d`` starting from
``alpha = 0.1`` with geometric expansion (factor 3, capped at 20), then
shrinks a four-point window with the golden ratios 0.382/0.618 until the
window is narrower than 5e-4 or the tracked values agree within 1e-4.

Two bracket-expansion modes exist.  The default ``"verbatim"`` keeps the
original convention of expanding only while the far endpoint is *worse*
than the start, which confines a straightforward descent direction to the
initial ``[0, 0.1]`` window and relies on the inverse-Hessian to scale the
direction over iterations.  ``"descent"`` expands while the far endpoint
keeps improving, the conventional choice for locating an interior
minimizer in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "LineSearchConfig",
    "OptimizerState",
    "numeric_gradient",
    "bfgs_update",
    "golden_section_search",
]

_BRACKET_MODES = ("verbatim", "descent")


@dataclass
class LineSearchConfig:
    """Golden-section line search constants."""

    eps2: float = 1e-4
    eps3: float = 5e-4
    tau1: float = 3.0
    tau2: float = 0.382
    tau3: float = 0.618
    alpha_init: float = 0.1
    alpha_cap: float = 20.0
    bracket_mode: str = "verbatim"

    def __post_init__(self):
        if self.bracket_mode not in _BRACKET_MODES:
            raise ValueError(
                f"bracket_mode must be one of {_BRACKET_MODES}, "
                f"got {self.bracket_mode!r}"
            )
        if min(self.eps2, self.eps3) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(eq=False)
class OptimizerState:
    """One iterate: coordinates, inverse-Hessian approximation, gradient, value."""

    x: np.ndarray
    M: np.ndarray
    g: np.ndarray
    f: float
    k: int


def numeric_gradient(f, x: np.ndarray, f_x: float, step: float = 1e-4) -> np.ndarray:
    """Forward-difference gradient with a fixed positive step.

    Uses the supplied ``f_x = f(x)``, so the cost is exactly one objective
    evaluation per coordinate.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    x = np.asarray(x, dtype=float)
    grad = np.empty(x.size)
    for i in range(x.size):
        probe = x.copy()
        probe[i] += step
        fi = f(probe)
        if not math.isfinite(fi):
            raise NumericalError(
                f"objective became non-finite probing coordinate {i}"
            )
        grad[i] = (fi - f_x) / step
    return grad


def bfgs_update(m: np.ndarray, dx: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Rank-two inverse-Hessian update from an argument/gradient step pair.

    Skips the update (returns ``m`` unchanged) when the curvature
    ``dg . dx`` is non-positive or vanishes relative to ``|dg| |dx|``;
    finite-difference gradients make such steps possible, and applying the
    update there would destroy positive definiteness.
    """
    m = np.asarray(m, dtype=float)
    dx = np.asarray(dx, dtype=float).ravel()
    dg = np.asarray(dg, dtype=float).ravel()
    if m.shape != (dx.size, dx.size) or dg.size != dx.size:
        raise ValueError(
            f"shape mismatch: M {m.shape}, dx {dx.size}, dg {dg.size}"
        )
    curvature = float(dg @ dx)
    guard = 1e-12 * float(np.linalg.norm(dg) * np.linalg.norm(dx))
    if curvature <= guard:
        return m.copy()
    rho = 1.0 / curvature
    left = np.eye(dx.size) - rho * np.outer(dx, dg)
    return left @ m @ left.T + rho * np.outer(dx, dx)


def golden_section_search(
    f,
    x: np.ndarray,
    d: np.ndarray,
    f_x: float,
    config: LineSearchConfig | None = None,
) -> float:
    """Step size minimizing ``f(x - alpha * d)`` over a bracketed window.

    Tracks four abscissae ``[a1, a2, a3, a4]`` and their values; each
    shrink step re-brackets around the current best index and refreshes the
    interior values, reusing the one evaluation the golden ratios carry
    over.  Returns the abscissa of the smallest tracked value, which is 0
    whenever no improvement over the start was found (``f_x`` stays in the
    tracked set).  A zero direction returns 0 immediately.
    """
    cfg = config if config is not None else LineSearchConfig()
    d = np.asarray(d, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if d.size == 0 or not np.any(d):
        return 0.0

    def phi(alpha: float) -> float:
        return f(x - alpha * d)

    alphas = [0.0, 0.0, 0.0, cfg.alpha_init]
    values = [f_x, math.nan, math.nan, phi(cfg.alpha_init)]

    if cfg.bracket_mode == "verbatim":
        while alphas[3] < cfg.alpha_cap and values[0] < values[3]:
            alphas[3] *= cfg.tau1
            values[3] = phi(alphas[3])
    else:
        while alphas[3] < cfg.alpha_cap and values[3] < values[0]:
            alphas[3] *= cfg.tau1
            values[3] = phi(alphas[3])

    alphas[1] = cfg.tau2 * alphas[3]
    alphas[2] = cfg.tau3 * alphas[3]
    values[1] = phi(alphas[1])
    values[2] = phi(alphas[2])

    while (
        alphas[3] - alphas[0] > cfg.eps3
        and max(values) - min(values) > cfg.eps2
    ):
        m = values.index(min(values))
        q1, q2 = max(0, m - 1), min(3, m + 1)
        a1, a4 = alphas[q1], alphas[q2]
        f1, f4 = values[q1], values[q2]
        alphas[0], alphas[3] = a1, a4
        values[0], values[3] = f1, f4
        alphas[1] = a1 + cfg.tau2 * (a4 - a1)
        alphas[2] = a1 + cfg.tau3 * (a4 - a1)
        if m == 1:
            values[2] = values[1]
            values[1] = phi(alphas[1])
        elif m == 2:
            values[1] = values[2]
            values[2] = phi(alphas[2])
        else:
            values[1] = phi(alphas[1])
            values[2] = phi(alphas[2])

    return alphas[values.index(min(values))]
