"""Mapping between unconstrained optimizer coordinates and feasible powers.

The optimizer works on ``x = [lam_tilde, theta]`` where ``lam_tilde`` holds
the first ``nt - 1`` eigenvalues with no sign or budget constraint and
``theta`` the flattened rotation angles.  :func:`rectify` folds any such
``lam_tilde`` onto the simplex ``{lam >= 0, sum(lam) = pt}``: negatives are
clamped to zero, the clamped vector is rescaled if it overspends the
budget, and the last eigenvalue absorbs the remaining power.  The map is
continuous and piecewise linear, so the composed objective stays continuous
in ``x``.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelPair, secrecy_rate
from .rotations import compose_rotation, n_angles

__all__ = [
    "coord_length",
    "rectify",
    "pack",
    "unpack",
    "objective",
    "make_objective",
]


def coord_length(nt: int) -> int:
    """Length of the coordinate vector: ``(nt - 1) + nt*(nt-1)/2``."""
    if nt < 1:
        raise ValueError(f"nt must be >= 1, got {nt}")
    return (nt - 1) + n_angles(nt)


def rectify(lam_tilde: np.ndarray, pt: float) -> np.ndarray:
    """Fold ``nt - 1`` unconstrained eigenvalues onto the full-power simplex.

    Clamp negatives to zero; if the clamped entries sum past ``pt``, scale
    them down to exactly ``pt``; append ``pt`` minus their sum as the last
    eigenvalue.  Total by design: every real input yields a vector of
    ``nt`` non-negative entries summing to ``pt``.  For ``nt = 1`` the
    input is empty and the output is ``[pt]``.
    """
    if pt < 0:
        raise ValueError(f"power budget must be >= 0, got {pt}")
    lam_tilde = np.asarray(lam_tilde, dtype=float).ravel()
    clamped = np.maximum(lam_tilde, 0.0)
    total = clamped.sum()
    if total > pt:
        clamped = clamped * (pt / total)
    last = pt - clamped.sum()
    if last < 0.0:  # roundoff from the rescale branch
        last = 0.0
    return np.append(clamped, last)


def pack(lam_tilde: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Concatenate ``[lam_tilde, theta]`` after checking the length pairing."""
    lam_tilde = np.asarray(lam_tilde, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    nt = lam_tilde.size + 1
    if theta.size != n_angles(nt):
        raise ValueError(
            f"theta has {theta.size} entries, expected {n_angles(nt)} to pair "
            f"with {lam_tilde.size} free eigenvalues (nt={nt})"
        )
    return np.concatenate([lam_tilde, theta])


def unpack(x: np.ndarray, nt: int) -> tuple[np.ndarray, np.ndarray]:
    """Split a coordinate vector back into ``(lam_tilde, theta)``."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != coord_length(nt):
        raise ValueError(
            f"coordinate vector has {x.size} entries, expected "
            f"{coord_length(nt)} for nt={nt}"
        )
    return x[: nt - 1].copy(), x[nt - 1 :].copy()


def objective(x: np.ndarray, ch: ChannelPair, pt: float) -> float:
    """Negative secrecy rate at rectified coordinates (minimization sign)."""
    lam_tilde, theta = unpack(x, ch.nt)
    lam = rectify(lam_tilde, pt)
    v = compose_rotation(theta, ch.nt)
    return -secrecy_rate(ch, v, lam)


def make_objective(ch: ChannelPair, pt: float):
    """Bind a channel and power budget into an ``f(x)`` callable."""

    def f(x: np.ndarray) -> float:
        return objective(x, ch, pt)

    return f
