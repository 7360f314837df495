"""Rotation parameterization of symmetric covariance factors.

A real covariance matrix is factored as ``Q = V diag(lam) V^T`` where ``V``
is orthonormal.  Any proper rotation ``V`` can in turn be written as an
ordered product of planar (Givens) rotations, one per coordinate pair, so a
full ``nt x nt`` covariance is described by ``nt`` eigenvalues plus
``nt*(nt-1)/2`` angles.  This module provides:

* :func:`sym_eig` -- cyclic-Jacobi symmetric eigendecomposition,
* :func:`givens` / :func:`compose_rotation` -- Givens factors and their
  ordered product,
* :func:`extract_angles` -- the inverse problem (angles from a rotation),
* :func:`repair_improper` -- determinant fix for reflection matrices.

All indices are zero-based.  Angle vectors are flattened in the canonical
pair order ``(0,1), (0,2), ..., (0,nt-1), (1,2), ..., (nt-2,nt-1)``; the
composition below multiplies factors left-to-right in exactly that order,
and :func:`extract_angles` inverts that same convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "RotationParams",
    "n_angles",
    "angle_pairs",
    "givens",
    "compose_rotation",
    "extract_angles",
    "repair_improper",
    "sym_eig",
]


@dataclass(eq=False)
class RotationParams:
    """Eigenvalue vector (length ``nt``) and flattened angle vector."""

    lam: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float).ravel()
        self.theta = np.asarray(self.theta, dtype=float).ravel()
        nt = self.lam.size
        if self.theta.size != n_angles(nt):
            raise ValueError(
                f"angle vector has {self.theta.size} entries, expected "
                f"{n_angles(nt)} for nt={nt}"
            )

    @property
    def nt(self) -> int:
        return self.lam.size


def n_angles(nt: int) -> int:
    """Number of planar rotation angles for an ``nt x nt`` rotation."""
    if nt < 1:
        raise ValueError(f"nt must be >= 1, got {nt}")
    return nt * (nt - 1) // 2


def angle_pairs(nt: int) -> list[tuple[int, int]]:
    """Coordinate pairs ``(i, j)`` in canonical flattening order."""
    return [(i, j) for i in range(nt - 1) for j in range(i + 1, nt)]


def givens(nt: int, i: int, j: int, theta: float) -> np.ndarray:
    """Planar rotation by ``theta`` in coordinates ``(i, j)``, ``i < j``.

    Identity everywhere except entries ``(i,i) = (j,j) = cos(theta)``,
    ``(i,j) = -sin(theta)`` and ``(j,i) = sin(theta)``.  Its determinant
    is +1 for every angle.
    """
    if not (0 <= i < j < nt):
        raise ValueError(f"need 0 <= i < j < nt, got i={i}, j={j}, nt={nt}")
    c, s = math.cos(theta), math.sin(theta)
    g = np.eye(nt)
    g[i, i] = c
    g[j, j] = c
    g[i, j] = -s
    g[j, i] = s
    return g


def compose_rotation(angles: np.ndarray, nt: int) -> np.ndarray:
    """Ordered product of Givens factors for a flattened angle vector.

    Factors multiply left-to-right in canonical pair order.  The result is
    orthonormal with determinant +1 for any real angles, including angles
    far outside ``[0, 2*pi)``.
    """
    angles = np.asarray(angles, dtype=float).ravel()
    if angles.size != n_angles(nt):
        raise ValueError(
            f"angle vector has {angles.size} entries, expected {n_angles(nt)} "
            f"for nt={nt}"
        )
    v = np.eye(nt)
    k = 0
    for i in range(nt - 1):
        for j in range(i + 1, nt):
            c, s = math.cos(angles[k]), math.sin(angles[k])
            k += 1
            vi = v[:, i].copy()
            vj = v[:, j].copy()
            v[:, i] = c * vi + s * vj
            v[:, j] = -s * vi + c * vj
    return v


def _check_orthonormal(v: np.ndarray, tol: float) -> None:
    resid = np.abs(v @ v.T - np.eye(v.shape[0])).max()
    if resid > tol:
        raise ValueError(
            f"matrix is not orthonormal: max |V V^T - I| = {resid:.3e} > {tol:.0e}"
        )


def extract_angles(v: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, bool]:
    """Recover the canonical Givens angles of an orthonormal matrix.

    Walks the subdiagonal column by column, choosing each angle with the
    four-quadrant arctangent and applying the transposed Givens factor to
    zero the entry below the diagonal.  A reflection (determinant -1)
    cannot be reduced to the identity this way, so its first two columns
    are swapped beforehand and the returned flag is set; the angles then
    reproduce the column-swapped matrix.

    Returns ``(angles, swapped)`` with ``compose_rotation(angles, nt)``
    equal to ``v`` (after the swap, if flagged) within ``tol``.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {v.shape}")
    nt = v.shape[0]
    _check_orthonormal(v, tol)

    w = v.copy()
    swapped = False
    if np.linalg.det(w) < 0:
        if nt < 2:
            raise ValueError("cannot repair a 1x1 reflection by column swap")
        w[:, [0, 1]] = w[:, [1, 0]]
        swapped = True

    angles = np.empty(n_angles(nt))
    k = 0
    for i in range(nt - 1):
        for j in range(i + 1, nt):
            theta = -math.atan2(-w[j, i], w[i, i])
            angles[k] = theta
            k += 1
            c, s = math.cos(theta), math.sin(theta)
            ri = w[i, :].copy()
            rj = w[j, :].copy()
            w[i, :] = c * ri + s * rj
            w[j, :] = -s * ri + c * rj
    return angles, swapped


def repair_improper(
    v: np.ndarray, lam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Turn a reflection into a proper rotation without changing ``V L V^T``.

    Exchanges the last two eigenvector columns and the matching eigenvalue
    entries, which negates the determinant and leaves the reconstructed
    symmetric matrix untouched.  Calling this on a matrix that is already a
    proper rotation is a no-op with a warning.
    """
    v = np.asarray(v, dtype=float)
    lam = np.asarray(lam, dtype=float).ravel()
    if v.shape != (lam.size, lam.size):
        raise ValueError(
            f"shape mismatch: V is {v.shape}, eigenvalue vector has {lam.size}"
        )
    if np.linalg.det(v) > 0:
        warnings.warn(
            "repair_improper called on a proper rotation; returning input unchanged",
            stacklevel=2,
        )
        return v.copy(), lam.copy()
    if lam.size < 2:
        raise ValueError("cannot repair a 1x1 reflection by column swap")
    v2 = v.copy()
    v2[:, [-2, -1]] = v2[:, [-1, -2]]
    lam2 = lam.copy()
    lam2[[-2, -1]] = lam2[[-1, -2]]
    return v2, lam2


def sym_eig(
    q: np.ndarray, tol: float = 1e-12, max_sweeps: int = 50
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric eigendecomposition by cyclic Jacobi sweeps.

    Returns ``(V, lam)`` with eigenvalues sorted descending and
    ``V @ diag(lam) @ V.T`` reconstructing the input.  Convergence is
    declared when the largest off-diagonal magnitude falls below ``tol``
    scaled by the matrix magnitude; the sweep budget caps at
    ``max_sweeps``.

    Raises ``ValueError`` for non-symmetric input and ``NumericalError``
    if the sweep budget is exhausted.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {q.shape}")
    asym = np.abs(q - q.T).max() if q.size else 0.0
    if asym > 1e-10:
        raise ValueError(f"matrix is not symmetric: max |Q - Q^T| = {asym:.3e}")

    n = q.shape[0]
    a = 0.5 * (q + q.T)
    v = np.eye(n)
    if n == 1:
        return v, a.diagonal().copy()

    scale = max(1.0, np.abs(a).max())
    iu = np.triu_indices(n, k=1)
    off = np.abs(a[iu]).max()
    converged = off <= tol * scale
    for _ in range(max_sweeps):
        if converged:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                aij = a[i, j]
                if abs(aij) <= 0.01 * tol * scale:
                    continue
                tau = (a[j, j] - a[i, i]) / (2.0 * aij)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ri = a[i, :].copy()
                rj = a[j, :].copy()
                a[i, :] = c * ri - s * rj
                a[j, :] = s * ri + c * rj
                ci = a[:, i].copy()
                cj = a[:, j].copy()
                a[:, i] = c * ci - s * cj
                a[:, j] = s * ci + c * cj
                a[i, j] = 0.0
                a[j, i] = 0.0
                vi = v[:, i].copy()
                vj = v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj
        off = np.abs(a[iu]).max()
        converged = off <= tol * scale
    if not converged:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {max_sweeps} sweeps: "
            f"max off-diagonal {off:.3e} (threshold {tol * scale:.3e})"
        )

    lam = a.diagonal().copy()
    order = np.argsort(-lam, kind="stable")
    return v[:, order], lam[order]
