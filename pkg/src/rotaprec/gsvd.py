"""Generalized SVD beamforming: baseline precoder and optimizer warm start.

A joint factorization of the channel pair exposes per-subchannel gains: a
precoding matrix ``E`` with ``H E = Psi_r C`` and ``G E = Psi_e D`` where
``C^T C = diag(c)``, ``D^T D = diag(d)`` and ``c_i + d_i = 1``.  Power goes
only to subchannels where the legitimate gain exceeds the eavesdropper's
(``c_i > d_i``), with per-subchannel amounts set by a water-filling rule
whose Lagrange multiplier is found by bisection on the total-power trace.

Construction route: thin SVD of the stacked matrix ``[H; G]`` gives a
column-orthonormal factor, and the cosine-sine split of its two row blocks
yields ``Psi_r, C, Psi_e, D`` with the cosines sorted descending (so the
ratios ``c_i / d_i`` come out descending as well).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelPair, PrecoderSolution, secrecy_rate_Q
from .errors import NumericalError
from .rotations import RotationParams, extract_angles, repair_improper, sym_eig

__all__ = [
    "GsvdFactors",
    "GsvdPowerAllocation",
    "gsvd_decompose",
    "gsvd_power_alloc",
    "gsvd_init",
]

_RESIDUAL_TOL = 1e-8


@dataclass(eq=False)
class GsvdFactors:
    """Joint factors of a channel pair.

    ``E`` is ``nt x q`` where ``q`` is the effective rank of the stacked
    pair (``min(nt, nr + ne)`` for generic inputs, smaller on rank-deficient
    ones).  ``c``, ``d`` and ``e`` hold the diagonals of ``C^T C``,
    ``D^T D`` and ``E^T E``; ``cmat``/``dmat`` are the rectangular factors
    themselves so the residual contracts can be checked directly.
    """

    E: np.ndarray
    psi_r: np.ndarray
    psi_e: np.ndarray
    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    cmat: np.ndarray
    dmat: np.ndarray

    @property
    def q(self) -> int:
        return self.E.shape[1]


@dataclass(eq=False)
class GsvdPowerAllocation:
    """Per-subchannel powers and the multiplier that met the budget.

    ``mu`` is ``inf`` when no subchannel is active (all ``c_i <= d_i`` or a
    zero budget); ``p`` is then all zeros and the achievable rate is zero.
    """

    p: np.ndarray
    mu: float

    @property
    def active(self) -> bool:
        return bool(self.p.sum() > 0.0)


def _complete_orthonormal(partial: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full square orthonormal basis.

    Deterministic: each new column is the identity direction with the
    largest residual after projection, re-orthogonalized twice.
    """
    n, k = partial.shape
    basis = np.zeros((n, n))
    basis[:, :k] = partial
    for col in range(k, n):
        have = basis[:, :col]
        resids = np.eye(n) - have @ (have.T @ np.eye(n))
        norms = np.linalg.norm(resids, axis=0)
        pick = int(np.argmax(norms))
        vec = resids[:, pick]
        vec -= have @ (have.T @ vec)  # second pass for stability
        nrm = np.linalg.norm(vec)
        if nrm < 1e-12:
            raise NumericalError("orthonormal completion failed")
        basis[:, col] = vec / nrm
    return basis


def gsvd_decompose(ch: ChannelPair, rtol: float = 1e-10) -> GsvdFactors:
    """Factor a channel pair into the joint form above.

    Raises ``NumericalError`` when the stacked pair is identically zero or
    when a factor residual exceeds the 1e-8 contract.
    """
    h, g = ch.H, ch.G
    nr, ne = ch.nr, ch.ne
    stacked = np.vstack([h, g])
    p, s, wt = np.linalg.svd(stacked, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise NumericalError("cannot factor an all-zero channel pair")
    k = int(np.sum(s > rtol * s[0]))
    if k == 0:
        raise NumericalError("stacked channel pair is numerically rank zero")
    p = p[:, :k]
    s = s[:k]
    wk = wt[:k].T  # nt x k

    p1 = p[:nr, :]
    p2 = p[nr:, :]
    psi_r, cos_vals, z1t = np.linalg.svd(p1, full_matrices=True)
    z1 = z1t.T  # k x k

    c_diag = np.zeros(k)
    c_diag[: cos_vals.size] = cos_vals
    cmat = np.zeros((nr, k))
    m = min(nr, k)
    cmat[np.arange(m), np.arange(m)] = cos_vals[:m]

    t = p2 @ z1  # ne x k, mutually orthogonal columns
    sin_vals = np.linalg.norm(t, axis=0)

    dmat = np.zeros((ne, k))
    active_cols = [int(i) for i in np.flatnonzero(sin_vals > 1e-10)]
    if len(active_cols) > ne:
        raise NumericalError(
            f"cosine-sine split produced {len(active_cols)} sine columns "
            f"for ne={ne}"
        )
    partial = np.zeros((ne, len(active_cols)))
    for row, col in enumerate(active_cols):
        partial[:, row] = t[:, col] / sin_vals[col]
        dmat[row, col] = sin_vals[col]
    psi_e = _complete_orthonormal(partial)

    e_mat = wk @ (z1 / s[:, None])
    c = c_diag**2
    d = sin_vals**2
    e = np.einsum("ij,ij->j", e_mat, e_mat)

    r_h = np.abs(h @ e_mat - psi_r @ cmat).max()
    r_g = np.abs(g @ e_mat - psi_e @ dmat).max()
    r_cd = np.abs(c + d - 1.0).max()
    worst = max(r_h, r_g, r_cd)
    if worst > _RESIDUAL_TOL:
        raise NumericalError(
            f"factor residuals exceed tolerance: |HE - Psi_r C| = {r_h:.3e}, "
            f"|GE - Psi_e D| = {r_g:.3e}, |c + d - 1| = {r_cd:.3e}"
        )
    return GsvdFactors(e_mat, psi_r, psi_e, c, d, e, cmat, dmat)


def _powers_at(
    mu: float, c: np.ndarray, d: np.ndarray, e: np.ndarray
) -> np.ndarray:
    """Water-filling powers of active subchannels at multiplier ``mu``."""
    x = (c - d) / (mu * e)
    disc = 1.0 - 4.0 * c * d + 4.0 * x * c * d
    safe = np.maximum(disc, 0.0)
    p = np.maximum(0.0, (2.0 * x - 2.0) / (1.0 + np.sqrt(safe)))
    return np.where(disc >= 0.0, p, 0.0)


def gsvd_power_alloc(
    factors: GsvdFactors,
    pt: float,
    *,
    bracket: tuple[float, float] = (1e-12, 1e6),
    max_iter: int = 200,
    rel_tol: float = 1e-8,
) -> GsvdPowerAllocation:
    """Allocate the power budget across active subchannels.

    The trace ``tr(E P E^T) = sum_i p_i e_i`` is monotone decreasing in the
    multiplier, so the budget equation is solved by bisection in log scale
    starting from ``bracket``, expanded if needed.  The powers are finally
    rescaled so the trace meets ``pt`` exactly.  Subchannels with
    ``c_i <= d_i`` or a null precoder column get zero power; if none is
    active the allocation is all-zero with an infinite multiplier.
    """
    if pt < 0:
        raise ValueError(f"power budget must be >= 0, got {pt}")
    q = factors.q
    p_full = np.zeros(q)
    active = (factors.c > factors.d) & (factors.e > 0.0)
    if pt == 0.0 or not active.any():
        return GsvdPowerAllocation(p_full, math.inf)

    ca, da, ea = factors.c[active], factors.d[active], factors.e[active]

    def trace_at(mu: float) -> float:
        return float((_powers_at(mu, ca, da, ea) * ea).sum())

    lo, hi = bracket
    expansions = 0
    while trace_at(hi) > pt:
        hi *= 10.0
        expansions += 1
        if expansions > 60:
            raise NumericalError("no upper bracket for the power multiplier")
    expansions = 0
    while trace_at(lo) < pt:
        lo /= 10.0
        expansions += 1
        if expansions > 60:
            raise NumericalError("no lower bracket for the power multiplier")

    for _ in range(max_iter):
        if hi - lo <= rel_tol * hi:
            break
        mid = math.sqrt(lo * hi)
        if trace_at(mid) > pt:
            lo = mid
        else:
            hi = mid
    mu = math.sqrt(lo * hi)

    powers = _powers_at(mu, ca, da, ea)
    total = float((powers * ea).sum())
    if total > 0.0:
        powers = powers * (pt / total)
    p_full[active] = powers
    return GsvdPowerAllocation(p_full, mu)


def gsvd_init(ch: ChannelPair, pt: float) -> tuple[RotationParams, PrecoderSolution]:
    """Baseline covariance ``E P E^T`` expressed in rotation coordinates.

    Eigendecomposes the baseline covariance, repairs an improper rotation
    factor if one appears, and extracts the canonical angles, so the result
    can seed the rotation optimizer directly.  The returned solution's rate
    is the baseline's achieved secrecy rate.
    """
    factors = gsvd_decompose(ch)
    alloc = gsvd_power_alloc(factors, pt)
    q0 = factors.E @ (alloc.p[:, None] * factors.E.T)
    q0 = 0.5 * (q0 + q0.T)
    v0, lam0 = sym_eig(q0)
    if np.linalg.det(v0) < 0:
        v0, lam0 = repair_improper(v0, lam0)
    theta0, _ = extract_angles(v0)
    rate0 = secrecy_rate_Q(ch, q0)
    solution = PrecoderSolution(
        Q=q0,
        V=v0,
        lam=lam0,
        theta=theta0,
        rate=rate0,
        iterations=0,
        converged=True,
    )
    return RotationParams(lam0, theta0), solution
