"""Channel pairs, random draws, and the secrecy-rate objective.

The model is real-valued: a legitimate receiver sees ``y_r = H x + w_r``
and an eavesdropper sees ``y_e = G x + w_e`` with unit-variance Gaussian
noise.  For a transmit covariance ``Q`` the achievable secrecy rate is

    R(Q) = 1/2 log2 det(I + H Q H^T) - 1/2 log2 det(I + G Q G^T)

in bits/s/Hz (the 1/2 prefactor is the real-signal convention).  Two
evaluators are provided: one over the factored form ``(V, lam)`` working in
``nt x nt`` determinants, and one over ``Q`` itself working in receiver-side
determinants; by the determinant identity ``det(I + XY) = det(I + YX)``
they agree, which the tests exploit as a cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericalError

__all__ = [
    "ChannelPair",
    "PrecoderSolution",
    "draw_channel",
    "secrecy_rate",
    "secrecy_rate_Q",
    "load_matrix",
    "save_matrix",
]

_LN2 = math.log(2.0)


@dataclass(eq=False)
class ChannelPair:
    """Legitimate channel ``H`` (nr x nt) and eavesdropper channel ``G`` (ne x nt)."""

    H: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        self.G = np.asarray(self.G, dtype=float)
        if self.H.ndim != 2 or self.G.ndim != 2:
            raise ValueError("H and G must be 2-D matrices")
        if self.H.shape[1] != self.G.shape[1]:
            raise ValueError(
                f"H and G must share a column count: H is {self.H.shape}, "
                f"G is {self.G.shape}"
            )
        if min(self.H.shape) < 1 or min(self.G.shape) < 1:
            raise ValueError("antenna counts must be >= 1")
        if not (np.isfinite(self.H).all() and np.isfinite(self.G).all()):
            raise ValueError("channel matrices must be finite")

    @property
    def nt(self) -> int:
        return self.H.shape[1]

    @property
    def nr(self) -> int:
        return self.H.shape[0]

    @property
    def ne(self) -> int:
        return self.G.shape[0]


@dataclass(eq=False)
class PrecoderSolution:
    """Transmit covariance with its rotation factors and achieved rate."""

    Q: np.ndarray
    V: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    rate: float
    iterations: int
    converged: bool


def draw_channel(nt: int, nr: int, ne: int, seed: int) -> ChannelPair:
    """Draw an i.i.d. standard-normal channel pair from a seeded PCG64 stream.

    ``H`` is filled first (row-major), then ``G``; the same seed reproduces
    the matrices bit-for-bit on any platform.
    """
    if min(nt, nr, ne) < 1:
        raise ValueError(f"antenna counts must be >= 1, got {(nt, nr, ne)}")
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((nr, nt))
    g = rng.standard_normal((ne, nt))
    return ChannelPair(h, g)


def _logdet_spd(m: np.ndarray) -> float:
    """log det of a symmetric positive-definite matrix via Cholesky pivots."""
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed: {exc}") from exc
    return 2.0 * float(np.log(chol.diagonal()).sum())


def secrecy_rate(ch: ChannelPair, v: np.ndarray, lam: np.ndarray) -> float:
    """Secrecy rate of the factored covariance ``V diag(lam) V^T`` in bits/s/Hz.

    Evaluated through ``nt x nt`` determinants
    ``det(I + (H V S)^T (H V S))`` with ``S = diag(sqrt(lam))``, which keeps
    the factored arguments symmetric positive-definite for the Cholesky
    log-determinant even at large power.
    """
    lam = np.asarray(lam, dtype=float).ravel()
    v = np.asarray(v, dtype=float)
    nt = ch.nt
    if lam.size != nt or v.shape != (nt, nt):
        raise ValueError(
            f"factor shapes {v.shape}/{lam.size} do not match nt={nt}"
        )
    if not (np.isfinite(v).all() and np.isfinite(lam).all()):
        raise ValueError("rotation factors must be finite")
    if np.any(lam < 0.0):
        raise ValueError(f"eigenvalues must be non-negative, got min {lam.min():.3e}")
    w = v * np.sqrt(lam)
    hw = ch.H @ w
    gw = ch.G @ w
    eye = np.eye(nt)
    num = _logdet_spd(eye + hw.T @ hw)
    den = _logdet_spd(eye + gw.T @ gw)
    return (num - den) / (2.0 * _LN2)


def secrecy_rate_Q(ch: ChannelPair, q: np.ndarray) -> float:
    """Secrecy rate of a covariance matrix ``Q`` in bits/s/Hz.

    Works in the receiver-side determinants ``det(I + H Q H^T)`` and
    ``det(I + G Q G^T)``; ``Q`` must be symmetric positive semidefinite
    within tolerance.
    """
    q = np.asarray(q, dtype=float)
    nt = ch.nt
    if q.shape != (nt, nt):
        raise ValueError(f"Q has shape {q.shape}, expected {(nt, nt)}")
    if not np.isfinite(q).all():
        raise ValueError("Q must be finite")
    asym = np.abs(q - q.T).max()
    if asym > 1e-9:
        raise ValueError(f"Q is not symmetric: max |Q - Q^T| = {asym:.3e}")
    qs = 0.5 * (q + q.T)
    min_eig = float(np.linalg.eigvalsh(qs).min())
    if min_eig < -1e-6:
        raise ValueError(f"Q is not PSD: smallest eigenvalue {min_eig:.3e}")
    a = np.eye(ch.nr) + ch.H @ qs @ ch.H.T
    b = np.eye(ch.ne) + ch.G @ qs @ ch.G.T
    num = _logdet_spd(0.5 * (a + a.T))
    den = _logdet_spd(0.5 * (b + b.T))
    return (num - den) / (2.0 * _LN2)


def load_matrix(path: str | Path) -> np.ndarray:
    """Read a matrix from JSON ``{"rows", "cols", "data"}`` or CSV text.

    The JSON form stores the entries row-major; CSV is one row per line
    with comma-separated values.
    """
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON matrix: {exc}") from exc
        try:
            rows, cols = int(obj["rows"]), int(obj["cols"])
            data = [float(x) for x in obj["data"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(
                f"{path}: JSON matrix needs 'rows', 'cols' and a 'data' array"
            ) from exc
        if len(data) != rows * cols:
            raise ValueError(
                f"{path}: data length {len(data)} != rows*cols = {rows * cols}"
            )
        return np.asarray(data, dtype=float).reshape(rows, cols)
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: invalid CSV row: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged CSV rows")
    return np.asarray(rows, dtype=float)


def save_matrix(path: str | Path, m: np.ndarray) -> None:
    """Write a matrix as JSON with 17-significant-digit decimal entries.

    17 significant digits make the decimal form round-trip bit-exactly for
    IEEE doubles.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    entries = ", ".join(f"{x:.17g}" for x in m.ravel())
    text = f'{{"rows": {m.shape[0]}, "cols": {m.shape[1]}, "data": [{entries}]}}\n'
    Path(path).write_text(text, encoding="utf-8")
