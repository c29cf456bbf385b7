"""Dense small-matrix kernel used by the rest of the library.

Matrices are plain numpy arrays, validated to be 2-D, nonempty and finite.
The pseudoinverse goes through an SVD with a relative singular-value cutoff
so rank-deficient input is handled without special cases.
"""

from __future__ import annotations

import numpy as np

from .config import settings
from .exceptions import RankDeficientError

__all__ = [
    "pseudoinverse",
    "spectral_norm",
    "frobenius_norm",
    "rank",
    "solve",
]


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-D array, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _cutoff(singular_values: np.ndarray, shape) -> float:
    rtol = settings.rank_rtol
    if rtol is None:
        rtol = max(shape) * np.finfo(float).eps
    top = singular_values[0] if singular_values.size else 0.0
    return rtol * top


def pseudoinverse(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below ``max(rows, cols) * eps * sigma_max`` are
    treated as zero (override through ``settings.rank_rtol``).
    """
    m = _as_matrix(a)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    cut = _cutoff(s, m.shape)
    inv = np.zeros_like(s)
    keep = s > cut
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def spectral_norm(a) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(_as_matrix(a), 2))


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(_as_matrix(a), "fro"))


def rank(a, tol: float | None = None) -> int:
    """Number of singular values above ``tol * sigma_max``.

    ``tol=None`` uses the machine-precision default shared with
    :func:`pseudoinverse`.
    """
    m = _as_matrix(a)
    s = np.linalg.svd(m, compute_uv=False)
    if tol is None:
        cut = _cutoff(s, m.shape)
    else:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        cut = tol * (s[0] if s.size else 0.0)
    return int(np.count_nonzero(s > cut))


def solve(a, b, name: str = "matrix") -> np.ndarray:
    """Solve ``a @ x = b`` for square ``a`` through a factorization.

    Raises :class:`RankDeficientError` when ``a`` is singular under the
    library rank tolerance, naming the offending matrix.
    """
    m = _as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square to solve, got shape {m.shape}")
    r = rank(m)
    if r < m.shape[0]:
        raise RankDeficientError(name, r, m.shape[0])
    return np.linalg.solve(m, np.asarray(b, dtype=float))
