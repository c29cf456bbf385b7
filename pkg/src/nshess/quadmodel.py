"""Quadratic interpolation models over minimal evaluation point sets.

Two routes to the same model: a general solver that interpolates any poised
set of ``(n+1)(n+2)/2`` points, and a closed-form assembly that reuses the
function values a nested Hessian estimate already paid for, so the model
costs zero additional evaluations when the geometry is the folded pairing
``(S, U_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .cache import EvaluationCache
from .config import settings
from .exceptions import NotPoisedError, RankDeficientError
from .sets import (
    DirectionSet,
    PointSet,
    build_uk,
    dedup_tolerance,
    minimal_point_count,
    quadratic_basis_matrix,
)

__all__ = [
    "QuadraticModel",
    "interpolate_general",
    "interpolate_minimal",
    "model_gradient",
]


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """Quadratic ``q(x) = alpha0 + alpha . x + x . hessian . x / 2``.

    The Hessian block is stored exactly symmetric.
    """

    alpha0: float
    alpha: np.ndarray
    hessian: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float, copy=True)
        h = np.array(self.hessian, dtype=float, copy=True)
        if a.ndim != 1 or h.shape != (a.shape[0], a.shape[0]):
            raise ValueError(f"inconsistent model shapes: alpha {a.shape}, hessian {h.shape}")
        if not (np.isfinite(a).all() and np.isfinite(h).all() and np.isfinite(self.alpha0)):
            raise ValueError("model coefficients contain non-finite entries")
        h = 0.5 * (h + h.T)
        a.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "hessian", h)
        object.__setattr__(self, "alpha0", float(self.alpha0))

    @property
    def dim(self) -> int:
        return self.alpha.shape[0]

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.alpha0 + self.alpha @ x + 0.5 * x @ self.hessian @ x)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.alpha + self.hessian @ x

    def to_record(self) -> dict:
        """Flat record: alpha0, alpha, and the upper triangle of the Hessian."""
        n = self.dim
        upper = [float(self.hessian[i, j]) for i in range(n) for j in range(i, n)]
        return {
            "alpha0": self.alpha0,
            "alpha": [float(v) for v in self.alpha],
            "hessian_upper": upper,
        }


def model_gradient(model: QuadraticModel, x) -> np.ndarray:
    """Gradient of the model at ``x``: ``alpha + hessian @ x``."""
    return model.gradient(x)


def interpolate_general(points: PointSet, values, center=None) -> QuadraticModel:
    """Solve the full interpolation system on a poised minimal point set.

    Coordinates are shifted and scaled before the solve and the
    coefficients mapped back, which keeps the system well conditioned
    regardless of where the cluster sits. Raises
    :class:`~nshess.exceptions.NotPoisedError` when the set does not
    determine a unique quadratic.
    """
    n = points.dim
    need = minimal_point_count(n)
    if len(points) != need:
        raise NotPoisedError(
            f"interpolation needs exactly {need} points in R^{n}, got {len(points)}"
        )
    vals = np.asarray(values, dtype=float)
    if vals.shape != (need,):
        raise ValueError(f"values must have shape ({need},), got {vals.shape}")
    if not np.isfinite(vals).all():
        raise ValueError("values contain non-finite entries")

    basis, c, r = quadratic_basis_matrix(points.points, center)
    if linalg.rank(basis) < need:
        raise NotPoisedError("point set is not poised for quadratic interpolation")
    coef = np.linalg.solve(basis, vals)
    residual = float(np.max(np.abs(basis @ coef - vals)))
    if residual > settings.residual_rtol * (1.0 + float(np.max(np.abs(vals)))):
        raise NotPoisedError(f"interpolation residual {residual:.3e} exceeds tolerance")

    a0 = coef[0]
    a = coef[1 : n + 1]
    b = np.zeros((n, n))
    pos = n + 1
    for i in range(n):
        for j in range(i, n):
            if i == j:
                b[i, i] = coef[pos]
            else:
                b[i, j] = coef[pos]
                b[j, i] = coef[pos]
            pos += 1

    hessian = b / (r * r)
    alpha = a / r - (b @ c) / (r * r)
    alpha0 = a0 - (a @ c) / r + 0.5 * (c @ b @ c) / (r * r)
    return QuadraticModel(alpha0, alpha, hessian)


def interpolate_minimal(x0, s_set: DirectionSet, k: int, cache: EvaluationCache) -> QuadraticModel:
    """Closed-form model over the folded sample grid of ``(S, U_k)``.

    Assembles the curvature matrix directly from second differences of the
    cached values, then maps it back through two triangular-factor solves
    with ``S^T``. Every function value it touches lies on the nested
    Hessian sample grid, so a cache shared with that estimate is not asked
    for anything new.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[0] if x0.ndim == 1 else -1
    if x0.ndim != 1 or s_set.dim != n:
        raise ValueError(f"x0 must be a point in R^{s_set.dim}, got shape {x0.shape}")
    if s_set.count != n:
        raise ValueError(f"S must be square for the closed form, got {s_set.dim} x {s_set.count}")
    r = linalg.rank(s_set.matrix)
    if r < n:
        raise RankDeficientError("S", r, n)
    u_set = build_uk(s_set, k)
    cache.ensure_tolerance(dedup_tolerance(x0, s_set, u_set))

    # Sample points are built as (x0 + s_i) + t_j, matching the nested
    # Hessian's arithmetic so shared caches hit bitwise.
    f0 = cache.evaluate(x0)
    bases = [x0 + s_set.column(i) for i in range(n)]
    fs = np.array([cache.evaluate(b) for b in bases])

    hhat = np.zeros((n, n))
    if k == 0:
        for i in range(n):
            hhat[i, i] = cache.evaluate(bases[i] + u_set.column(i)) - 2.0 * fs[i] + f0
            for j in range(i + 1, n):
                hhat[i, j] = cache.evaluate(bases[i] + u_set.column(j)) - fs[i] - fs[j] + f0
                hhat[j, i] = hhat[i, j]
    else:
        kk = k - 1
        f_minus = cache.evaluate(x0 + u_set.column(kk))
        f_shift = np.zeros(n)
        for i in range(n):
            if i == kk:
                continue
            f_shift[i] = cache.evaluate(bases[i] + u_set.column(kk))
        hhat[kk, kk] = fs[kk] + f_minus - 2.0 * f0
        for i in range(n):
            if i == kk:
                continue
            hhat[i, kk] = -f_shift[i] + fs[i] + f_minus - f0
            hhat[kk, i] = hhat[i, kk]
            hhat[i, i] = cache.evaluate(bases[i] + u_set.column(i)) - 2.0 * f_shift[i] + f_minus
            for j in range(i + 1, n):
                if j == kk:
                    continue
                hhat[i, j] = (
                    cache.evaluate(bases[i] + u_set.column(j)) - f_shift[i] - f_shift[j] + f_minus
                )
                hhat[j, i] = hhat[i, j]

    st = s_set.matrix.T
    w = linalg.solve(st, hhat, name="S^T")
    hessian = linalg.solve(st, w.T, name="S^T").T
    hessian = 0.5 * (hessian + hessian.T)

    abar = np.array(
        [
            fs[i] - f0 - 0.5 * hhat[i, i] - x0 @ hessian @ s_set.column(i)
            for i in range(n)
        ]
    )
    alpha = linalg.solve(st, abar, name="S^T")
    alpha0 = f0 - alpha @ x0 - 0.5 * (x0 @ hessian @ x0)
    return QuadraticModel(alpha0, alpha, hessian)
