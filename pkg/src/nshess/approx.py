"""Generalized simplex gradients and nested-set Hessian estimates.

The gradient estimate over a direction set T solves, in the least-squares
sense, the system that matches forward differences of f along the columns
of T. Nesting an outer set S around it yields a Hessian estimate: row i of
the difference matrix compares the gradient estimate at ``x0 + s_i`` with
the one at ``x0``, and the pseudoinverse of ``S^T`` maps those rows back
to second-derivative coordinates.

All sampling goes through a shared :class:`~nshess.cache.EvaluationCache`
so that coincident points across the inner gradients are evaluated once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .cache import EvaluationCache
from .exceptions import RankDeficientError
from .sets import DirectionSet, dedup_tolerance

__all__ = [
    "GradientResult",
    "HessianResult",
    "delta_f",
    "simplex_gradient",
    "nested_set_hessian",
]


@dataclass(frozen=True, eq=False)
class GradientResult:
    gradient: np.ndarray
    set_radius: float
    eval_count: int


@dataclass(frozen=True, eq=False)
class HessianResult:
    """Hessian estimate plus the provenance needed to reason about it.

    ``eval_count`` is the distinct-evaluation total of the cache when the
    estimate finished. ``bound`` stays ``None`` unless a caller fills in a
    theoretical error bound. The raw estimate is generally asymmetric;
    ``symmetrized`` records whether ``(H + H^T) / 2`` was applied.
    """

    hessian: np.ndarray
    s_set: DirectionSet
    t_set: DirectionSet
    delta_u: float
    delta_l: float
    eval_count: int
    symmetrized: bool
    bound: float | None = None


def _base_point(x0) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1:
        raise ValueError(f"x0 must be a 1-D point, got shape {x0.shape}")
    return x0


def _differences(base: np.ndarray, t_set: DirectionSet, cache: EvaluationCache) -> np.ndarray:
    f0 = cache.evaluate(base)
    return np.array(
        [cache.evaluate(base + t_set.column(j)) - f0 for j in range(t_set.count)]
    )


def _require_full_row_rank(d: DirectionSet, name: str) -> None:
    r = linalg.rank(d.matrix)
    if r < d.dim:
        raise RankDeficientError(name, r, d.dim)


def delta_f(x0, t_set: DirectionSet, cache: EvaluationCache) -> np.ndarray:
    """Forward differences ``f(x0 + t_j) - f(x0)`` along the columns of T."""
    x0 = _base_point(x0)
    if x0.shape[0] != t_set.dim:
        raise ValueError(f"x0 has dimension {x0.shape[0]}, T expects {t_set.dim}")
    cache.ensure_tolerance(dedup_tolerance(x0, t_set))
    return _differences(x0, t_set, cache)


def simplex_gradient(x0, t_set: DirectionSet, cache: EvaluationCache) -> GradientResult:
    """Least-squares gradient estimate from forward differences over T.

    T must have full row rank (at least n columns spanning R^n); the
    estimate is ``pinv(T^T) @ delta_f``, which reduces to the exact solve
    when T is square.
    """
    x0 = _base_point(x0)
    if x0.shape[0] != t_set.dim:
        raise ValueError(f"x0 has dimension {x0.shape[0]}, T expects {t_set.dim}")
    _require_full_row_rank(t_set, "T")
    cache.ensure_tolerance(dedup_tolerance(x0, t_set))
    d = _differences(x0, t_set, cache)
    g = linalg.pseudoinverse(t_set.matrix.T) @ d
    return GradientResult(g, t_set.radius, cache.distinct_count)


def nested_set_hessian(
    x0,
    s_set: DirectionSet,
    t_set: DirectionSet,
    cache: EvaluationCache,
    symmetrize: bool = False,
) -> HessianResult:
    """Hessian estimate from gradient estimates nested over an outer set S.

    Both S and T must have full row rank. The estimate is exact on
    quadratics for any such pair. ``symmetrize=True`` replaces the raw
    matrix with its symmetric part; the default reports the estimate as
    defined, which is generally asymmetric on non-quadratic functions.
    """
    x0 = _base_point(x0)
    n = x0.shape[0]
    if s_set.dim != n or t_set.dim != n:
        raise ValueError(
            f"dimension mismatch: x0 in R^{n}, S in R^{s_set.dim}, T in R^{t_set.dim}"
        )
    _require_full_row_rank(s_set, "S")
    _require_full_row_rank(t_set, "T")
    cache.ensure_tolerance(dedup_tolerance(x0, s_set, t_set))

    t_pinv = linalg.pseudoinverse(t_set.matrix.T)
    g0 = t_pinv @ _differences(x0, t_set, cache)
    rows = []
    for i in range(s_set.count):
        base = x0 + s_set.column(i)
        gi = t_pinv @ _differences(base, t_set, cache)
        rows.append(gi - g0)
    h = linalg.pseudoinverse(s_set.matrix.T) @ np.vstack(rows)
    if symmetrize:
        h = 0.5 * (h + h.T)
    delta_u = max(s_set.radius, t_set.radius)
    delta_l = min(s_set.radius, t_set.radius)
    return HessianResult(
        hessian=h,
        s_set=s_set,
        t_set=t_set,
        delta_u=delta_u,
        delta_l=delta_l,
        eval_count=cache.distinct_count,
        symmetrized=symmetrize,
    )
