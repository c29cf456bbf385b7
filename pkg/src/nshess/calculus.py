"""Composition rules for Hessian estimates and their error bounds.

Instead of estimating the Hessian of a product, quotient or power from
scratch, these rules combine the per-factor Hessian estimates with gradient
information, mirroring the classical calculus identities. Two modes choose
where that gradient information comes from:

* simplex mode uses the least-squares gradient estimates over T;
* quadratic mode uses the gradient of the interpolating quadratic over the
  full sample grid, which is exact whenever the factor is a quadratic, at
  zero additional evaluations.

The matching ``calculus_error_bound`` evaluates per-rule worst-case bounds
from per-factor data. Each bound contains a minimum over several candidate
cross terms; candidates needing unavailable quantities are skipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .approx import HessianResult, nested_set_hessian, simplex_gradient
from .cache import EvaluationCache
from .config import settings
from .exceptions import NotPoisedError
from .quadmodel import QuadraticModel, interpolate_general
from .sets import (
    DirectionSet,
    PointSet,
    minimal_point_count,
    nshc_points,
    quadratic_basis_matrix,
)

__all__ = [
    "CalcMode",
    "RuleGeometry",
    "RuleFunctionData",
    "RuleBoundInputs",
    "gradient_constant",
    "hessian_constant",
    "model_gradient_constant",
    "quadratic_model_gradient",
    "product_hessian",
    "quotient_hessian",
    "power_hessian",
    "calculus_error_bound",
]

_SQRT2 = math.sqrt(2.0)


class CalcMode(Enum):
    SIMPLEX = "simplex"
    QUADRATIC = "quadratic"

    @classmethod
    def coerce(cls, value) -> "CalcMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"mode must be 'simplex' or 'quadratic', got {value!r}"
            ) from None


@dataclass(frozen=True)
class RuleGeometry:
    """Shared sampling-geometry factors entering every rule bound."""

    m: int
    k: int
    delta_u: float
    delta_l: float
    norm_s_hat_pinv: float
    norm_t_hat_pinv: float
    norm_t_pinv: float

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError("direction sets must be nonempty")
        if self.delta_l <= 0 or self.delta_u < self.delta_l:
            raise ValueError("radii must satisfy 0 < delta_l <= delta_u")

    @classmethod
    def from_sets(cls, s_set: DirectionSet, t_set: DirectionSet) -> "RuleGeometry":
        from . import linalg

        s_hat = s_set.normalized()
        t_hat = t_set.normalized()
        return cls(
            m=s_set.count,
            k=t_set.count,
            delta_u=max(s_set.radius, t_set.radius),
            delta_l=min(s_set.radius, t_set.radius),
            norm_s_hat_pinv=linalg.spectral_norm(linalg.pseudoinverse(s_hat.matrix.T)),
            norm_t_hat_pinv=linalg.spectral_norm(linalg.pseudoinverse(t_hat.matrix)),
            norm_t_pinv=linalg.spectral_norm(linalg.pseudoinverse(t_set.matrix.T)),
        )


@dataclass
class RuleFunctionData:
    """Per-factor quantities feeding a rule bound.

    ``grad_norm`` is the true gradient norm at ``x0`` when known.
    ``approx_grad_norm`` is the norm of whichever gradient estimate the
    mode uses (simplex estimate or model gradient). ``model_grad_constant``
    is the quadratic-mode gradient constant, user-supplied or computed by
    :func:`model_gradient_constant`. Optional fields left ``None`` simply
    disable the bound candidates that need them.
    """

    value: float
    lipschitz_grad: float | None = None
    lipschitz_hess: float | None = None
    grad_norm: float | None = None
    approx_grad_norm: float | None = None
    model_grad_constant: float | None = None


@dataclass
class RuleBoundInputs:
    f: RuleFunctionData
    geometry: RuleGeometry
    g: RuleFunctionData | None = None
    power: int | None = None


def gradient_constant(geometry: RuleGeometry, data: RuleFunctionData) -> float:
    """Simplex-mode gradient constant ``sqrt(k)/2 * L_grad * |pinv(T^T)|``.

    Uses the unnormalized pseudoinverse factor, so the product with
    ``delta_u`` is the gradient error allowance the rule bounds budget.
    """
    if data.lipschitz_grad is None:
        raise ValueError("gradient constant needs the Lipschitz constant of the gradient")
    return 0.5 * math.sqrt(geometry.k) * data.lipschitz_grad * geometry.norm_t_pinv


def hessian_constant(geometry: RuleGeometry, data: RuleFunctionData) -> float:
    """Hessian constant ``m sqrt(k)/3 * L_hess * (2 du/dl + 3) * norms``."""
    if data.lipschitz_hess is None:
        raise ValueError("Hessian constant needs the Lipschitz constant of the Hessian")
    ratio = 2.0 * geometry.delta_u / geometry.delta_l + 3.0
    return (
        (geometry.m * math.sqrt(geometry.k) / 3.0)
        * data.lipschitz_hess
        * ratio
        * geometry.norm_s_hat_pinv
        * geometry.norm_t_hat_pinv
    )


def model_gradient_constant(lipschitz_hess: float, points, x0) -> float:
    """Quadratic-mode gradient constant ``6 (1 + sqrt 2) sqrt(p) L |Qhat^-1|``.

    ``p`` is the number of interpolation points and ``Qhat`` the natural
    quadratic-basis matrix on the points shifted to ``x0`` and scaled by
    the largest distance from it. Multiplied by ``delta_u ** 2`` this
    budgets the model-gradient error at ``x0``.
    """
    if lipschitz_hess < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    pts = points.points if hasattr(points, "points") else np.asarray(points, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    p = pts.shape[0]
    scale = float(np.max(np.linalg.norm(pts - x0, axis=1)))
    basis, _, _ = quadratic_basis_matrix(pts, center=x0, scale=scale)
    svals = np.linalg.svd(basis, compute_uv=False)
    eps_cut = max(basis.shape) * np.finfo(float).eps * svals[0]
    if svals[-1] <= eps_cut:
        raise NotPoisedError("point set is not poised; model gradient constant undefined")
    inv_norm = 1.0 / float(svals[-1])
    return 6.0 * (1.0 + _SQRT2) * math.sqrt(p) * lipschitz_hess * inv_norm


def quadratic_model_gradient(
    cache: EvaluationCache, x0, s_set: DirectionSet, t_set: DirectionSet
) -> tuple[np.ndarray, QuadraticModel, PointSet]:
    """Model gradient at ``x0`` over the full sample grid of ``(S, T)``.

    The grid must consist of exactly ``(n+1)(n+2)/2`` distinct points and
    be poised; every value is read through the cache, so after a nested
    Hessian estimate this costs no new evaluations.
    """
    x0 = np.asarray(x0, dtype=float)
    pts = nshc_points(x0, s_set, t_set)
    need = minimal_point_count(pts.dim)
    if len(pts) != need:
        raise NotPoisedError(
            f"quadratic mode needs exactly {need} sample points, the sets generate {len(pts)}"
        )
    values = np.array([cache.evaluate(p) for p in pts])
    model = interpolate_general(pts, values, center=x0)
    return model.gradient(x0), model, pts


def _mode_gradients(
    caches: list[EvaluationCache],
    x0,
    s_set: DirectionSet,
    t_set: DirectionSet,
    mode: CalcMode,
) -> list[np.ndarray]:
    if mode is CalcMode.SIMPLEX:
        return [simplex_gradient(x0, t_set, c).gradient for c in caches]
    return [quadratic_model_gradient(c, x0, s_set, t_set)[0] for c in caches]


def _combined(
    h: np.ndarray,
    s_set: DirectionSet,
    t_set: DirectionSet,
    eval_count: int,
    symmetrize: bool,
) -> HessianResult:
    if symmetrize:
        h = 0.5 * (h + h.T)
    return HessianResult(
        hessian=h,
        s_set=s_set,
        t_set=t_set,
        delta_u=max(s_set.radius, t_set.radius),
        delta_l=min(s_set.radius, t_set.radius),
        eval_count=eval_count,
        symmetrized=symmetrize,
    )


def product_hessian(
    f_cache: EvaluationCache,
    g_cache: EvaluationCache,
    x0,
    s_set: DirectionSet,
    t_set: DirectionSet,
    mode=CalcMode.SIMPLEX,
    symmetrize: bool = False,
) -> HessianResult:
    """Hessian estimate of ``f * g`` assembled by the product rule."""
    mode = CalcMode.coerce(mode)
    x0 = np.asarray(x0, dtype=float)
    hf = nested_set_hessian(x0, s_set, t_set, f_cache, symmetrize)
    hg = nested_set_hessian(x0, s_set, t_set, g_cache, symmetrize)
    f0 = f_cache.evaluate(x0)
    g0 = g_cache.evaluate(x0)
    gf, gg = _mode_gradients([f_cache, g_cache], x0, s_set, t_set, mode)
    h = hf.hessian * g0 + np.outer(gf, gg) + np.outer(gg, gf) + hg.hessian * f0
    return _combined(
        h, s_set, t_set, f_cache.distinct_count + g_cache.distinct_count, symmetrize
    )


def quotient_hessian(
    f_cache: EvaluationCache,
    g_cache: EvaluationCache,
    x0,
    s_set: DirectionSet,
    t_set: DirectionSet,
    mode=CalcMode.SIMPLEX,
    symmetrize: bool = False,
) -> HessianResult:
    """Hessian estimate of ``f / g`` assembled by the quotient rule.

    Raises ``ZeroDivisionError`` when ``g(x0)`` vanishes at the point of
    interest (under ``settings.division_tol``).
    """
    mode = CalcMode.coerce(mode)
    x0 = np.asarray(x0, dtype=float)
    g0 = g_cache.evaluate(x0)
    if abs(g0) <= settings.division_tol:
        raise ZeroDivisionError(
            f"quotient rule: g(x0) = {g0!r} is zero at the point of interest"
        )
    hf = nested_set_hessian(x0, s_set, t_set, f_cache, symmetrize)
    hg = nested_set_hessian(x0, s_set, t_set, g_cache, symmetrize)
    f0 = f_cache.evaluate(x0)
    gf, gg = _mode_gradients([f_cache, g_cache], x0, s_set, t_set, mode)
    h = (
        g0 * g0 * hf.hessian
        - f0 * g0 * hg.hessian
        + 2.0 * f0 * np.outer(gg, gg)
        - g0 * (np.outer(gf, gg) + np.outer(gg, gf))
    ) / g0**3
    return _combined(
        h, s_set, t_set, f_cache.distinct_count + g_cache.distinct_count, symmetrize
    )


def power_hessian(
    f_cache: EvaluationCache,
    x0,
    s_set: DirectionSet,
    t_set: DirectionSet,
    p: int,
    mode=CalcMode.SIMPLEX,
    symmetrize: bool = False,
) -> HessianResult:
    """Hessian estimate of ``f ** p`` for integer ``p >= 2``."""
    mode = CalcMode.coerce(mode)
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ValueError(f"power rule needs an integer exponent p >= 2, got {p!r}")
    x0 = np.asarray(x0, dtype=float)
    hf = nested_set_hessian(x0, s_set, t_set, f_cache, symmetrize)
    f0 = f_cache.evaluate(x0)
    (gf,) = _mode_gradients([f_cache], x0, s_set, t_set, mode)
    lead = f0 ** (p - 1)
    cross = 1.0 if p == 2 else f0 ** (p - 2)
    h = p * lead * hf.hessian + p * (p - 1) * cross * np.outer(gf, gf)
    return _combined(h, s_set, t_set, f_cache.distinct_count, symmetrize)


def _min_available(candidates: list[float | None], label: str) -> float:
    usable = [c for c in candidates if c is not None]
    if not usable:
        raise ValueError(
            f"no computable candidate for the {label} cross-term minimum; "
            "supply gradient norms or estimate norms"
        )
    return min(usable)


def _grad_budget(mode: CalcMode, geometry: RuleGeometry, data: RuleFunctionData) -> float:
    """Constant whose product with the mode's step power budgets gradient error."""
    if mode is CalcMode.SIMPLEX:
        return gradient_constant(geometry, data)
    if data.model_grad_constant is None:
        raise ValueError(
            "quadratic mode needs model_grad_constant "
            "(see model_gradient_constant) for each factor"
        )
    return data.model_grad_constant


def _cross_minimum(
    rule: str,
    mode: CalcMode,
    geometry: RuleGeometry,
    f: RuleFunctionData,
    g: RuleFunctionData | None,
) -> float:
    du = geometry.delta_u
    step = du if mode is CalcMode.SIMPLEX else du * du
    ef = _grad_budget(mode, geometry, f)

    if rule == "power":
        cands = [
            None if f.grad_norm is None else ef * step + 2.0 * f.grad_norm,
            None
            if (f.approx_grad_norm is None or f.grad_norm is None)
            else f.approx_grad_norm + f.grad_norm,
        ]
        return _min_available(cands, "power rule")

    assert g is not None
    eg = _grad_budget(mode, geometry, g)
    cands = [
        None
        if (f.grad_norm is None or g.grad_norm is None)
        else ef * eg * step + eg * f.grad_norm + ef * g.grad_norm,
        None
        if (g.approx_grad_norm is None or f.grad_norm is None)
        else ef * g.approx_grad_norm + eg * f.grad_norm,
        None
        if (f.approx_grad_norm is None or g.grad_norm is None)
        else eg * f.approx_grad_norm + ef * g.grad_norm,
    ]
    if rule == "quotient":
        ehg = hessian_constant(geometry, g)
        extra_first = ehg * du if mode is CalcMode.SIMPLEX else ehg
        cands.append(None if g.grad_norm is None else extra_first + 2.0 * eg * g.grad_norm)
        cands.append(
            None
            if (g.approx_grad_norm is None or g.grad_norm is None)
            else eg * g.approx_grad_norm + eg * g.grad_norm
        )
    return _min_available(cands, f"{rule} rule")


def calculus_error_bound(rule: str, mode, inputs: RuleBoundInputs) -> float:
    """Worst-case error of the composed Hessian estimate at ``x0``.

    ``rule`` is one of ``product``, ``quotient``, ``power``. Simplex and
    quadratic modes budget the gradient errors differently, which shifts a
    step factor inside the cross term. Missing Lipschitz constants (or a
    missing model-gradient constant in quadratic mode) are rejected.
    """
    mode = CalcMode.coerce(mode)
    geometry = inputs.geometry
    f = inputs.f
    du = geometry.delta_u
    ehf = hessian_constant(geometry, f)
    m_step = 1.0 if mode is CalcMode.SIMPLEX else du

    if rule == "product":
        if inputs.g is None:
            raise ValueError("product rule needs data for both factors")
        g = inputs.g
        ehg = hessian_constant(geometry, g)
        m_min = _cross_minimum(rule, mode, geometry, f, g)
        return (ehf * abs(g.value) + ehg * abs(f.value) + 2.0 * m_min * m_step) * du

    if rule == "quotient":
        if inputs.g is None:
            raise ValueError("quotient rule needs data for both factors")
        g = inputs.g
        if g.value == 0:
            raise ValueError("quotient bound undefined when g(x0) is zero")
        ehg = hessian_constant(geometry, g)
        m_min = _cross_minimum(rule, mode, geometry, f, g)
        g0 = g.value
        core = (
            ehf * g0 * g0
            + ehg * abs(f.value * g0 * g0)
            + 2.0 * m_min * (abs(f.value) + abs(g0)) * m_step
        )
        return core * du / abs(g0) ** 3

    if rule == "power":
        p = inputs.power
        if not isinstance(p, (int, np.integer)) or p < 2:
            raise ValueError(f"power rule needs an integer exponent p >= 2, got {p!r}")
        m_min = _cross_minimum(rule, mode, geometry, f, None)
        ef = _grad_budget(mode, geometry, f)
        lead = abs(f.value) ** (p - 1)
        cross = 1.0 if p == 2 else abs(f.value) ** (p - 2)
        return (p * ehf * lead + p * (p - 1) * ef * cross * m_min * m_step) * du

    raise ValueError(f"unknown rule {rule!r}; expected product, quotient or power")
