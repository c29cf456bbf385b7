"""Worst-case error bounds for the gradient and Hessian estimates.

The bounds take Lipschitz constants of the true derivatives on a ball
covering every sample point, together with conditioning factors of the
normalized direction sets. Factors default to spectral norms computed from
the actual sets; Frobenius norms give looser but cheaper certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .sets import DirectionSet

__all__ = [
    "BoundInputs",
    "error_bound_gsg",
    "error_bound_nsh",
    "error_bound_canonical",
]


@dataclass(frozen=True)
class BoundInputs:
    """Everything the closed-form bounds consume.

    ``norm_s_pinv`` is the spectral norm of ``pinv(S_hat^T)`` and
    ``norm_t_pinv`` the one of ``pinv(T_hat)`` for the Hessian bound, or of
    ``pinv(T_hat^T)`` for the gradient bound, where the hat denotes the set
    divided by its radius. The factory methods compute the right variant.
    """

    m: int
    k: int
    lipschitz_grad: float
    lipschitz_hess: float
    delta_s: float
    delta_t: float
    norm_s_pinv: float
    norm_t_pinv: float

    def __post_init__(self):
        if self.m < 0 or self.k < 0:
            raise ValueError("set sizes must be nonnegative")
        if self.lipschitz_grad < 0 or self.lipschitz_hess < 0:
            raise ValueError("Lipschitz constants must be nonnegative")
        if not (self.delta_s >= 0 and self.delta_t >= 0):
            raise ValueError("set radii must be nonnegative")
        if self.norm_s_pinv < 0 or self.norm_t_pinv < 0:
            raise ValueError("norm factors must be nonnegative")

    @property
    def delta_u(self) -> float:
        return max(self.delta_s, self.delta_t)

    @property
    def delta_l(self) -> float:
        return min(self.delta_s, self.delta_t)

    @classmethod
    def for_gradient(
        cls, t_set: DirectionSet, lipschitz_grad: float, frobenius: bool = False
    ) -> "BoundInputs":
        """Inputs for :func:`error_bound_gsg` from an actual T."""
        norm = linalg.frobenius_norm if frobenius else linalg.spectral_norm
        t_hat = t_set.normalized()
        return cls(
            m=0,
            k=t_set.count,
            lipschitz_grad=float(lipschitz_grad),
            lipschitz_hess=0.0,
            delta_s=t_set.radius,
            delta_t=t_set.radius,
            norm_s_pinv=0.0,
            norm_t_pinv=norm(linalg.pseudoinverse(t_hat.matrix.T)),
        )

    @classmethod
    def for_hessian(
        cls,
        s_set: DirectionSet,
        t_set: DirectionSet,
        lipschitz_grad: float,
        lipschitz_hess: float,
        frobenius: bool = False,
    ) -> "BoundInputs":
        """Inputs for :func:`error_bound_nsh` from actual S and T."""
        norm = linalg.frobenius_norm if frobenius else linalg.spectral_norm
        s_hat = s_set.normalized()
        t_hat = t_set.normalized()
        return cls(
            m=s_set.count,
            k=t_set.count,
            lipschitz_grad=float(lipschitz_grad),
            lipschitz_hess=float(lipschitz_hess),
            delta_s=s_set.radius,
            delta_t=t_set.radius,
            norm_s_pinv=norm(linalg.pseudoinverse(s_hat.matrix.T)),
            norm_t_pinv=norm(linalg.pseudoinverse(t_hat.matrix)),
        )


def error_bound_gsg(inputs: BoundInputs) -> float:
    """Gradient estimate error bound: ``sqrt(k)/2 * L * |pinv(T_hat^T)| * delta_T``."""
    if inputs.k < 1:
        raise ValueError("gradient bound needs at least one direction")
    return 0.5 * math.sqrt(inputs.k) * inputs.lipschitz_grad * inputs.norm_t_pinv * inputs.delta_t


def error_bound_nsh(inputs: BoundInputs) -> float:
    """Hessian estimate error bound.

    ``m sqrt(k)/3 * L * (2 delta_u / delta_l + 3) * |pinv(S_hat^T)| *
    |pinv(T_hat)| * delta_u``; requires a strictly positive lower radius.
    """
    if inputs.m < 1 or inputs.k < 1:
        raise ValueError("Hessian bound needs nonempty direction sets")
    if inputs.delta_l <= 0:
        raise ValueError("Hessian bound needs a strictly positive lower radius")
    ratio = 2.0 * inputs.delta_u / inputs.delta_l + 3.0
    return (
        (inputs.m * math.sqrt(inputs.k) / 3.0)
        * inputs.lipschitz_hess
        * ratio
        * inputs.norm_s_pinv
        * inputs.norm_t_pinv
        * inputs.delta_u
    )


def error_bound_canonical(n: int, k: int, beta: float, lipschitz_hess: float) -> float:
    """Hessian bound specialized to the canonical sets ``(beta I, beta E_k)``.

    ``5/3 * n^{3/2} * L * beta`` when ``k == 0`` and ``11/2 * n^2 * L * beta``
    otherwise.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be positive and finite, got {beta}")
    if lipschitz_hess < 0:
        raise ValueError("Lipschitz constant must be nonnegative")
    if k == 0:
        return (5.0 / 3.0) * n ** 1.5 * lipschitz_hess * beta
    return 5.5 * n * n * lipschitz_hess * beta
