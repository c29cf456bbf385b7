"""Exception types raised across the library."""

from __future__ import annotations

import numpy as np


class RankDeficientError(ValueError):
    """A direction matrix does not have the rank an operation requires."""

    def __init__(self, name: str, rank_found: int, rank_needed: int):
        self.name = name
        self.rank_found = rank_found
        self.rank_needed = rank_needed
        super().__init__(
            f"{name} is rank deficient: rank {rank_found} < {rank_needed} required"
        )


class NotPoisedError(ValueError):
    """A point set does not determine a unique quadratic interpolant."""


class EvaluationError(RuntimeError):
    """The black-box oracle failed or returned a non-finite value."""

    def __init__(self, point, reason: str):
        self.point = np.asarray(point, dtype=float).copy()
        self.reason = reason
        super().__init__(f"oracle evaluation failed at {self.point.tolist()}: {reason}")
