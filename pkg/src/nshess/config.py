"""Library-wide numeric settings.

Every tolerance in the library is relative to the scale of the data it is
applied to; the absolute thresholds are derived at the point of use from the
fields below. Mutating :data:`settings` changes behaviour globally, which is
intended for experimentation, not for routine use.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class NumericSettings:
    #: Relative singular-value cutoff used by the pseudoinverse and rank
    #: computations. ``None`` means ``max(rows, cols) * machine epsilon``.
    rank_rtol: float | None = None

    #: Relative tolerance for treating two evaluation points as coincident.
    #: The absolute threshold is ``dedup_rtol * (1 + |x0| + set radii)``.
    dedup_rtol: float = 1e-12

    #: Relative residual accepted when solving interpolation systems.
    residual_rtol: float = 1e-9

    #: ``|g(x0)|`` at or below this value is treated as division by zero
    #: by the quotient rule.
    division_tol: float = 0.0


settings = NumericSettings()
