"""Counting, de-duplicating wrapper around a scalar black-box oracle."""

from __future__ import annotations

import threading

import numpy as np

from .exceptions import EvaluationError

__all__ = ["EvaluationCache"]


class EvaluationCache:
    """Memoizes oracle values so coincident sample points cost one call.

    Points whose coordinates all differ by at most ``tol`` are treated as
    the same point; the first computed value wins and later requests return
    it without calling the oracle. Operations that know their sampling
    geometry widen ``tol`` through :meth:`ensure_tolerance` so that points
    assembled along different arithmetic paths still coincide.

    The cache is callable, so it can stand in anywhere an oracle is
    expected. All state is guarded by a lock; the oracle is called at most
    once per distinct point even under concurrent use.
    """

    def __init__(self, oracle, tol: float = 0.0):
        if not callable(oracle):
            raise TypeError("oracle must be callable")
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        self._oracle = oracle
        self._tol = float(tol)
        self._points: list[np.ndarray] = []
        self._values: list[float] = []
        self._exact: dict[bytes, int] = {}
        self._trace: list[tuple[np.ndarray, float, str]] = []
        self._total = 0
        self._lock = threading.RLock()

    @property
    def distinct_count(self) -> int:
        """Number of oracle calls made, i.e. distinct points evaluated."""
        with self._lock:
            return len(self._points)

    @property
    def total_requests(self) -> int:
        with self._lock:
            return self._total

    @property
    def tol(self) -> float:
        with self._lock:
            return self._tol

    def ensure_tolerance(self, tol: float) -> None:
        """Widen the coincidence threshold; it never shrinks."""
        with self._lock:
            self._tol = max(self._tol, float(tol))

    def _find(self, x: np.ndarray) -> int:
        key = x.tobytes()
        idx = self._exact.get(key)
        if idx is not None:
            return idx
        tol = self._tol
        for i, p in enumerate(self._points):
            if p.shape == x.shape and np.max(np.abs(p - x)) <= tol:
                self._exact[key] = i
                return i
        return -1

    def evaluate(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError(f"evaluation point must be a 1-D vector, got shape {x.shape}")
        if not np.isfinite(x).all():
            raise ValueError("evaluation point contains non-finite entries")
        with self._lock:
            self._total += 1
            idx = self._find(x)
            if idx >= 0:
                value = self._values[idx]
                self._trace.append((x.copy(), value, "hit"))
                return value
            try:
                value = float(self._oracle(x.copy()))
            except EvaluationError:
                raise
            except Exception as exc:
                raise EvaluationError(x, f"{type(exc).__name__}: {exc}") from exc
            if not np.isfinite(value):
                raise EvaluationError(x, f"oracle returned non-finite value {value}")
            stored = x.copy()
            stored.setflags(write=False)
            self._points.append(stored)
            self._values.append(value)
            self._exact[x.tobytes()] = len(self._points) - 1
            self._trace.append((stored, value, "miss"))
            return value

    __call__ = evaluate

    def trace_rows(self) -> list[tuple[np.ndarray, float, str]]:
        """Chronological (point, value, hit|miss) records."""
        with self._lock:
            return list(self._trace)

    def write_trace_csv(self, target) -> None:
        """Dump the request trace, one row per request."""
        rows = self.trace_rows()
        if not rows:
            text = "value,status\n"
        else:
            dim = rows[0][0].shape[0]
            header = ",".join(f"x{i + 1}" for i in range(dim)) + ",value,status"
            lines = [header]
            for point, value, status in rows:
                coords = ",".join(repr(float(v)) for v in point)
                lines.append(f"{coords},{value!r},{status}")
            text = "\n".join(lines) + "\n"
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            target.write(text)
