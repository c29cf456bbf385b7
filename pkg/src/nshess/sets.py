"""Direction sets, evaluation point sets, and their structure tests.

A direction set is an ordered collection of vectors in R^n stored as the
columns of an n-by-m matrix. A Hessian estimate samples the target function
on the points ``x0 + s_i + t_j`` generated by an outer set S and an inner
set T; this module enumerates those points, deduplicates coincidences, and
answers two structural questions about a candidate point set: is it poised
for quadratic interpolation, and is it exactly the sample set of some
nested Hessian estimate of minimal size.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg
from .config import settings

__all__ = [
    "DirectionSet",
    "PointSet",
    "MinimalityResult",
    "dedup_tolerance",
    "build_uk",
    "canonical_set",
    "nshc_points",
    "count_distinct",
    "minimal_point_count",
    "quadratic_basis_matrix",
    "is_poised_quadratic",
    "is_minimal_nshc",
]


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Ordered set of direction vectors, stored as matrix columns.

    The matrix is copied and frozen at construction; entries must be finite.
    ``radius`` is the largest column norm, the resolution of the set.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2 or m.size == 0:
            raise ValueError(f"direction matrix must be nonempty 2-D, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("direction matrix contains non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_columns(cls, columns) -> "DirectionSet":
        return cls(np.column_stack([np.asarray(c, dtype=float) for c in columns]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    @property
    def radius(self) -> float:
        return float(np.max(np.linalg.norm(self.matrix, axis=0)))

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]

    def scaled(self, factor: float) -> "DirectionSet":
        return DirectionSet(float(factor) * self.matrix)

    def normalized(self) -> "DirectionSet":
        """The set divided by its radius, so the largest column has norm 1."""
        r = self.radius
        if r <= 0.0:
            raise ValueError("cannot normalize a direction set with zero radius")
        return DirectionSet(self.matrix / r)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Deduplicated evaluation points, one per row.

    Two points coincide when every coordinate differs by at most
    ``dedup_tol``; construction rejects input violating that rule.
    """

    points: np.ndarray
    dedup_tol: float = 0.0

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2 or pts.size == 0:
            raise ValueError(f"points must form a nonempty 2-D array, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points contain non-finite entries")
        for a, b in combinations(range(len(pts)), 2):
            if np.max(np.abs(pts[a] - pts[b])) <= self.dedup_tol:
                raise ValueError(f"points {a} and {b} coincide under the dedup tolerance")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def contains(self, x, tol: float | None = None) -> bool:
        x = np.asarray(x, dtype=float)
        t = self.dedup_tol if tol is None else tol
        return bool(np.any(np.max(np.abs(self.points - x), axis=1) <= t))

    def index_of(self, x, tol: float | None = None) -> int:
        """Row index of the point matching ``x``, or -1."""
        x = np.asarray(x, dtype=float)
        t = self.dedup_tol if tol is None else tol
        hits = np.nonzero(np.max(np.abs(self.points - x), axis=1) <= t)[0]
        return int(hits[0]) if hits.size else -1

    def to_csv(self, target) -> None:
        """Write one point per row; ``target`` is a path or a text stream."""
        header = ",".join(f"x{i + 1}" for i in range(self.dim))
        body = "\n".join(",".join(repr(float(v)) for v in row) for row in self.points)
        text = header + "\n" + body + "\n"
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            target.write(text)


@dataclass(frozen=True)
class MinimalityResult:
    """Outcome of the minimal-sample-set search, with a witness when found."""

    minimal: bool
    s_set: DirectionSet | None = None
    t_set: DirectionSet | None = None

    def __bool__(self) -> bool:
        return self.minimal


def dedup_tolerance(x0, *sets: DirectionSet) -> float:
    """Coincidence threshold for points sampled around ``x0``.

    Relative to the magnitude of the base point plus the radii of the
    direction sets involved, so that points assembled through different
    arithmetic paths still match.
    """
    x0 = np.asarray(x0, dtype=float)
    return settings.dedup_rtol * (1.0 + float(np.linalg.norm(x0)) + sum(s.radius for s in sets))


def build_uk(s_set: DirectionSet, k: int) -> DirectionSet:
    """Inner direction set that folds the sample points of an outer set S.

    For ``k == 0`` the result is S itself. For ``k >= 1`` column ``i`` is
    ``s_i - s_k`` (``i != k``) and column ``k`` is ``-s_k``. Pairing S with
    this set collapses the Hessian sample grid onto the minimal point count
    ``(n+1)(n+2)/2`` whenever S has full rank.
    """
    n = s_set.dim
    if s_set.count != n:
        raise ValueError(f"S must be square (n x n) to build U_k, got {s_set.dim} x {s_set.count}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    if k == 0:
        return DirectionSet(s_set.matrix)
    s = s_set.matrix
    sk = s[:, k - 1].copy()
    u = s - sk[:, None]
    u[:, k - 1] = -sk
    return DirectionSet(u)


def canonical_set(n: int, k: int, beta: float) -> tuple[DirectionSet, DirectionSet]:
    """Scaled coordinate sets ``S = beta * I`` and ``T = beta * E_k``.

    ``E_0`` is the identity; for ``k >= 1``, ``E_k`` has columns
    ``e_i - e_k`` (``i != k``) and ``-e_k``.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in 0..{n}, got {k}")
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be positive and finite, got {beta}")
    s_set = DirectionSet(beta * np.eye(n))
    return s_set, build_uk(s_set, k)


def _dedup(candidates: list[np.ndarray], tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in candidates:
        for q in kept:
            if np.max(np.abs(p - q)) <= tol:
                break
        else:
            kept.append(p)
    return np.array(kept)


def nshc_points(x0, s_set: DirectionSet, t_set: DirectionSet, tol: float | None = None) -> PointSet:
    """Every point a nested Hessian estimate at ``x0`` evaluates.

    The deduplicated union of ``x0``, ``x0 + t_j``, ``x0 + s_i`` and
    ``x0 + s_i + t_j``, built in that fixed order so the first-seen
    representative of each coincidence class is kept.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.shape[0] != s_set.dim or s_set.dim != t_set.dim:
        raise ValueError(
            f"dimension mismatch: x0 has {x0.shape}, S is {s_set.dim}-dimensional, "
            f"T is {t_set.dim}-dimensional"
        )
    if tol is None:
        tol = dedup_tolerance(x0, s_set, t_set)
    candidates = [x0]
    for j in range(t_set.count):
        candidates.append(x0 + t_set.column(j))
    for i in range(s_set.count):
        base = x0 + s_set.column(i)
        candidates.append(base)
        for j in range(t_set.count):
            candidates.append(base + t_set.column(j))
    return PointSet(_dedup(candidates, tol), tol)


def count_distinct(x0, s_set: DirectionSet, t_set: DirectionSet) -> int:
    """Number of distinct evaluation points of the nested estimate."""
    return len(nshc_points(x0, s_set, t_set))


def minimal_point_count(n: int) -> int:
    """Points needed to determine a quadratic in R^n: (n+1)(n+2)/2."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return (n + 1) * (n + 2) // 2


def quadratic_basis_matrix(points: np.ndarray, center=None, scale: float | None = None):
    """Interpolation matrix of the natural quadratic basis on shifted points.

    Rows are ``[1, z, z_i*z_j (i<j), z_i^2/2]`` evaluated at
    ``z = (y - center) / scale``. Returns ``(matrix, center, scale)``.
    Default center is the centroid and default scale the largest distance
    from it, which keeps the matrix well scaled for rank tests and solves.
    """
    pts = np.asarray(points, dtype=float)
    p, n = pts.shape
    if center is None:
        center = pts.mean(axis=0)
    else:
        center = np.asarray(center, dtype=float)
    if scale is None:
        scale = float(np.max(np.linalg.norm(pts - center, axis=1)))
    if scale <= 0.0:
        scale = 1.0
    z = (pts - center) / scale
    cols = [np.ones(p)]
    for i in range(n):
        cols.append(z[:, i])
    for i in range(n):
        for j in range(i, n):
            if i == j:
                cols.append(0.5 * z[:, i] ** 2)
            else:
                cols.append(z[:, i] * z[:, j])
    return np.column_stack(cols), center, scale


def is_poised_quadratic(points: PointSet) -> bool:
    """Whether the set determines a unique interpolating quadratic.

    Requires exactly ``(n+1)(n+2)/2`` distinct points; other cardinalities
    are rejected because the quadratic system could not be square.
    """
    n = points.dim
    need = minimal_point_count(n)
    if len(points) != need:
        raise ValueError(f"poisedness test needs exactly {need} points in R^{n}, got {len(points)}")
    basis, _, _ = quadratic_basis_matrix(points.points)
    return linalg.rank(basis) == need


def is_minimal_nshc(points: PointSet, x0) -> MinimalityResult:
    """Search for direction sets whose nested sample grid is exactly ``points``.

    Brute force over candidate outer directions drawn from ``points - x0``
    and inner directions from the same pool, feasibility-filtered. Only
    dimensions up to 3 are attempted; beyond that the combinatorial search
    bound is exceeded and a ValueError is raised.
    """
    x0 = np.asarray(x0, dtype=float)
    n = points.dim
    if x0.shape != (n,):
        raise ValueError(f"x0 must be a point in R^{n}, got shape {x0.shape}")
    if n > 3:
        raise ValueError(f"minimality search bound exceeded: n = {n} > 3")
    if not points.contains(x0):
        raise ValueError("x0 must be one of the points")
    need = minimal_point_count(n)
    if len(points) != need:
        return MinimalityResult(False)

    tol = points.dedup_tol if points.dedup_tol > 0 else dedup_tolerance(x0)
    pool = [p - x0 for p in points.points if np.max(np.abs(p - x0)) > tol]

    for s_idx in combinations(range(len(pool)), n):
        s_mat = np.column_stack([pool[i] for i in s_idx])
        if linalg.rank(s_mat) < n:
            continue
        bases = [x0 + s_mat[:, i] for i in range(n)]
        feasible = []
        for cand in range(len(pool)):
            t = pool[cand]
            if not points.contains(x0 + t, tol):
                continue
            if all(points.contains(b + t, tol) for b in bases):
                feasible.append(cand)
        for t_idx in combinations(feasible, n):
            t_mat = np.column_stack([pool[i] for i in t_idx])
            if linalg.rank(t_mat) < n:
                continue
            s_set = DirectionSet(s_mat)
            t_set = DirectionSet(t_mat)
            generated = nshc_points(x0, s_set, t_set, tol)
            if len(generated) != need:
                continue
            if all(points.contains(g, tol) for g in generated):
                return MinimalityResult(True, s_set, t_set)
    return MinimalityResult(False)
