"""Poisedness, minimality and what separates the two.

Every folded grid is poised for quadratic interpolation. The converse
fails: a poised six-point set need not be expressible as a folded grid.
The brute-force recognizer finds generating sets when they exist.
"""

import numpy as np

from nshess import (
    PointSet,
    canonical_set,
    is_minimal_nshc,
    is_poised_quadratic,
    nshc_points,
)
from nshess.sets import DirectionSet

print("== the worked six-point grid ==")
s_set, t_set = canonical_set(2, 2, 1.0)
pts = nshc_points(np.zeros(2), s_set, t_set)
for p in sorted(tuple(float(v) for v in row) for row in pts):
    print(f"  {p}")
print("poised: ", is_poised_quadratic(pts))

witness = is_minimal_nshc(pts, np.zeros(2))
print("minimal:", bool(witness))
print("witness S:")
print(witness.s_set.matrix)
print("witness T:")
print(witness.t_set.matrix)

print()
print("== a poised set that is not a folded grid ==")
cross = PointSet(
    np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [-1.0, -1.0]])
)
print("poised: ", is_poised_quadratic(cross))
print("minimal:", bool(is_minimal_nshc(cross, np.zeros(2))))

print()
print("== minimality is a property of the geometry, not the basis ==")
rng = np.random.default_rng(1)
survived = 0
for _ in range(20):
    a = rng.standard_normal((2, 2))
    while abs(np.linalg.det(a)) < 0.2:
        a = rng.standard_normal((2, 2))
    moved = nshc_points(
        np.zeros(2),
        DirectionSet(a @ s_set.matrix),
        DirectionSet(a @ t_set.matrix),
    )
    if len(moved) == 6 and is_minimal_nshc(moved, np.zeros(2)):
        survived += 1
print(f"minimality survived {survived}/20 random invertible transforms")
