"""Gradients from function values alone.

A simplex gradient needs nothing but f at a base point and at the tips of
a direction set T. With more directions than dimensions the least-squares
solution through the pseudoinverse still works.
"""

import numpy as np

from nshess import BoundInputs, DirectionSet, EvaluationCache, error_bound_gsg, simplex_gradient


def f(x):
    return float(np.exp(x[0]) + x[0] * x[1] ** 2)


def grad_f(x):
    return np.array([np.exp(x[0]) + x[1] ** 2, 2.0 * x[0] * x[1]])


x0 = np.array([0.2, -1.0])

print("== square direction set ==")
for h in (1e-1, 1e-2, 1e-3, 1e-4):
    t_set = DirectionSet(h * np.eye(2))
    cache = EvaluationCache(f)
    res = simplex_gradient(x0, t_set, cache)
    err = np.linalg.norm(res.gradient - grad_f(x0))
    print(f"h = {h:8.0e}   error = {err:10.3e}   evals = {cache.distinct_count}")

print()
print("== overdetermined: four directions in the plane ==")
t = 1e-3 * np.array([[1.0, 0.0, 1.0, -1.0], [0.0, 1.0, 1.0, 1.0]])
cache = EvaluationCache(f)
res = simplex_gradient(x0, DirectionSet(t), cache)
print("estimate:", res.gradient)
print("truth:   ", grad_f(x0))

print()
print("== certified error bound ==")
# exp(x) has gradient Lipschitz constant exp(x0[0] + h) + 2 near x0; a
# crude safe constant on this small box is enough to show the bound works.
lipschitz = float(np.exp(x0[0] + 0.1) + 2.0 + 2.0 * abs(x0[1]))
for h in (1e-1, 1e-2, 1e-3):
    t_set = DirectionSet(h * np.eye(2))
    res = simplex_gradient(x0, t_set, EvaluationCache(f))
    bound = error_bound_gsg(BoundInputs.for_gradient(t_set, lipschitz))
    err = np.linalg.norm(res.gradient - grad_f(x0))
    print(f"h = {h:8.0e}   error = {err:10.3e}   bound = {bound:10.3e}")
