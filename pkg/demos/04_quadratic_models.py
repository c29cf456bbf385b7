"""A full quadratic model for free.

The folded grid that feeds the nested-set Hessian is poised, so the same
cached values determine the unique interpolating quadratic. Building the
model after the Hessian costs zero additional oracle calls.
"""

import numpy as np

from nshess import (
    EvaluationCache,
    canonical_set,
    interpolate_general,
    interpolate_minimal,
    nested_set_hessian,
    nshc_points,
)


def f(x):
    return float(np.sin(x[0]) + np.exp(x[1]) + x[0] * x[1] ** 2)


x0 = np.array([0.4, -0.2])
s_set, t_set = canonical_set(2, 1, 0.05)

cache = EvaluationCache(f)
hess = nested_set_hessian(x0, s_set, t_set, cache)
after_hessian = cache.distinct_count

model = interpolate_minimal(x0, s_set, 1, cache)
after_model = cache.distinct_count
print(f"evals for the Hessian:       {after_hessian}")
print(f"evals after adding the model: {after_model}  (no new points)")

print()
print("model value at x0:", model.value(x0), "   f(x0):", f(x0))
print("model gradient at x0:   ", model.gradient(x0))
print("analytic gradient at x0:", np.array([np.cos(x0[0]) + x0[1] ** 2,
                                            np.exp(x0[1]) + 2.0 * x0[0] * x0[1]]))

print()
print("== the closed-form coefficients match the dense interpolation solve ==")
pts = nshc_points(x0, s_set, t_set)
values = np.array([cache.evaluate(p) for p in pts])
dense = interpolate_general(pts, values)
print("alpha0 gap: ", abs(model.alpha0 - dense.alpha0))
print("alpha gap:  ", np.max(np.abs(model.alpha - dense.alpha)))
print("hessian gap:", np.max(np.abs(model.hessian - dense.hessian)))

print()
print("== the interpolant reproduces every sampled value ==")
worst = max(abs(model.value(p) - v) for p, v in zip(pts, values))
print(f"worst residual over the {len(pts)} points: {worst:.3e}")
