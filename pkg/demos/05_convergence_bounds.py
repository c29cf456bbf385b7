"""Convergence studies and certified error bounds.

run_study sweeps a geometric schedule of sampling radii, measures the
estimation error against the analytic Hessian, fills the bound column
from certified Lipschitz constants, and fits the order on the live rows.
"""

import io

from nshess import StudyConfig, error_bound_canonical, run_study

print("== cubic registry function, nested-set estimator ==")
cfg = StudyConfig(
    function="sum_of_cubes", dim=3, k=1, estimator="nested-set",
    beta_start=1e-1, beta_ratio=0.5, beta_steps=8, seed=0,
)
report = run_study(cfg)
buf = io.StringIO()
report.to_csv(buf)
print(buf.getvalue())
print(report.summary())

print()
print("== a quadratic is recovered exactly at every scale ==")
cfg = StudyConfig(
    function="quadratic", dim=2, k=0, estimator="nested-set",
    beta_steps=3, seed=4,
)
report = run_study(cfg)
print(report.summary())
print(f"noise floor: {report.noise_floor:.3e}, "
      f"largest error: {max(r.error_spec for r in report.rows):.3e}")

print()
print("== canonical-set bounds have closed forms ==")
lipschitz = 6.0
for n in (2, 3, 5):
    b0 = error_bound_canonical(n, 0, 0.1, lipschitz)
    b1 = error_bound_canonical(n, 1, 0.1, lipschitz)
    print(f"n = {n}: k=0 bound {b0:8.4f}   k>=1 bound {b1:8.4f}")

print()
print("== the measured error sits under the bound on every row ==")
cfg = StudyConfig(
    function="exp_of_sum", dim=3, k=0, estimator="nested-set",
    beta_start=1e-1, beta_ratio=0.1, beta_steps=4, seed=0,
)
report = run_study(cfg)
for row in report.rows:
    print(f"beta = {row.beta:8.0e}   error = {row.error_spec:10.3e}   "
          f"bound = {row.bound:10.3e}   evals = {row.evals}")
