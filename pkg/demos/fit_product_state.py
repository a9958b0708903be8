"""Fit a local purification to a product target and verify it.

The target is the classical product state with site weights (1/2, 1/2).
A bond-1 purification with a two-level environment recovers it to
machine precision.  The same search on a tensor with a negative word
weight stays far from zero, as it must: purification-form diagonals are
componentwise nonnegative.
"""

from tnpur import (
    MpsTensor,
    PurifySearchConfig,
    ZulcInstance,
    build_reduction,
    fit_purification,
    verify_purification,
)

target = MpsTensor.from_matrices([[[0.5]], [[0.5]]], mode="float")
config = PurifySearchConfig(bond=1, d_env=2, lengths=tuple(range(1, 7)),
                            restarts=8, tol=1e-10, seed=7)
result = fit_purification(target, config)
print(f"status: {result.status} (restart {result.winning_restart})")
for L, r in sorted(result.residuals.items()):
    print(f"  L={L}: residual {r:.3e}, constant {result.constants[L]:.9f}")

report = verify_purification(target, result.b, lengths=tuple(range(1, 9)))
print(f"re-verification on longer window: {'PASS' if report.passed else 'FAIL'} "
      f"(max residual {report.max_residual():.3e})")

# a negative word weight rules the search out
corner = ZulcInstance.from_lists([
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
])
bad = build_reduction(corner, mode="rational")
result = fit_purification(bad, PurifySearchConfig(
    bond=1, lengths=(1, 2), restarts=4, seed=3))
print(f"negative-weight target: {result.status}, "
      f"best residual {result.best_residual:.4f}")
