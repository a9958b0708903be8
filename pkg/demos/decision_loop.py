"""Run the two-sided loop on targets where each half decides.

The loop alternates purification fits at growing bond dimension with
exhaustive scans at growing ring size.  A product target is settled by
the fit side at bond 1; the corner instance is settled by the scan side
with a two-letter negative word.
"""

from tnpur import MpsTensor, ZulcInstance, build_reduction, semi_decision_loop

target = MpsTensor.from_matrices([[[0.5]], [[0.5]]], mode="float")
result = semi_decision_loop(target, max_bond=2, max_len=4, restarts=4, seed=1)
print(f"product target: {result.status}")
print(f"  bond: {result.details['bond']}")
print(f"  max verified residual: {result.details['max_verified_residual']:.3e}")
for step in result.steps:
    print(f"  step {step['step']}: {step['action']} -> {step['outcome']}")

corner = ZulcInstance.from_lists([
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
])
bad = build_reduction(corner, mode="rational")
result = semi_decision_loop(bad, max_bond=1, max_len=3, restarts=1, seed=1)
print(f"corner instance: {result.status}")
print(f"  witness: {result.details['word']}, weight {result.details['trace']}")
for step in result.steps:
    print(f"  step {step['step']}: {step['action']} -> {step['outcome']}")
