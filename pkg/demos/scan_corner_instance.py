"""Build the d=7 tensor of a corner instance and find its negative word.

The instance has a single generator with a 1 in the upper-right corner
(all other generators zero).  Its two-letter word (0, 6) -- first
generator followed by the minus tracker -- carries weight -1, which
rules out a purification of any bond dimension.  The weight survives
appended plus trackers, so there is one witness per ring size.
"""

from tnpur import ZulcInstance, build_reduction, extend_witness, scan_classical, word_trace

instance = ZulcInstance.from_lists([
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
])

tensor = build_reduction(instance, mode="rational")
print(f"reduction tensor: d={tensor.d}, D={tensor.D}, mode={tensor.mode}")

report = scan_classical(tensor, 6, exact=True)
print(f"scan status: {report.status}")
print(f"witness word: {report.witness}")
print(f"witness weight: {report.witness_trace}")
print(f"first bad ring size: {report.first_length}")
print(f"cyclic words checked: {report.word_count}")

# the witness extends to every larger ring size by padding with the
# plus tracker (letter 5); the weight does not move
print(f"extends 4 times: {extend_witness(tensor, report.witness, (5,), 4)}")
for j in range(1, 5):
    w = report.witness + (5,) * j
    print(f"  weight of {w}: {word_trace(tensor, w).re}")
