"""Two register layouts that completely control a three-level system.

Layout 1 uses three chained qubits and only four unit-strength coupling
terms; the coupling matrix witness determinant is exactly 1 and the
closure fills su(24), dimension 575.

Layout 2 gets away with two qubits by making their mutual coupling itself
drivable (a fifth control channel).  The ambient algebra is su(12), so
complete controllability means dimension 143 there, and the analysis
attaches a warning reminding readers of that.
"""

import time

from accessor_ctrl import ControlModel, check_condition2, full_controllability


def three_qubit_layout():
    return ControlModel.create(
        3, 3,
        [-1, 0, 1],           # equal gaps
        [1, 1, 1],
        [1, 1],               # fixed XX chain
        [1, 2],               # distinct excitation strengths
        [(1, 1, "YYY", 1), (2, 1, "YYX", 1), (1, 2, "YXY", 1), (2, 2, "XYY", 1)],
    )


def two_qubit_layout():
    return ControlModel.create(
        3, 2,
        [-1, 0, 2],           # distinct squared gaps
        [1, 1],
        [0],                  # no fixed chain: the XX word is a control
        [1, 1],
        [(1, 1, "XX", 1), (1, 2, "XY", 1), (2, 1, "YX", 1), (2, 2, "YY", 1)],
        ["XX"],
    )


print("=== three chained qubits, four unit couplings")
model = three_qubit_layout()
witness = check_condition2(model, exact=True)
print(f"coupling rows used: {witness.witness_rows}")
print(f"witness determinant (exact): {witness.witness_determinant}")
start = time.perf_counter()
verdict = full_controllability(model)
print(f"closure dimension {verdict.closure.dimension} of "
      f"{verdict.closure.expected_dim} in {time.perf_counter() - start:.2f}s "
      f"({verdict.closure.iterations} sweeps)")
print(f"completely controllable: {verdict.controllable}")

print()
print("=== two qubits with a drivable coupling word")
start = time.perf_counter()
verdict = full_controllability(two_qubit_layout())
print(f"closure dimension {verdict.closure.dimension} of "
      f"{verdict.closure.expected_dim} in {time.perf_counter() - start:.2f}s")
print(f"completely controllable: {verdict.controllable}")
for warning in verdict.warnings:
    print(f"note: {warning}")
