"""From a controllability verdict to actual pulses.

The closure dimension says the target is reachable; gradient ascent on the
transfer fidelity finds piecewise-constant fields that reach it.  The
fields drive only the register qubit, yet the system flips from its ground
state to its excited state.
"""

import numpy as np

from accessor_ctrl import ControlModel, TransferTask, propagate, synthesize

model = ControlModel.create(
    2, 1, [1, -1], [1], [], [1], [(1, 1, "Y", 1), (1, 2, "X", 1)]
)
task = TransferTask(
    initial_system=[1, 0],       # system ground state, register |0>
    target_system=[0, 1],
    horizon=20.0,
)

program = synthesize(model, task, segment_count=200, max_iters=2000, seed=0,
                     target_fidelity=0.999)

print(f"segments: {program.segment_count}, dt = {program.dt}")
print(f"iterations accepted: {len(program.fidelity_trace) - 1}")
print(f"final fidelity: {program.final_fidelity:.6f} "
      f"(converged: {program.converged})")
print(f"peak amplitude: {np.abs(program.amplitudes).max():.3f} (cap 10)")

trace = program.fidelity_trace
marks = np.linspace(0, len(trace) - 1, min(len(trace), 8)).astype(int)
print("fidelity trace:", "  ".join(f"{trace[i]:.4f}" for i in marks))

u = propagate(model, program)
final = u @ np.kron(task.initial_system, [1, 0])
populations = np.abs(final.reshape(2, 2)) ** 2
print(f"final system populations: ground {populations[0].sum():.4f}, "
      f"excited {populations[1].sum():.4f}")
