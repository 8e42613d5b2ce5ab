"""Indirect controllability of an N-level system through an XY qubit chain.

The package decides complete controllability of a qudit that is steered
only through a chain of register qubits: it builds the drift and control
Hamiltonians from a declarative model, checks the three closed-form
controllability conditions, computes the dimension of the dynamical Lie
algebra (in floating or exact rational arithmetic), verifies the bracket
identities the analysis rests on, and synthesises piecewise-constant
pulses that realise a requested state transfer.
"""

from .closure import (
    SP4_BASIS_ORDER,
    ClosureResult,
    check_sp4,
    lie_closure,
    membership,
    sp4_defect,
    sp4_reference_basis,
)
from .conditions import (
    Cond1Result,
    Cond2Result,
    Cond3Result,
    ConditionReport,
    check_condition1,
    check_condition2,
    check_condition3,
    check_conditions,
    coupling_matrix,
)
from .config import ConfigDocument, TaskSpec, parse_config, parse_config_document
from .controllability import ControllabilityReport, full_controllability
from .errors import ConfigError, ContractViolationError, DimensionError
from .lemmas import LemmaCheck, verify_lemma_suite
from .models import (
    ControlModel,
    Coupling,
    DriftParts,
    build_controls,
    build_drift,
    build_drift_parts,
    rotate_system_frame,
)
from .operators import (
    GaussianRational,
    PauliString,
    StructuredOperator,
    SystemBasisOp,
    chevalley_terms,
    commutator,
    hs_inner,
    nested_commutator,
    pauli_multiply,
    to_dense,
)
from .pulses import (
    PulseProgram,
    TransferTask,
    fidelity_and_gradient,
    propagate,
    synthesize,
    transfer_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "SP4_BASIS_ORDER",
    "ClosureResult",
    "Cond1Result",
    "Cond2Result",
    "Cond3Result",
    "ConditionReport",
    "ConfigDocument",
    "ConfigError",
    "ContractViolationError",
    "ControlModel",
    "ControllabilityReport",
    "Coupling",
    "DimensionError",
    "DriftParts",
    "GaussianRational",
    "LemmaCheck",
    "PauliString",
    "PulseProgram",
    "StructuredOperator",
    "SystemBasisOp",
    "TaskSpec",
    "TransferTask",
    "build_controls",
    "build_drift",
    "build_drift_parts",
    "check_condition1",
    "check_condition2",
    "check_condition3",
    "check_conditions",
    "check_sp4",
    "chevalley_terms",
    "commutator",
    "coupling_matrix",
    "fidelity_and_gradient",
    "full_controllability",
    "hs_inner",
    "lie_closure",
    "membership",
    "nested_commutator",
    "parse_config",
    "parse_config_document",
    "pauli_multiply",
    "propagate",
    "rotate_system_frame",
    "sp4_defect",
    "sp4_reference_basis",
    "synthesize",
    "to_dense",
    "transfer_fidelity",
    "verify_lemma_suite",
]
