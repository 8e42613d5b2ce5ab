"""End-to-end controllability verdict for one model.

Combines the three conditions with the Lie closure of the drift and
control Hamiltonians and reports dimension, expected dimension and the
controllable flag.  For registers longer than two qubits the conditions
are sufficient, so a conditions-pass with a closure deficit would expose
an engine bug and raises instead of reporting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .closure import ClosureResult, lie_closure
from .conditions import ConditionReport, check_conditions
from .errors import ContractViolationError
from .models import ControlModel, build_controls, build_drift

__all__ = ["ControllabilityReport", "full_controllability"]

TWO_QUBIT_SCHEME_WARNING = (
    "N=3, M=2 coupled-control scheme: complete controllability means the "
    "closure reaches su(12), dimension 143; an su(4) target sometimes "
    "quoted for this scheme does not match the 12-dimensional ambient space."
)


@dataclass
class ControllabilityReport:
    conditions: ConditionReport
    closure: ClosureResult
    controllable: bool
    warnings: list[str] = field(default_factory=list)


def full_controllability(
    model: ControlModel, tol: float = 1e-9, exact: bool = False
) -> ControllabilityReport:
    """Run all three conditions plus the closure of drift and controls."""
    conditions = check_conditions(model, exact=exact)
    generators = [build_drift(model, exact=exact)]
    generators.extend(build_controls(model, exact=exact))
    closure = lie_closure(generators, tol=tol, exact=exact)

    if (
        model.n_qubits > 2
        and conditions.all_ok
        and closure.dimension != closure.expected_dim
    ):
        raise ContractViolationError(
            "all conditions hold for M > 2 but the closure dimension is "
            f"{closure.dimension} instead of {closure.expected_dim}"
        )

    warnings = []
    if model.n_levels == 3 and model.n_qubits == 2 and model.extra_controls:
        warnings.append(TWO_QUBIT_SCHEME_WARNING)
    return ControllabilityReport(
        conditions=conditions,
        closure=closure,
        controllable=closure.controllable,
        warnings=warnings,
    )
