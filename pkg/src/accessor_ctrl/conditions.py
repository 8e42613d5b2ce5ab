"""Controllability conditions on a :class:`~accessor_ctrl.models.ControlModel`.

Three independent checks gate complete controllability:

1. every chain coupling c_j is nonzero;
2. the coupling matrix G, with one row per register word in {X, Y}^M and
   one column per system transition operator (all x_j, then all y_j), has
   full column rank 2(N - 1);
3. the bare system is controllable under its constant excitation, i.e.
   the Lie algebra generated by i H_system and i H_excitation already
   contains every transition operator ix_j, iy_j.

Check 3 is evaluated from closed-form gap conditions for N = 2 and N = 3
and by an operational subalgebra-membership computation for larger N; at
N = 3 both routes run and must agree.  In floating mode "nonzero" means
magnitude above 1e-12; exact mode compares rationals exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closure import (
    _exact_coordinates,
    _FractionRref,
    _real_coordinate_index,
    lie_closure,
    membership,
)
from .errors import ContractViolationError
from .models import ControlModel
from .operators import (
    GaussianRational,
    PauliString,
    StructuredOperator,
    SystemBasisOp,
)

__all__ = [
    "Cond1Result",
    "Cond2Result",
    "Cond3Result",
    "ConditionReport",
    "check_condition1",
    "check_condition2",
    "check_condition3",
    "check_conditions",
    "coupling_matrix",
]

_ZERO_TOL = 1e-12
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class Cond1Result:
    ok: bool
    zero_indices: tuple[int, ...]


@dataclass(frozen=True)
class Cond2Result:
    ok: bool
    rank: int
    required_rank: int
    witness_rows: tuple[str, ...] = ()
    witness_determinant: object = None
    reason: str = ""


@dataclass(frozen=True)
class Cond3Result:
    ok: bool
    method: str
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConditionReport:
    cond1: Cond1Result
    cond2: Cond2Result
    cond3: Cond3Result

    @property
    def all_ok(self) -> bool:
        return self.cond1.ok and self.cond2.ok and self.cond3.ok

    def as_dict(self) -> dict:
        det = self.cond2.witness_determinant
        if isinstance(det, Fraction):
            det = str(det)
        return {
            "cond1": {"ok": self.cond1.ok,
                      "zero_c_indices": list(self.cond1.zero_indices)},
            "cond2": {"ok": self.cond2.ok, "rank": self.cond2.rank,
                      "required_rank": self.cond2.required_rank,
                      "witness_rows": list(self.cond2.witness_rows),
                      "witness_determinant": det,
                      "reason": self.cond2.reason},
            "cond3": {"ok": self.cond3.ok, "method": self.cond3.method,
                      "detail": self.cond3.detail},
        }


def _is_zero(value: Fraction, exact: bool) -> bool:
    if exact:
        return value == 0
    return abs(float(value)) <= _ZERO_TOL


# ---------------------------------------------------------------------------
# condition 1: chain couplings
# ---------------------------------------------------------------------------

def check_condition1(model: ControlModel, exact: bool = False) -> Cond1Result:
    """Every nearest-neighbour chain coupling must be nonzero.

    Vacuously true for a single-qubit register.
    """
    zeros = tuple(
        j + 1 for j, c in enumerate(model.chain) if _is_zero(c, exact)
    )
    return Cond1Result(ok=not zeros, zero_indices=zeros)


# ---------------------------------------------------------------------------
# condition 2: coupling matrix rank
# ---------------------------------------------------------------------------

def coupling_matrix(model: ControlModel, exact: bool = False):
    """The full 2^M x 2(N-1) coupling table.

    Rows are indexed by register words over {X, Y} in lexicographic order
    (X before Y); columns by the system operator, x_1..x_(N-1) then
    y_1..y_(N-1).  Absent couplings contribute zero; duplicate records sum.
    """
    n, m = model.n_levels, model.n_qubits
    row_labels = ["".join(w) for w in itertools.product("XY", repeat=m)]
    row_of = {label: i for i, label in enumerate(row_labels)}
    cols = 2 * (n - 1)
    if exact:
        mat = [[Fraction(0)] * cols for _ in row_labels]
    else:
        mat = np.zeros((len(row_labels), cols), dtype=float)
    for cp in model.couplings:
        r = row_of[cp.alpha.labels]
        c = (cp.k - 1) * (n - 1) + (cp.j - 1)
        if exact:
            mat[r][c] += cp.g
        else:
            mat[r][c] += float(cp.g)
    return row_labels, mat


def _det_fraction(rows: list[list[Fraction]]) -> Fraction:
    """Exact determinant by fraction-preserving Gaussian elimination."""
    a = [row[:] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1) / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def check_condition2(model: ControlModel, exact: bool = False) -> Cond2Result:
    """Full-column-rank test of the coupling matrix, with witness rows.

    When the rank reaches 2(N-1), the pivot rows form a nonsingular square
    submatrix; they are reported in canonical row order together with the
    determinant of that submatrix.
    """
    n, m = model.n_levels, model.n_qubits
    required = 2 * (n - 1)
    if (1 << m) < required:
        return Cond2Result(ok=False, rank=0, required_rank=required,
                           reason="dimension bound violated: 2^M < 2(N-1)")
    row_labels, mat = coupling_matrix(model, exact)

    pivot_rows: list[int] = []
    if exact:
        work = [row[:] for row in mat]
        free = list(range(len(work)))
        for col in range(required):
            piv = max(free, key=lambda r: abs(work[r][col]), default=None)
            if piv is None or work[piv][col] == 0:
                continue
            pivot_rows.append(piv)
            free.remove(piv)
            inv = Fraction(1) / work[piv][col]
            for r in free:
                f = work[r][col] * inv
                if f:
                    work[r] = [x - f * y for x, y in zip(work[r], work[piv])]
        rank = len(pivot_rows)
    else:
        work = np.array(mat, dtype=float)
        scale = np.abs(work).max(initial=0.0)
        cut = _RANK_TOL * scale
        free = list(range(work.shape[0]))
        for col in range(required):
            if not free:
                break
            piv = max(free, key=lambda r: abs(work[r, col]))
            if abs(work[piv, col]) <= cut:
                continue
            pivot_rows.append(piv)
            free.remove(piv)
            for r in free:
                work[r] -= (work[r, col] / work[piv, col]) * work[piv]
        rank = len(pivot_rows)

    if rank < required:
        return Cond2Result(ok=False, rank=rank, required_rank=required,
                           reason=f"rank {rank} < {required}")
    chosen = sorted(pivot_rows)
    labels = tuple(row_labels[r] for r in chosen)
    if exact:
        det = _det_fraction([mat[r] for r in chosen])
    else:
        det = float(np.linalg.det(np.array([mat[r] for r in chosen])))
    return Cond2Result(ok=True, rank=rank, required_rank=required,
                       witness_rows=labels, witness_determinant=det)


# ---------------------------------------------------------------------------
# condition 3: bare-system controllability under the constant excitation
# ---------------------------------------------------------------------------

def _system_only_ops(model: ControlModel, exact: bool):
    n = model.n_levels
    word = ""
    conv = (lambda v: GaussianRational(v)) if exact else (lambda v: float(v))
    h_sys = StructuredOperator.from_terms(
        n, 0,
        [(SystemBasisOp.unit(j, j), word, conv(model.energies[j - 1]))
         for j in range(1, n + 1)],
        exact=exact,
    )
    h_exc = StructuredOperator.from_terms(
        n, 0,
        [(SystemBasisOp.x(j, j + 1), word, conv(model.excitations[j - 1]))
         for j in range(1, n)],
        exact=exact,
    )
    return h_sys, h_exc


def _membership_condition3(model: ControlModel, exact: bool) -> bool:
    """All ix_j, iy_j inside the algebra generated by iH_system, iH_excitation."""
    n = model.n_levels
    h_sys, h_exc = _system_only_ops(model, exact)
    result = lie_closure([h_sys, h_exc], exact=exact)
    targets = []
    coeff = GaussianRational(0, 1) if exact else 1j
    for j in range(1, n):
        for make in (SystemBasisOp.x, SystemBasisOp.y):
            targets.append(StructuredOperator.from_terms(
                n, 0, [(make(j, j + 1), "", coeff)], exact=exact
            ))
    if exact:
        index, width = _real_coordinate_index(n, 0)
        rref = _FractionRref(width)
        for element in result.exact_elements:
            rref.try_add(_exact_coordinates(element, index, width))
        return all(
            rref.contains(_exact_coordinates(t, index, width)) for t in targets
        )
    return all(membership(t, result)[0] for t in targets)


def _explicit_n2(model: ControlModel, exact: bool) -> bool:
    return not _is_zero(model.excitations[0], exact)


def _explicit_n3(model: ControlModel, exact: bool) -> tuple[bool, dict]:
    e1, e2, e3 = model.energies
    d1, d2 = model.excitations
    gap21, gap32 = e2 - e1, e3 - e2
    detail = {"gap21": float(gap21), "gap32": float(gap32)}
    d_ok = not _is_zero(d1, exact) and not _is_zero(d2, exact)
    if not _is_zero(gap21 * gap21 - gap32 * gap32, exact):
        # distinct squared gaps: both excitations nonzero suffice
        return d_ok, {**detail, "branch": "distinct-gaps"}
    # equal squared gaps: need equal signed nonzero gaps and |d1| != |d2|
    ok = (
        _is_zero(gap21 - gap32, exact)
        and not _is_zero(gap21, exact)
        and d_ok
        and not _is_zero(d1 - d2, exact)
        and not _is_zero(d1 + d2, exact)
    )
    return ok, {**detail, "branch": "equal-gaps"}


def check_condition3(model: ControlModel, exact: bool = False) -> Cond3Result:
    """Controllability of the bare system under its constant excitation.

    N = 2 and N = 3 use closed-form conditions on the gaps and excitation
    strengths; any N can fall back to the subalgebra-membership test.  At
    N = 3 both methods run and a disagreement raises, since the explicit
    form is supposed to be exact.
    """
    n = model.n_levels
    if n == 2:
        return Cond3Result(ok=_explicit_n2(model, exact), method="explicit-N2",
                           detail={"d1": float(model.excitations[0])})
    if n == 3:
        ok, detail = _explicit_n3(model, exact)
        member = _membership_condition3(model, exact)
        if member != ok:
            raise ContractViolationError(
                f"explicit N=3 condition ({ok}) disagrees with "
                f"subalgebra membership ({member})"
            )
        detail["membership_agrees"] = True
        return Cond3Result(ok=ok, method="explicit-N3", detail=detail)
    ok = _membership_condition3(model, exact)
    return Cond3Result(ok=ok, method="subalgebra-membership", detail={})


def check_conditions(model: ControlModel, exact: bool = False) -> ConditionReport:
    return ConditionReport(
        cond1=check_condition1(model, exact),
        cond2=check_condition2(model, exact),
        cond3=check_condition3(model, exact),
    )
