"""Problem description and Hamiltonian builders.

A :class:`ControlModel` fixes one indirect-control instance: an N-level
system with energies E_j, an M-qubit register with level splittings
omega_j and nearest-neighbour XX chain couplings c_j, a constant
excitation d_j on each adjacent system transition, a table of
system-register couplings, and optionally extra directly drivable
register words.  All parameters are stored as exact rationals
(floats are converted exactly), so every builder can produce either an
exact or a floating :class:`~accessor_ctrl.operators.StructuredOperator`.

The drift splits into four summands, all retrievable individually:

    system ⊗ 1  +  excitation ⊗ 1  +  1 ⊗ register  +  coupling

with the register part itself a sum of the site term (sum of
omega_j Z_j) and the chain term (sum of c_j X_j X_(j+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError
from .operators import (
    GaussianRational,
    PauliString,
    StructuredOperator,
    SystemBasisOp,
    commutator,
)

__all__ = [
    "Coupling",
    "ControlModel",
    "DriftParts",
    "build_drift",
    "build_drift_parts",
    "build_controls",
    "rotate_system_frame",
]


def _fraction(value, what: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{what}: expected a real number, got {value!r}") from exc


@dataclass(frozen=True)
class Coupling:
    """One coupling term g * s_j ⊗ sigma_alpha.

    `k` selects the system factor: 1 for x_j = e_(j,j+1) + e_(j+1,j),
    2 for y_j = i(e_(j,j+1) - e_(j+1,j)).  `alpha` is a register word over
    {X, Y} only.
    """

    j: int
    k: int
    alpha: PauliString
    g: Fraction

    def system_op(self) -> SystemBasisOp:
        if self.k == 1:
            return SystemBasisOp.x(self.j, self.j + 1)
        return SystemBasisOp.y(self.j, self.j + 1)


@dataclass(frozen=True)
class ControlModel:
    """Validated, normalised description of one control instance.

    Use :meth:`create`; energies are mean-shifted there so the system part
    of the drift is traceless.
    """

    n_levels: int
    n_qubits: int
    energies: tuple[Fraction, ...]
    frequencies: tuple[Fraction, ...]
    chain: tuple[Fraction, ...]
    excitations: tuple[Fraction, ...]
    couplings: tuple[Coupling, ...]
    extra_controls: tuple[PauliString, ...]

    @classmethod
    def create(
        cls,
        n_levels: int,
        n_qubits: int,
        energies: Sequence,
        frequencies: Sequence,
        chain: Sequence = (),
        excitations: Sequence = (),
        couplings: Sequence = (),
        extra_controls: Sequence = (),
    ) -> "ControlModel":
        n, m = int(n_levels), int(n_qubits)
        if n < 2:
            raise ValueError(f"N must be >= 2, got {n}")
        if m < 1:
            raise ValueError(f"M must be >= 1, got {m}")
        e = [_fraction(v, "E") for v in energies]
        if len(e) != n:
            raise ValueError(f"E must have length N={n}, got {len(e)}")
        mean = sum(e, Fraction(0)) / n
        e = [v - mean for v in e]
        omega = [_fraction(v, "omega") for v in frequencies]
        if len(omega) != m:
            raise ValueError(f"omega must have length M={m}, got {len(omega)}")
        c = [_fraction(v, "c") for v in chain]
        if len(c) != m - 1:
            raise ValueError(f"c must have length M-1={m - 1}, got {len(c)}")
        d = [_fraction(v, "d") for v in excitations]
        if len(d) != n - 1:
            raise ValueError(f"d must have length N-1={n - 1}, got {len(d)}")
        cp = []
        for item in couplings:
            if isinstance(item, Coupling):
                j, k, alpha, g = item.j, item.k, item.alpha, item.g
            else:
                j, k, alpha, g = item
            j, k = int(j), int(k)
            if not 1 <= j <= n - 1:
                raise ValueError(f"coupling j={j} outside 1..{n - 1}")
            if k not in (1, 2):
                raise ValueError(f"coupling k={k} must be 1 or 2")
            if isinstance(alpha, str):
                alpha = PauliString(alpha)
            if len(alpha) != m:
                raise ValueError(
                    f"coupling alpha length {len(alpha)} != M={m}"
                )
            if any(alpha.label_at(s) not in ("X", "Y") for s in range(1, m + 1)):
                raise ValueError(
                    f"coupling alpha {alpha.labels!r} must use only X and Y"
                )
            cp.append(Coupling(j, k, alpha, _fraction(g, "g")))
        extras = []
        for word in extra_controls:
            if isinstance(word, str):
                word = PauliString(word)
            if len(word) != m:
                raise ValueError(
                    f"extra control length {len(word)} != M={m}"
                )
            if word.is_identity():
                raise ValueError("extra control must not be the identity word")
            extras.append(word)
        return cls(n, m, tuple(e), tuple(omega), tuple(c), tuple(d),
                   tuple(cp), tuple(extras))

    @property
    def dense_dim(self) -> int:
        return self.n_levels * (1 << self.n_qubits)

    def as_dict(self) -> dict:
        """Plain-value echo of the normalised model (report serialisation)."""
        return {
            "N": self.n_levels,
            "M": self.n_qubits,
            "E": [float(v) for v in self.energies],
            "omega": [float(v) for v in self.frequencies],
            "c": [float(v) for v in self.chain],
            "d": [float(v) for v in self.excitations],
            "couplings": [
                {"j": cp.j, "k": cp.k, "alpha": cp.alpha.labels, "g": float(cp.g)}
                for cp in self.couplings
            ],
            "extra_controls": [w.labels for w in self.extra_controls],
        }


# ---------------------------------------------------------------------------
# drift and control builders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftParts:
    """The four drift summands (register part further split in two)."""

    system: StructuredOperator
    excitation: StructuredOperator
    register_site: StructuredOperator
    register_chain: StructuredOperator
    coupling: StructuredOperator

    @property
    def register(self) -> StructuredOperator:
        return self.register_site + self.register_chain

    def total(self) -> StructuredOperator:
        return (self.system + self.excitation + self.register_site
                + self.register_chain + self.coupling)


def _coeff(value: Fraction, exact: bool):
    return GaussianRational(value) if exact else complex(float(value))


def build_drift_parts(model: ControlModel, exact: bool = False) -> DriftParts:
    n, m = model.n_levels, model.n_qubits
    one = SystemBasisOp.one()
    ident = PauliString.identity(m)

    system = StructuredOperator.from_terms(
        n, m,
        [(SystemBasisOp.unit(j, j), ident, _coeff(model.energies[j - 1], exact))
         for j in range(1, n + 1)],
        exact=exact,
    )
    excitation = StructuredOperator.from_terms(
        n, m,
        [(SystemBasisOp.x(j, j + 1), ident, _coeff(model.excitations[j - 1], exact))
         for j in range(1, n)],
        exact=exact,
    )
    site = StructuredOperator.from_terms(
        n, m,
        [(one, PauliString.single(m, j, "Z"), _coeff(model.frequencies[j - 1], exact))
         for j in range(1, m + 1)],
        exact=exact,
    )
    chain_words = []
    for j in range(1, m):
        word = PauliString(
            "".join("X" if s in (j, j + 1) else "I" for s in range(1, m + 1))
        )
        chain_words.append((one, word, _coeff(model.chain[j - 1], exact)))
    chain = StructuredOperator.from_terms(n, m, chain_words, exact=exact)
    coupling = StructuredOperator.from_terms(
        n, m,
        [(cp.system_op(), cp.alpha, _coeff(cp.g, exact)) for cp in model.couplings],
        exact=exact,
    )
    return DriftParts(system, excitation, site, chain, coupling)


def build_drift(model: ControlModel, exact: bool = False) -> StructuredOperator:
    """The full constant Hamiltonian of the coupled system-register pair."""
    return build_drift_parts(model, exact).total()


def build_controls(model: ControlModel, exact: bool = False) -> list[StructuredOperator]:
    """Independently drivable operators, in channel order.

    Two per register qubit (X then Y, qubit 1 first), followed by one
    operator per extra control word.
    """
    n, m = model.n_levels, model.n_qubits
    one = SystemBasisOp.one()
    coeff = GaussianRational(1) if exact else 1 + 0j
    out = []
    for j in range(1, m + 1):
        for label in ("X", "Y"):
            out.append(StructuredOperator.from_terms(
                n, m, [(one, PauliString.single(m, j, label), coeff)], exact=exact
            ))
    for word in model.extra_controls:
        out.append(StructuredOperator.from_terms(
            n, m, [(one, word, coeff)], exact=exact
        ))
    return out


# ---------------------------------------------------------------------------
# frame rotation for the two-level system
# ---------------------------------------------------------------------------

def rotate_system_frame(model: ControlModel) -> StructuredOperator:
    """Drift after rotating the two-level system about its y axis.

    The rotation angle theta = atan2(d_1, omega_S) removes the constant
    x excitation: the system part becomes sqrt(omega_S^2 + d_1^2) * h_1,
    at the price of new z-type coupling terms.  Floating mode only, since
    the rotation coefficients are irrational in general.
    """
    if model.n_levels != 2:
        raise DimensionError("frame rotation is only defined for N = 2")
    omega_s = float(model.energies[0])
    d1 = float(model.excitations[0])
    drift = build_drift(model, exact=False)
    if d1 == 0.0:
        return drift
    theta = math.atan2(d1, omega_s)
    co, si = math.cos(theta / 2), math.sin(theta / 2)
    # u = exp(i * theta * sigma_y / 2); conjugation sends h1 -> cos(theta) h1
    # - sin(theta) x1 and x1 -> cos(theta) x1 + sin(theta) h1
    u = ((co, si), (-si, co))
    entries = []
    for (j, k, p), coeff in drift.terms.items():
        for a in (1, 2):
            ua = u[a - 1][j - 1]
            if ua == 0.0:
                continue
            for b in (1, 2):
                ub = u[b - 1][k - 1]
                if ub == 0.0:
                    continue
                entries.append(((a, b), p, coeff * ua * ub))
    rotated = StructuredOperator.from_terms(2, model.n_qubits, entries, exact=False)
    return rotated.chop()
