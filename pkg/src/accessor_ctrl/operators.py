"""Term-level operator algebra for qudit ⊗ qubit-register Hamiltonians.

Every operator handled by this package is a finite sum

    sum_t  c_t · e_(j_t, k_t) ⊗ sigma_t

where ``e_(j,k)`` is an N-level matrix unit (|j><k|, indices 1-based) and
``sigma_t`` is a Pauli word on M register qubits.  :class:`StructuredOperator`
stores the sum as a canonical mapping ``(j, k, PauliString) -> coefficient``,
so sums, scalar multiples, commutators and inner products are evaluated term
by term without ever building a dense matrix.

Coefficients come in two parallel modes:

* floating mode, plain ``complex`` numbers;
* exact mode, :class:`GaussianRational` values (a pair of
  ``fractions.Fraction``), which every operation of the algebra maps back
  into itself.  Exact results double as the oracle for the floating path.

Dense realisations (:func:`to_dense`) exist for cross-checks and for the
numerical Lie-closure engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError

__all__ = [
    "GaussianRational",
    "PauliString",
    "SystemBasisOp",
    "StructuredOperator",
    "pauli_multiply",
    "commutator",
    "nested_commutator",
    "hs_inner",
    "to_dense",
    "chevalley_terms",
]


# ---------------------------------------------------------------------------
# exact coefficients
# ---------------------------------------------------------------------------

def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float, str)):
        return Fraction(value)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class GaussianRational:
    """Complex number with exact rational real and imaginary parts.

    Closed under +, -, *, / and conjugation; mixing with ``float`` or
    ``complex`` operands promotes the result to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _to_fraction(re))
        object.__setattr__(self, "im", _to_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def from_complex(cls, z: complex) -> "GaussianRational":
        return cls(Fraction(z.real), Fraction(z.imag))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        if isinstance(other, GaussianRational):
            norm = other.re * other.re + other.im * other.im
            if norm == 0:
                raise ZeroDivisionError("division by zero GaussianRational")
            return (self * other.conjugate()) / norm
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def times_i_power(self, k: int) -> "GaussianRational":
        """Multiply by i**k exactly."""
        k %= 4
        if k == 0:
            return self
        if k == 1:
            return GaussianRational(-self.im, self.re)
        if k == 2:
            return -self
        return GaussianRational(self.im, -self.re)

    # -- predicates and conversions ----------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


_I_POW_COMPLEX = (1 + 0j, 1j, -1 + 0j, -1j)


def _times_i_power(coeff, k: int):
    """coeff * i**k, exact in both coefficient modes."""
    k %= 4
    if k == 0:
        return coeff
    if isinstance(coeff, GaussianRational):
        return coeff.times_i_power(k)
    return coeff * _I_POW_COMPLEX[k]


# ---------------------------------------------------------------------------
# Pauli words
# ---------------------------------------------------------------------------

_PAULI_LABELS = "IXYZ"
_LABEL_TO_CODE = {"I": 0, "X": 1, "Y": 2, "Z": 3}

# i-power in sigma_a sigma_b = i**t sigma_(a xor b), rows a, cols b
_PHASE_TABLE = (
    (0, 0, 0, 0),
    (0, 0, 1, 3),
    (0, 3, 0, 1),
    (0, 1, 3, 0),
)

_SINGLE_DENSE = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


class PauliString:
    """Immutable Pauli word on a fixed number of qubits.

    The word is stored packed, two bits per qubit (I=0, X=1, Y=2, Z=3);
    qubit 1 is the first character of the label string and the leftmost
    tensor factor of the dense realisation.  A zero-qubit word is allowed
    and acts as the scalar 1.
    """

    __slots__ = ("_code", "_m")

    def __init__(self, labels: str | Iterable[str]):
        if not isinstance(labels, str):
            labels = "".join(labels)
        code = 0
        for pos, ch in enumerate(labels):
            try:
                code |= _LABEL_TO_CODE[ch] << (2 * pos)
            except KeyError:
                raise ValueError(f"invalid Pauli label {ch!r} in {labels!r}") from None
        self._code = code
        self._m = len(labels)

    @classmethod
    def _from_code(cls, code: int, m: int) -> "PauliString":
        obj = object.__new__(cls)
        obj._code = code
        obj._m = m
        return obj

    @classmethod
    def identity(cls, m: int) -> "PauliString":
        return cls._from_code(0, m)

    @classmethod
    def single(cls, m: int, site: int, label: str) -> "PauliString":
        """Word with `label` on 1-based `site` and identity elsewhere."""
        if not 1 <= site <= m:
            raise ValueError(f"site {site} outside 1..{m}")
        return cls._from_code(_LABEL_TO_CODE[label] << (2 * (site - 1)), m)

    @property
    def code(self) -> int:
        return self._code

    @property
    def labels(self) -> str:
        return "".join(
            _PAULI_LABELS[(self._code >> (2 * i)) & 3] for i in range(self._m)
        )

    def label_at(self, site: int) -> str:
        return _PAULI_LABELS[(self._code >> (2 * (site - 1))) & 3]

    def __len__(self):
        return self._m

    def is_identity(self) -> bool:
        return self._code == 0

    def y_count(self) -> int:
        """Number of Y factors in the word."""
        n = 0
        code = self._code
        for _ in range(self._m):
            if code & 3 == 2:
                n += 1
            code >>= 2
        return n

    def xy_complement(self) -> "PauliString":
        """Swap X and Y on every site; only defined for words over {X, Y}."""
        out = 0
        code = self._code
        for pos in range(self._m):
            c = (code >> (2 * pos)) & 3
            if c == 1:
                out |= 2 << (2 * pos)
            elif c == 2:
                out |= 1 << (2 * pos)
            else:
                raise ValueError(f"complement undefined for label {_PAULI_LABELS[c]!r}")
        return PauliString._from_code(out, self._m)

    def dense(self) -> np.ndarray:
        return _pauli_dense(self._code, self._m)

    def __eq__(self, other):
        if isinstance(other, PauliString):
            return self._code == other._code and self._m == other._m
        return NotImplemented

    def __hash__(self):
        return hash((self._code, self._m))

    def __repr__(self):
        return f"PauliString({self.labels!r})"


@lru_cache(maxsize=4096)
def _pauli_dense(code: int, m: int) -> np.ndarray:
    mat = np.eye(1, dtype=complex)
    for pos in range(m):
        mat = np.kron(mat, _SINGLE_DENSE[(code >> (2 * pos)) & 3])
    mat.setflags(write=False)
    return mat


def _pauli_mul_codes(a: int, b: int, m: int) -> tuple[int, int]:
    """(i-power, product code) for the packed words a, b."""
    phase = 0
    for pos in range(m):
        phase += _PHASE_TABLE[(a >> (2 * pos)) & 3][(b >> (2 * pos)) & 3]
    return phase & 3, a ^ b


def pauli_multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Product of two Pauli words: returns (phase, word) with phase in {±1, ±i}."""
    if len(a) != len(b):
        raise DimensionError(f"word lengths differ: {len(a)} vs {len(b)}")
    t, code = _pauli_mul_codes(a.code, b.code, len(a))
    return _I_POW_COMPLEX[t], PauliString._from_code(code, len(a))


# ---------------------------------------------------------------------------
# system-side basis operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemBasisOp:
    """A named N-level operator: matrix unit e_jk or a Chevalley combination.

    Kinds: ``E`` is the raw unit e_jk; ``X`` is e_jk + e_kj; ``Y`` is
    i(e_jk - e_kj); ``H`` is e_jj - e_(j+1,j+1); ``I`` the identity.
    """

    kind: str
    j: int = 0
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("E", "X", "Y", "H", "I"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind in ("X", "Y") and not 1 <= self.j < self.k:
            raise ValueError(f"{self.kind}({self.j},{self.k}) needs 1 <= j < k")
        if self.kind == "E" and (self.j < 1 or self.k < 1):
            raise ValueError("E indices are 1-based")
        if self.kind == "H" and self.j < 1:
            raise ValueError("H index is 1-based")

    @classmethod
    def unit(cls, j: int, k: int) -> "SystemBasisOp":
        return cls("E", j, k)

    @classmethod
    def x(cls, j: int, k: int) -> "SystemBasisOp":
        return cls("X", j, k)

    @classmethod
    def y(cls, j: int, k: int) -> "SystemBasisOp":
        return cls("Y", j, k)

    @classmethod
    def h(cls, j: int) -> "SystemBasisOp":
        return cls("H", j, j + 1)

    @classmethod
    def one(cls) -> "SystemBasisOp":
        return cls("I")

    def expand(self, n: int, exact: bool = False):
        """Raw e_jk decomposition as ((j, k), coeff) pairs, validated for n."""
        one = GaussianRational(1) if exact else 1 + 0j
        if self.kind == "I":
            return tuple(((j, j), one) for j in range(1, n + 1))
        if self.kind == "H":
            if self.j > n - 1:
                raise DimensionError(f"H({self.j}) outside 1..{n - 1}")
            return (((self.j, self.j), one), ((self.j + 1, self.j + 1), -one))
        if self.j > n or self.k > n:
            raise DimensionError(f"{self.kind}({self.j},{self.k}) outside 1..{n}")
        if self.kind == "E":
            return (((self.j, self.k), one),)
        if self.kind == "X":
            return (((self.j, self.k), one), ((self.k, self.j), one))
        # Y: i e_jk - i e_kj
        im = _times_i_power(one, 1)
        return (((self.j, self.k), im), ((self.k, self.j), -im))

    def __str__(self):
        if self.kind == "I":
            return "1"
        if self.kind == "H":
            return f"h{self.j}"
        return f"{self.kind.lower()}{self.j}{self.k}"


# ---------------------------------------------------------------------------
# structured operators
# ---------------------------------------------------------------------------

def _coerce_coeff(value, exact: bool):
    if exact:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        if isinstance(value, complex):
            return GaussianRational.from_complex(value)
        if isinstance(value, float):
            return GaussianRational(value)
        raise TypeError(f"cannot use {value!r} as an exact coefficient")
    if isinstance(value, GaussianRational):
        return complex(value)
    return complex(value)


class StructuredOperator:
    """Canonical term map ``(j, k, PauliString) -> coefficient`` on fixed (N, M).

    Instances are immutable; all operations return new objects, and
    canonical form (merged keys, no stored zeros) is restored after every
    operation, so `==` is meaningful structural equality.
    """

    __slots__ = ("_n", "_m", "_terms", "_exact")

    def __init__(self, n: int, m: int, terms: Mapping, exact: bool):
        # assumes `terms` is already canonical; use from_terms publicly
        self._n = n
        self._m = m
        self._terms = dict(terms)
        self._exact = exact

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_terms(cls, n: int, m: int, entries=(), exact: bool | None = None):
        """Build and canonicalise an operator.

        `entries` is an iterable of (system, pauli, coeff) with `system`
        either a :class:`SystemBasisOp` or a raw (j, k) pair and `pauli`
        either a :class:`PauliString` or a label string.  Chevalley system
        operators are expanded to raw units immediately.
        """
        if n < 1 or m < 0:
            raise DimensionError(f"invalid ambient dims N={n}, M={m}")
        items = []
        for system, pauli, coeff in entries:
            if isinstance(pauli, str):
                pauli = PauliString(pauli)
            if len(pauli) != m:
                raise DimensionError(f"Pauli word length {len(pauli)} != M={m}")
            items.append((system, pauli, coeff))
        if exact is None:
            exact = all(
                isinstance(c, (int, Fraction, GaussianRational)) for _, _, c in items
            )
        acc: dict = {}
        for system, pauli, coeff in items:
            coeff = _coerce_coeff(coeff, exact)
            if isinstance(system, SystemBasisOp):
                expansion = system.expand(n, exact)
            else:
                j, k = system
                if not (1 <= j <= n and 1 <= k <= n):
                    raise DimensionError(f"unit index ({j},{k}) outside 1..{n}")
                expansion = (((j, k), GaussianRational(1) if exact else 1 + 0j),)
            for (j, k), factor in expansion:
                key = (j, k, pauli)
                prev = acc.get(key)
                acc[key] = coeff * factor if prev is None else prev + coeff * factor
        return cls(n, m, {k: v for k, v in acc.items() if v}, exact)

    @classmethod
    def zero(cls, n: int, m: int, exact: bool = False):
        return cls(n, m, {}, exact)

    @classmethod
    def identity(cls, n: int, m: int, exact: bool = False):
        return cls.from_terms(
            n, m, [(SystemBasisOp.one(), PauliString.identity(m), 1)], exact=exact
        )

    # -- simple accessors ----------------------------------------------------

    @property
    def n_levels(self) -> int:
        return self._n

    @property
    def n_qubits(self) -> int:
        return self._m

    @property
    def dims(self) -> tuple[int, int]:
        return self._n, self._m

    @property
    def dense_dim(self) -> int:
        return self._n * (1 << self._m)

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def coefficient(self, system, pauli):
        """Coefficient of e_(j,k) ⊗ pauli (zero when absent)."""
        if isinstance(pauli, str):
            pauli = PauliString(pauli)
        j, k = system
        default = GaussianRational(0) if self._exact else 0j
        return self._terms.get((j, k, pauli), default)

    # -- arithmetic -----------------------------------------------------------

    def _check_same_space(self, other: "StructuredOperator"):
        if self.dims != other.dims:
            raise DimensionError(f"ambient dims differ: {self.dims} vs {other.dims}")

    @staticmethod
    def _align(a: "StructuredOperator", b: "StructuredOperator"):
        if a._exact == b._exact:
            return a, b
        return a.to_float(), b.to_float()

    def __add__(self, other):
        if not isinstance(other, StructuredOperator):
            return NotImplemented
        self._check_same_space(other)
        a, b = self._align(self, other)
        acc = dict(a._terms)
        for key, c in b._terms.items():
            prev = acc.get(key)
            val = c if prev is None else prev + c
            if val:
                acc[key] = val
            elif prev is not None:
                del acc[key]
        return StructuredOperator(a._n, a._m, acc, a._exact)

    def __sub__(self, other):
        if not isinstance(other, StructuredOperator):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return StructuredOperator(
            self._n, self._m, {k: -v for k, v in self._terms.items()}, self._exact
        )

    def __mul__(self, scalar):
        if isinstance(scalar, StructuredOperator):
            return NotImplemented
        if self._exact and isinstance(scalar, (int, Fraction, GaussianRational)):
            if not scalar:
                return StructuredOperator.zero(self._n, self._m, exact=True)
            return StructuredOperator(
                self._n, self._m,
                {k: v * scalar for k, v in self._terms.items()}, True,
            )
        scalar = complex(scalar)
        out = self.to_float() if self._exact else self
        if scalar == 0:
            return StructuredOperator.zero(self._n, self._m, exact=False)
        return StructuredOperator(
            out._n, out._m, {k: v * scalar for k, v in out._terms.items()}, False
        )

    __rmul__ = __mul__

    def times_i(self) -> "StructuredOperator":
        """Multiply by the imaginary unit, exactly in both modes."""
        return StructuredOperator(
            self._n, self._m,
            {k: _times_i_power(v, 1) for k, v in self._terms.items()},
            self._exact,
        )

    def dagger(self) -> "StructuredOperator":
        acc = {}
        for (j, k, p), c in self._terms.items():
            cc = c.conjugate()
            key = (k, j, p)
            prev = acc.get(key)
            acc[key] = cc if prev is None else prev + cc
        return StructuredOperator(
            self._n, self._m, {k: v for k, v in acc.items() if v}, self._exact
        )

    # -- predicates ------------------------------------------------------------

    def is_hermitian(self, tol: float = 0.0) -> bool:
        diff = self - self.dagger()
        if not diff._terms:
            return True
        if self._exact and tol == 0.0:
            return False
        return diff.hs_norm() <= tol

    def is_skew_hermitian(self, tol: float = 0.0) -> bool:
        diff = self + self.dagger()
        if not diff._terms:
            return True
        if self._exact and tol == 0.0:
            return False
        return diff.hs_norm() <= tol

    def hs_norm(self) -> float:
        val = hs_inner(self, self)
        return float(abs(val)) ** 0.5

    def chop(self, tol: float = 1e-14) -> "StructuredOperator":
        """Drop floating terms that are negligible relative to the largest.

        Exact operators are returned unchanged; they carry no roundoff.
        """
        if self._exact or not self._terms:
            return self
        cut = tol * max(abs(v) for v in self._terms.values())
        return StructuredOperator(
            self._n, self._m,
            {k: v for k, v in self._terms.items() if abs(v) > cut}, False,
        )

    def to_float(self) -> "StructuredOperator":
        if not self._exact:
            return self
        return StructuredOperator(
            self._n, self._m,
            {k: complex(v) for k, v in self._terms.items()}, False,
        )

    def to_exact(self) -> "StructuredOperator":
        if self._exact:
            return self
        return StructuredOperator(
            self._n, self._m,
            {k: GaussianRational.from_complex(v) for k, v in self._terms.items()},
            True,
        )

    def isclose(self, other: "StructuredOperator", tol: float = 1e-12) -> bool:
        self._check_same_space(other)
        return (self - other).hs_norm() <= tol

    def __eq__(self, other):
        if not isinstance(other, StructuredOperator):
            return NotImplemented
        return (
            self.dims == other.dims
            and self._exact == other._exact
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self._n, self._m, frozenset(self._terms.items())))

    def __repr__(self):
        return (
            f"StructuredOperator(N={self._n}, M={self._m}, "
            f"terms={len(self._terms)}, exact={self._exact})"
        )

    def __str__(self):
        parts = [
            f"({coeff}) {name} (x) {p.labels or '1'}"
            for name, p, coeff in chevalley_terms(self)
        ]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# algebra operations
# ---------------------------------------------------------------------------

def commutator(a: StructuredOperator, b: StructuredOperator) -> StructuredOperator:
    """[a, b] evaluated term by term.

    Uses the matrix-unit rule e_ab e_cd = delta_bc e_ad on the system factor
    and the phase table on the Pauli factor; the result is canonical.
    """
    a._check_same_space(b)
    a, b = StructuredOperator._align(a, b)
    m = a.n_qubits
    acc: dict = {}

    def _bump(key, val):
        prev = acc.get(key)
        acc[key] = val if prev is None else prev + val

    for (j1, k1, p1), c1 in a._terms.items():
        for (j2, k2, p2), c2 in b._terms.items():
            c12 = c1 * c2
            fwd = k1 == j2
            rev = k2 == j1
            if not (fwd or rev):
                continue
            t_fwd, code = _pauli_mul_codes(p1.code, p2.code, m)
            q = PauliString._from_code(code, m)
            if fwd:
                _bump((j1, k2, q), _times_i_power(c12, t_fwd))
            if rev:
                t_rev, _ = _pauli_mul_codes(p2.code, p1.code, m)
                _bump((j2, k1, q), -_times_i_power(c12, t_rev))
    return StructuredOperator(
        a.n_levels, m, {k: v for k, v in acc.items() if v}, a.exact
    )

def nested_commutator(sequence, target: StructuredOperator) -> StructuredOperator:
    """[s_k, [s_(k-1), [... [s_1, target] ...]]], innermost factor first.

    An empty sequence returns the target unchanged.
    """
    out = target
    for op in sequence:
        out = commutator(op, out)
    return out


def hs_inner(a: StructuredOperator, b: StructuredOperator):
    """Hilbert-Schmidt inner product tr(a† b), computed without densifying.

    Matrix units and Pauli words are trace-orthogonal, so the sum reduces to
    2^M * sum over shared keys of conj(c_a) * c_b.
    """
    a._check_same_space(b)
    a, b = StructuredOperator._align(a, b)
    scale = 1 << a.n_qubits
    if a.exact:
        total = GaussianRational(0)
        for key, ca in a._terms.items():
            cb = b._terms.get(key)
            if cb is not None:
                total = total + ca.conjugate() * cb
        return total * scale
    total = 0j
    for key, ca in a._terms.items():
        cb = b._terms.get(key)
        if cb is not None:
            total += ca.conjugate() * cb
    return total * scale


def to_dense(op: StructuredOperator, basis_order=None, exact: bool = False):
    """Dense matrix of `op` on the 2^M * N product space.

    The default basis is lexicographic and system-major: index
    (j - 1) * 2^M + a with `a` the register state read with qubit 1 as the
    most significant bit.  `basis_order` permutes the product labels.  With
    `exact=True` (exact-mode operators only) the result is an object array
    of :class:`GaussianRational` entries.
    """
    n, m = op.dims
    dim = op.dense_dim
    reg = 1 << m
    if exact:
        if not op.exact:
            raise ValueError("exact dense form requires an exact-mode operator")
        out = np.full((dim, dim), GaussianRational(0), dtype=object)
        for (j, k, p), coeff in op._terms.items():
            block = _pauli_dense(p.code, m)
            r0, c0 = (j - 1) * reg, (k - 1) * reg
            for r in range(reg):
                for c in range(reg):
                    z = block[r, c]
                    if z:
                        out[r0 + r, c0 + c] = (
                            out[r0 + r, c0 + c]
                            + coeff * GaussianRational.from_complex(z)
                        )
    else:
        out = np.zeros((dim, dim), dtype=complex)
        for (j, k, p), coeff in op._terms.items():
            block = _pauli_dense(p.code, m)
            r0, c0 = (j - 1) * reg, (k - 1) * reg
            out[r0:r0 + reg, c0:c0 + reg] += complex(coeff) * block
    if basis_order is not None:
        perm = list(basis_order)
        if sorted(perm) != list(range(dim)):
            raise ValueError(f"basis_order is not a permutation of 0..{dim - 1}")
        out = out[np.ix_(perm, perm)]
    return out


# ---------------------------------------------------------------------------
# Chevalley reassembly (display form)
# ---------------------------------------------------------------------------

def chevalley_terms(op: StructuredOperator):
    """Rewrite the raw unit expansion as Chevalley combinations.

    Returns a list of (SystemBasisOp, PauliString, coeff) with the system
    factor expressed through identity, h_j, x_jk and y_jk.  Exact operators
    reassemble exactly; this is the inverse of the expansion performed by
    :meth:`StructuredOperator.from_terms`.
    """
    n = op.n_levels
    by_pauli: dict[PauliString, dict] = {}
    for (j, k, p), coeff in op._terms.items():
        by_pauli.setdefault(p, {})[(j, k)] = coeff
    half = Fraction(1, 2) if op.exact else 0.5
    result = []
    for p in sorted(by_pauli, key=lambda q: q.code):
        sys = by_pauli[p]
        diag = [sys.get((j, j)) for j in range(1, n + 1)]
        zero = GaussianRational(0) if op.exact else 0j
        diag = [zero if c is None else c for c in diag]
        mean = sum(diag, zero) / n
        if mean:
            result.append((SystemBasisOp.one(), p, mean))
        acc = zero
        for j in range(1, n):
            acc = acc + (diag[j - 1] - mean)
            if acc:
                result.append((SystemBasisOp.h(j), p, acc))
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                cjk = sys.get((j, k), zero)
                ckj = sys.get((k, j), zero)
                if not cjk and not ckj:
                    continue
                xc = (cjk + ckj) * half
                yc = _times_i_power((ckj - cjk) * half, 1)
                if xc:
                    result.append((SystemBasisOp.x(j, k), p, xc))
                if yc:
                    result.append((SystemBasisOp.y(j, k), p, yc))
    return result
