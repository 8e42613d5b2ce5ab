"""Lie-closure computation for sets of skew-Hermitian structured operators.

Given Hamiltonians H_1..H_r, the engine computes the real Lie algebra
generated by iH_1..iH_r inside su(2^M * N) and reports its dimension; the
system is completely controllable exactly when the dimension reaches
(2^M * N)^2 - 1.

The closure iteration is breadth-first and deterministic: an orthonormal
basis of the current span is kept, and each sweep commutes every basis
element added by the previous sweep against all earlier elements, in index
order, appending the orthogonalised residual whenever its norm exceeds
tol * (norm of the raw commutator).  The identity direction never appears
because generators are traceless and brackets preserve tracelessness.

Two arithmetic modes are provided.

* Floating mode works on dense complex matrices, with candidate brackets
  evaluated in batches and Gram-Schmidt decisions at the relative
  tolerance above.
* Exact mode makes true-zero decisions.  For small ambient spaces the
  elements stay structured and rank decisions use fraction-exact row
  reduction of their real coordinates.  For larger spaces the elements
  are reduced modulo two independent 29-bit primes and row reduction is
  performed in both prime fields simultaneously; a candidate is new only
  if both fields agree (they disagree with probability ~ 2^-58 per
  decision, which the engine treats as an internal error).  Either way no
  floating tolerance enters the rank logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ContractViolationError, DimensionError
from .operators import (
    GaussianRational,
    PauliString,
    StructuredOperator,
    SystemBasisOp,
    commutator,
    to_dense,
)

__all__ = [
    "ClosureResult",
    "lie_closure",
    "membership",
    "check_sp4",
    "sp4_defect",
    "sp4_reference_basis",
    "SP4_BASIS_ORDER",
]

_SKEW_TOL = 1e-10
_CHUNK = 256
_MODULAR_WIDTH = 100          # real coordinate count above which exact mode goes modular
_PRIMES = (268435399, 268435367)   # < 2**28; 64-term int64 dot products cannot overflow
_MOD_BLOCK = 64


@dataclass
class ClosureResult:
    """Outcome of one closure run.

    `basis` holds Hilbert-Schmidt orthonormal skew-Hermitian dense matrices
    spanning the computed algebra; `iterations` counts sweeps;
    `residual_floor` is the largest relative residual among rejected
    candidates (0.0 when nothing was rejected or decisions were exact).
    """

    dimension: int
    basis: np.ndarray
    expected_dim: int
    controllable: bool
    iterations: int
    residual_floor: float
    mode: str = "float"
    exact_elements: list = field(default_factory=list, repr=False)


# ---------------------------------------------------------------------------
# shared sweep driver
# ---------------------------------------------------------------------------

def _sweep_pairs(cohort_lo: int, cohort_hi: int):
    for i in range(cohort_lo, cohort_hi):
        for j in range(i):
            yield i, j


def _prepare_generators(generators, tol: float):
    """Multiply by i, verify skew-Hermiticity, return structured operators."""
    if not generators:
        raise ValueError("need at least one generator")
    dims = generators[0].dims
    ops = []
    for g in generators:
        if g.dims != dims:
            raise DimensionError(f"generator dims {g.dims} != {dims}")
        ig = g.times_i()
        defect = (ig + ig.dagger()).hs_norm()
        scale = max(ig.hs_norm(), 1.0)
        if defect > _SKEW_TOL * scale:
            raise ContractViolationError(
                f"generator is not Hermitian (skew defect {defect:.3e})"
            )
        ops.append(ig)
    return ops


# ---------------------------------------------------------------------------
# floating engine
# ---------------------------------------------------------------------------

class _FloatSpan:
    """Orthonormal basis of skew-Hermitian matrices with batched projection."""

    def __init__(self, dim: int, expected: int):
        self.dim = dim
        self.expected = expected
        self.mats = np.zeros((expected, dim, dim), dtype=complex)
        self.count = 0
        self.floor = 0.0

    @property
    def vecs(self) -> np.ndarray:
        return self.mats[: self.count].reshape(self.count, -1)

    def project_out(self, v: np.ndarray) -> np.ndarray:
        # two passes keep orthogonality near machine precision
        for _ in range(2):
            if self.count:
                coeffs = (self.vecs.conj() @ v).real
                v = v - self.vecs.T @ coeffs
        return v

    def try_add(self, mat: np.ndarray, raw_norm: float, tol: float) -> bool:
        if raw_norm == 0.0:
            return False
        v = self.project_out(mat.reshape(-1))
        r = np.linalg.norm(v)
        if r > tol * raw_norm:
            m = (v / r).reshape(self.dim, self.dim)
            m = 0.5 * (m - m.conj().T)       # re-symmetrise roundoff
            m /= np.linalg.norm(m)
            self.mats[self.count] = m
            self.count += 1
            return True
        if raw_norm > 0.0:
            self.floor = max(self.floor, r / raw_norm)
        return False


def _closure_float(ops, expected: int, tol: float) -> ClosureResult:
    dim = ops[0].dense_dim
    span = _FloatSpan(dim, expected)
    for op in ops:
        mat = to_dense(op)
        nrm = np.linalg.norm(mat)
        if nrm > 0:
            span.try_add(mat / nrm, 1.0, tol)

    sweeps = 0
    lo, hi = 0, span.count
    while hi > lo and span.count < expected:
        sweeps += 1
        pairs = list(_sweep_pairs(lo, hi))
        for start in range(0, len(pairs), _CHUNK):
            chunk = pairs[start:start + _CHUNK]
            ii = np.fromiter((p[0] for p in chunk), int, len(chunk))
            jj = np.fromiter((p[1] for p in chunk), int, len(chunk))
            a = span.mats[ii]
            b = span.mats[jj]
            comm = a @ b - b @ a
            raws = np.linalg.norm(comm.reshape(len(chunk), -1), axis=1)
            # batch projection against the snapshot prunes most candidates
            vecs = comm.reshape(len(chunk), -1)
            coeffs = (vecs @ span.vecs.conj().T).real
            resid = vecs - coeffs @ span.vecs
            rnorms = np.linalg.norm(resid, axis=1)
            for row in range(len(chunk)):
                if raws[row] == 0.0:
                    continue
                if rnorms[row] <= tol * raws[row]:
                    span.floor = max(span.floor, rnorms[row] / raws[row])
                    continue
                if span.try_add(resid[row].reshape(dim, dim), raws[row], tol):
                    if span.count >= expected:
                        break
            if span.count >= expected:
                break
        lo, hi = hi, span.count

    n = span.count
    return ClosureResult(
        dimension=n,
        basis=span.mats[:n].copy(),
        expected_dim=expected,
        controllable=n == expected,
        iterations=sweeps,
        residual_floor=span.floor,
        mode="float",
    )


# ---------------------------------------------------------------------------
# exact engine, structured elements with fraction-exact rank decisions
# ---------------------------------------------------------------------------

def _real_coordinate_index(n: int, m: int):
    """Column index for every real coordinate of a skew-Hermitian operator.

    Off-diagonal system pairs (j < k) contribute the real and imaginary
    parts of the e_jk coefficient; diagonal entries contribute only the
    imaginary part (the real part vanishes by skew-Hermiticity).
    """
    index: dict = {}
    col = 0
    words = 1 << (2 * m)
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            for code in range(words):
                if j == k:
                    index[("im", j, k, code)] = col
                    col += 1
                else:
                    index[("re", j, k, code)] = col
                    index[("im", j, k, code)] = col + 1
                    col += 2
    return index, col


def _exact_coordinates(op: StructuredOperator, index: dict, width: int):
    """Real coordinate vector of an exact skew-Hermitian operator."""
    vec = [Fraction(0)] * width
    for (j, k, p), c in op.terms.items():
        if j > k:
            continue       # mirrored by skew-Hermiticity
        if j == k:
            if c.re:
                raise ContractViolationError(
                    "diagonal coefficient with a real part is not skew-Hermitian"
                )
            vec[index[("im", j, k, p.code)]] = c.im
        else:
            vec[index[("re", j, k, p.code)]] = c.re
            vec[index[("im", j, k, p.code)]] = c.im
    return vec


class _FractionRref:
    """Row-echelon rank tracker over the rationals."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, vec):
        for row, pc in zip(self.rows, self.pivots):
            f = vec[pc]
            if f:
                vec = [a - f * b for a, b in zip(vec, row)]
        return vec

    def try_add(self, vec) -> bool:
        vec = self.reduce(vec)
        for pc, value in enumerate(vec):
            if value:
                inv = Fraction(1) / value
                self.rows.append([a * inv for a in vec])
                self.pivots.append(pc)
                return True
        return False

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))


def _closure_exact_structured(ops, expected: int) -> ClosureResult:
    n, m = ops[0].dims
    index, width = _real_coordinate_index(n, m)
    rref = _FractionRref(width)
    elements: list[StructuredOperator] = []

    def try_add(op: StructuredOperator) -> bool:
        if not len(op):
            return False
        if rref.try_add(_exact_coordinates(op, index, width)):
            elements.append(op)
            return True
        return False

    for op in ops:
        try_add(op)
    sweeps = 0
    lo, hi = 0, len(elements)
    while hi > lo and len(elements) < expected:
        sweeps += 1
        for i, j in _sweep_pairs(lo, hi):
            if try_add(commutator(elements[i], elements[j])):
                if len(elements) >= expected:
                    break
        lo, hi = hi, len(elements)

    return ClosureResult(
        dimension=len(elements),
        basis=_orthonormal_dense(elements),
        expected_dim=expected,
        controllable=len(elements) == expected,
        iterations=sweeps,
        residual_floor=0.0,
        mode="exact",
        exact_elements=elements,
    )


def _orthonormal_dense(elements) -> np.ndarray:
    if not elements:
        return np.zeros((0, 0, 0), dtype=complex)
    dim = elements[0].dense_dim
    flat = np.stack([to_dense(e).reshape(-1) for e in elements])
    q, _ = np.linalg.qr(flat.T)
    return q.T.reshape(len(elements), dim, dim)


# ---------------------------------------------------------------------------
# exact engine, dense elements over two prime fields
# ---------------------------------------------------------------------------

class _ModularRref:
    """Fully reduced row echelon form over Z_p, vectorised row operations."""

    def __init__(self, width: int, p: int):
        self.p = p
        self.width = width
        self.rows = np.zeros((0, width), dtype=np.int64)
        self.pivots: list[int] = []

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        if self.pivots:
            coeffs = vec[self.pivots]
            if coeffs.any():
                # blockwise accumulation keeps every dot product inside int64
                acc = np.zeros(self.width, dtype=np.int64)
                for lo in range(0, len(self.pivots), _MOD_BLOCK):
                    acc = (acc + coeffs[lo:lo + _MOD_BLOCK]
                           @ self.rows[lo:lo + _MOD_BLOCK]) % self.p
                vec = (vec - acc) % self.p
        return vec

    def try_add(self, vec: np.ndarray) -> bool:
        vec = self.reduce(vec)
        nz = np.nonzero(vec)[0]
        if nz.size == 0:
            return False
        pc = int(nz[0])
        inv = pow(int(vec[pc]), self.p - 2, self.p)
        newrow = (vec * inv) % self.p
        if self.pivots:
            col = self.rows[:, pc].copy()
            if col.any():
                self.rows = (self.rows - np.outer(col, newrow)) % self.p
        self.rows = np.vstack([self.rows, newrow[None, :]])
        self.pivots.append(pc)
        return True


def _pauli_dense_int(code: int, m: int):
    """(real, imag) integer dense matrices of a Pauli word."""
    re = np.eye(1, dtype=np.int64)
    im = np.zeros((1, 1), dtype=np.int64)
    singles = {
        0: (np.eye(2, dtype=np.int64), np.zeros((2, 2), dtype=np.int64)),
        1: (np.array([[0, 1], [1, 0]], dtype=np.int64), np.zeros((2, 2), dtype=np.int64)),
        2: (np.zeros((2, 2), dtype=np.int64), np.array([[0, -1], [1, 0]], dtype=np.int64)),
        3: (np.array([[1, 0], [0, -1]], dtype=np.int64), np.zeros((2, 2), dtype=np.int64)),
    }
    for pos in range(m):
        sr, si = singles[(code >> (2 * pos)) & 3]
        re, im = np.kron(re, sr) - np.kron(im, si), np.kron(re, si) + np.kron(im, sr)
    return re, im


def _mod_value(x: Fraction, p: int) -> int:
    den = x.denominator % p
    if den == 0:
        raise ContractViolationError("coefficient denominator divisible by field prime")
    return (x.numerator % p) * pow(den, p - 2, p) % p


def _dense_mod(op: StructuredOperator, p: int):
    n, m = op.dims
    reg = 1 << m
    dim = n * reg
    re = np.zeros((dim, dim), dtype=np.int64)
    im = np.zeros((dim, dim), dtype=np.int64)
    for (j, k, pauli), c in op.terms.items():
        cr, ci = _mod_value(c.re, p), _mod_value(c.im, p)
        pr, pi = _pauli_dense_int(pauli.code, m)
        r0, c0 = (j - 1) * reg, (k - 1) * reg
        re[r0:r0 + reg, c0:c0 + reg] += cr * pr - ci * pi
        im[r0:r0 + reg, c0:c0 + reg] += cr * pi + ci * pr
    return re % p, im % p


class _ModularField:
    """All per-prime state: elements, rank tracker, bracket arithmetic."""

    def __init__(self, width: int, p: int):
        self.p = p
        self.rref = _ModularRref(width, p)
        self.elements: list[tuple[np.ndarray, np.ndarray]] = []

    def coords(self, re: np.ndarray, im: np.ndarray) -> np.ndarray:
        return np.concatenate([re.reshape(-1), im.reshape(-1)])

    def bracket(self, a, b):
        ar, ai = a
        br, bi = b
        p = self.p
        ab_r = (ar @ br - ai @ bi) % p
        ab_i = (ar @ bi + ai @ br) % p
        ba_r = (br @ ar - bi @ ai) % p
        ba_i = (br @ ai + bi @ ar) % p
        return (ab_r - ba_r) % p, (ab_i - ba_i) % p

    def try_add(self, mats) -> bool:
        if self.rref.try_add(self.coords(*mats)):
            self.elements.append(mats)
            return True
        return False


def _closure_exact_modular(ops, expected: int) -> ClosureResult:
    dim = ops[0].dense_dim
    fields = [_ModularField(2 * dim * dim, p) for p in _PRIMES]
    float_elems: list[np.ndarray] = []

    def try_add(mod_mats, float_mat) -> bool:
        added = [f.try_add(m) for f, m in zip(fields, mod_mats)]
        if added[0] != added[1]:
            raise ContractViolationError(
                "prime fields disagree on rank; rerun with different primes"
            )
        if added[0]:
            # keep only the direction: nested brackets blow up in magnitude
            float_elems.append(float_mat / np.linalg.norm(float_mat))
        return added[0]

    for op in ops:
        try_add([_dense_mod(op, f.p) for f in fields], to_dense(op))

    count = len(float_elems)
    sweeps = 0
    lo, hi = 0, count
    while hi > lo and len(float_elems) < expected:
        sweeps += 1
        for i, j in _sweep_pairs(lo, hi):
            mod_mats = [f.bracket(f.elements[i], f.elements[j]) for f in fields]
            fm = float_elems[i] @ float_elems[j] - float_elems[j] @ float_elems[i]
            if try_add(mod_mats, fm):
                if len(float_elems) >= expected:
                    break
        lo, hi = hi, len(float_elems)

    n = len(float_elems)
    flat = np.stack([m.reshape(-1) for m in float_elems])
    q, _ = np.linalg.qr(flat.T)
    return ClosureResult(
        dimension=n,
        basis=q.T.reshape(n, dim, dim),
        expected_dim=expected,
        controllable=n == expected,
        iterations=sweeps,
        residual_floor=0.0,
        mode="exact",
    )


# ---------------------------------------------------------------------------
# public interface
# ---------------------------------------------------------------------------

def lie_closure(generators, tol: float = 1e-9, exact: bool = False) -> ClosureResult:
    """Real Lie algebra generated by i * (each Hamiltonian in `generators`).

    Generators must be Hermitian structured operators on one common ambient
    space; the engine multiplies them by i itself and, in floating mode,
    rescales them to unit norm (the closure is scale invariant).  Exact mode
    requires exact-mode operators.
    """
    ops = _prepare_generators(list(generators), tol)
    n, m = ops[0].dims
    expected = (ops[0].dense_dim) ** 2 - 1
    if exact:
        if not all(op.exact for op in ops):
            raise ValueError("exact closure requires exact-mode generators")
        width = n * n * (1 << (2 * m))
        if width <= _MODULAR_WIDTH:
            return _closure_exact_structured(ops, expected)
        return _closure_exact_modular(ops, expected)
    return _closure_float(ops, expected, tol)


def membership(
    candidate: StructuredOperator, closure: ClosureResult, tol: float = 1e-9
) -> tuple[bool, float]:
    """Whether `candidate` lies in the span of the closure basis.

    Returns (verdict, residual norm).  The zero operator belongs to every
    subspace by convention.  The candidate must be skew-Hermitian.
    """
    mat = to_dense(candidate)
    nrm = np.linalg.norm(mat)
    if nrm == 0.0:
        return True, 0.0
    if np.linalg.norm(mat + mat.conj().T) > _SKEW_TOL * nrm:
        raise ContractViolationError("membership candidate is not skew-Hermitian")
    if closure.dimension and mat.shape != closure.basis[0].shape:
        raise DimensionError(
            f"candidate dim {mat.shape[0]} != closure dim {closure.basis[0].shape[0]}"
        )
    v = mat.reshape(-1)
    vecs = closure.basis.reshape(closure.dimension, -1)
    for _ in range(2):
        v = v - vecs.T @ (vecs.conj() @ v).real
    r = float(np.linalg.norm(v))
    return r <= tol * nrm, r


# ---------------------------------------------------------------------------
# symplectic certificate for the 4-dimensional ambient space
# ---------------------------------------------------------------------------

# product labels (system-major) reordered so the symplectic form is the
# standard block form: {|00>, |10>, |11>, |01>}
SP4_BASIS_ORDER = (0, 2, 3, 1)

_SP4_FORM = np.block([
    [np.zeros((2, 2)), np.eye(2)],
    [-np.eye(2), np.zeros((2, 2))],
])


def sp4_defect(mat: np.ndarray) -> float:
    """Norm of x^T S + S x for x in the reordered basis (0 on sp(4))."""
    if mat.shape != (4, 4):
        raise DimensionError("sp(4) certificate needs a 4x4 matrix")
    x = mat[np.ix_(SP4_BASIS_ORDER, SP4_BASIS_ORDER)]
    return float(np.linalg.norm(x.T @ _SP4_FORM + _SP4_FORM @ x))


def check_sp4(closure: ClosureResult, tol: float = 1e-10) -> bool:
    """True when every closure basis element satisfies the sp(4) relation."""
    if closure.dimension == 0:
        return True
    if closure.basis[0].shape != (4, 4):
        raise DimensionError("sp(4) certificate is only defined on a 4-dim space")
    return all(
        sp4_defect(b) <= tol * np.linalg.norm(b) for b in closure.basis
    )


def sp4_reference_basis() -> list[StructuredOperator]:
    """Ten exact skew-Hermitian operators spanning sp(4) at N=2, M=1.

    Pauli factors on the system side are written through raw matrix units
    (sigma_x = e12 + e21, sigma_y = -i e12 + i e21, sigma_z = e11 - e22).
    """
    i1 = GaussianRational(0, 1)
    sx = [((1, 2), 1), ((2, 1), 1)]
    sy = [((1, 2), GaussianRational(0, -1)), ((2, 1), GaussianRational(0, 1))]
    sz = [((1, 1), 1), ((2, 2), -1)]
    s1 = [((1, 1), 1), ((2, 2), 1)]

    def op(system_terms, pauli: str):
        return StructuredOperator.from_terms(
            2, 1,
            [(jk, pauli, i1 * GaussianRational(c) if isinstance(c, int) else i1 * c)
             for jk, c in system_terms],
            exact=True,
        )

    return [
        op(sz, "I"), op(s1, "Z"),
        op(sx, "Z"), op(sy, "Z"),
        op(sx, "X"), op(sx, "Y"),
        op(sy, "X"), op(sy, "Y"),
        op(s1, "X"), op(s1, "Y"),
    ]
