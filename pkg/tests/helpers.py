"""Model factories and random-operator generators shared across tests."""

from fractions import Fraction

import numpy as np

from accessor_ctrl import ControlModel, GaussianRational, PauliString, StructuredOperator


def theorem2_model(d1=1) -> ControlModel:
    """N=2, M=1 with cross couplings x1(x)Y and y1(x)X."""
    return ControlModel.create(
        2, 1, [1, -1], [1], [], [d1], [(1, 1, "Y", 1), (1, 2, "X", 1)]
    )


def simpler_coupling_model(d1=1, g=1) -> ControlModel:
    """N=2, M=1 with a single x1(x)X coupling."""
    return ControlModel.create(2, 1, [1, -1], [1], [], [d1], [(1, 1, "X", g)])


def decoupled_model() -> ControlModel:
    return ControlModel.create(2, 1, [1, -1], [1], [], [0], [])


def three_by_three_model() -> ControlModel:
    """N=3, M=3 with the four unit couplings and equal-gap energies."""
    return ControlModel.create(
        3, 3, [-1, 0, 1], [1, 1, 1], [1, 1], [1, 2],
        [(1, 1, "YYY", 1), (2, 1, "YYX", 1), (1, 2, "YXY", 1), (2, 2, "XYY", 1)],
    )


def two_qubit_scheme_model() -> ControlModel:
    """N=3, M=2: four XY couplings, drivable XX word, no fixed chain term."""
    return ControlModel.create(
        3, 2, [-1, 0, 2], [1, 1], [0], [1, 1],
        [(1, 1, "XX", 1), (1, 2, "XY", 1), (2, 1, "YX", 1), (2, 2, "YY", 1)],
        ["XX"],
    )


def two_level_three_qubit_model() -> ControlModel:
    """N=2, M=3 satisfying all three conditions."""
    return ControlModel.create(
        2, 3, [1, -1], [1, 1, 1], [1, 1], [1],
        [(1, 1, "XXX", 1), (1, 2, "YYY", 1)],
    )


def random_rational(rng, span=3, den=3) -> Fraction:
    return Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, den + 1)))


def random_gaussian_rational(rng) -> GaussianRational:
    return GaussianRational(random_rational(rng), random_rational(rng))


def random_word(rng, m: int) -> PauliString:
    return PauliString("".join(rng.choice(list("IXYZ")) for _ in range(m)))


def random_structured(rng, n: int, m: int, max_terms: int = 4) -> StructuredOperator:
    entries = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        j = int(rng.integers(1, n + 1))
        k = int(rng.integers(1, n + 1))
        entries.append(((j, k), random_word(rng, m), random_gaussian_rational(rng)))
    return StructuredOperator.from_terms(n, m, entries, exact=True)


def random_skew_hermitian(rng, n: int, m: int, max_terms: int = 3) -> StructuredOperator:
    op = random_structured(rng, n, m, max_terms)
    return op - op.dagger()


def dense_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a
