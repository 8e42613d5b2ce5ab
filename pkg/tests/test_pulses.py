"""Unit tests for propagation, transfer fidelity and pulse synthesis."""

import warnings

import numpy as np
import pytest

from accessor_ctrl import (
    ControlModel,
    PulseProgram,
    TransferTask,
    fidelity_and_gradient,
    propagate,
    synthesize,
    transfer_fidelity,
)
from accessor_ctrl.pulses import reduced_system_state
from helpers import decoupled_model, theorem2_model


def program(dt, amps):
    return PulseProgram(dt=dt, amplitudes=np.asarray(amps, dtype=float))


class TestPropagate:
    def test_zero_hamiltonian_gives_identity(self):
        model = ControlModel.create(2, 1, [0, 0], [0], [], [0], [])
        u = propagate(model, program(1.0, np.zeros((3, 2))))
        assert np.allclose(u, np.eye(4), atol=1e-12)

    def test_diagonal_exponential(self):
        model = ControlModel.create(2, 1, [1, -1], [0], [], [0], [])
        u = propagate(model, program(np.pi / 2, np.zeros((1, 2))))
        expected = np.diag(np.exp(-1j * np.pi / 2 * np.array([1, 1, -1, -1])))
        assert np.allclose(u, expected, atol=1e-12)

    def test_segment_composition(self):
        rng = np.random.default_rng(2)
        amps = rng.uniform(-1, 1, (1, 2))
        model = theorem2_model()
        full = propagate(model, program(0.8, amps))
        halves = propagate(model, program(0.4, np.vstack([amps, amps])))
        assert np.allclose(full, halves, atol=1e-12)

    def test_unitarity_random_pulses(self):
        rng = np.random.default_rng(3)
        model = theorem2_model()
        for _ in range(10):
            u = propagate(model, program(0.13, rng.uniform(-8, 8, (25, 2))))
            assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-10

    def test_rejects_nonfinite_amplitudes(self):
        model = theorem2_model()
        amps = np.zeros((2, 2))
        amps[1, 0] = np.nan
        with pytest.raises(ValueError):
            propagate(model, program(0.1, amps))

    def test_rejects_channel_mismatch(self):
        with pytest.raises(ValueError):
            propagate(theorem2_model(), program(0.1, np.zeros((2, 3))))


class TestTransferFidelity:
    def test_identity_cases(self):
        model = ControlModel.create(2, 1, [0, 0], [0], [], [0], [])
        pulses = program(1.0, np.zeros((2, 2)))
        same = TransferTask([1, 0], [1, 0], horizon=2.0)
        orthogonal = TransferTask([1, 0], [0, 1], horizon=2.0)
        assert transfer_fidelity(model, pulses, same) == pytest.approx(1.0)
        assert transfer_fidelity(model, pulses, orthogonal) == pytest.approx(0.0)

    def test_decoupled_model_fidelity_is_control_independent(self):
        model = decoupled_model()
        task = TransferTask([1, 0], [0, 1], horizon=4.0)
        rng = np.random.default_rng(5)
        values = {
            round(transfer_fidelity(model, program(0.2, rng.uniform(-5, 5, (20, 2))),
                                    task), 12)
            for _ in range(5)
        }
        assert len(values) == 1

    def test_reduced_state_is_density_matrix(self):
        rng = np.random.default_rng(7)
        model = theorem2_model()
        task = TransferTask([1, 0], [0, 1], horizon=1.0)
        u = propagate(model, program(0.1, rng.uniform(-3, 3, (10, 2))))
        rho = reduced_system_state(model, u, task)
        assert abs(np.trace(rho) - 1.0) < 1e-10
        evals = np.linalg.eigvalsh(rho)
        assert evals.min() > -1e-10

    def test_unit_norm_validation(self):
        with pytest.raises(ValueError):
            TransferTask([1, 1], [1, 0], horizon=1.0)
        with pytest.raises(ValueError):
            TransferTask([1, 0], [1, 0], horizon=-1.0)


class TestGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(11)
        model = theorem2_model()
        task = TransferTask([1, 0], [0, 1], horizon=5.0)
        pulses = program(0.25, rng.uniform(-1, 1, (20, 2)))
        _, grad = fidelity_and_gradient(model, pulses, task)
        h = 1e-6
        for _ in range(20):
            s = int(rng.integers(0, 20))
            k = int(rng.integers(0, 2))
            up = pulses.amplitudes.copy()
            dn = pulses.amplitudes.copy()
            up[s, k] += h
            dn[s, k] -= h
            fd = (transfer_fidelity(model, program(0.25, up), task)
                  - transfer_fidelity(model, program(0.25, dn), task)) / (2 * h)
            assert abs(fd - grad[s, k]) <= 1e-5 * max(abs(fd), 1e-3)

    def test_fidelity_consistent_with_plain_evaluation(self):
        rng = np.random.default_rng(13)
        model = theorem2_model()
        task = TransferTask([1, 0], [0, 1], horizon=3.0)
        pulses = program(0.3, rng.uniform(-2, 2, (10, 2)))
        f, _ = fidelity_and_gradient(model, pulses, task)
        assert f == pytest.approx(transfer_fidelity(model, pulses, task), abs=1e-12)


class TestSynthesize:
    def test_reaches_target_state(self):
        task = TransferTask([1, 0], [0, 1], horizon=20.0)
        prog = synthesize(theorem2_model(), task, segment_count=200,
                          max_iters=2000, seed=0, target_fidelity=0.99)
        assert prog.converged
        assert prog.final_fidelity >= 0.99
        assert np.abs(prog.amplitudes).max() <= 10.0

    def test_trace_monotone_and_deterministic(self):
        task = TransferTask([1, 0], [0, 1], horizon=10.0)
        a = synthesize(theorem2_model(), task, 50, max_iters=40, seed=3)
        b = synthesize(theorem2_model(), task, 50, max_iters=40, seed=3)
        assert a.fidelity_trace == b.fidelity_trace
        assert np.array_equal(a.amplitudes, b.amplitudes)
        trace = a.fidelity_trace
        assert all(t1 >= t0 - 1e-12 for t0, t1 in zip(trace, trace[1:]))

    def test_seed_changes_start(self):
        task = TransferTask([1, 0], [0, 1], horizon=10.0)
        a = synthesize(theorem2_model(), task, 50, max_iters=5, seed=1)
        b = synthesize(theorem2_model(), task, 50, max_iters=5, seed=2)
        assert not np.array_equal(a.amplitudes, b.amplitudes)

    def test_decoupled_model_is_noop(self):
        task = TransferTask([1, 0], [0, 1], horizon=5.0)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            prog = synthesize(decoupled_model(), task, 20, max_iters=50, seed=0)
        assert any("not completely controllable" in str(w.message) for w in caught)
        assert not prog.converged
        assert len(prog.fidelity_trace) >= 1
        spread = max(prog.fidelity_trace) - min(prog.fidelity_trace)
        assert spread < 1e-10

    def test_unconverged_flag(self):
        task = TransferTask([1, 0], [0, 1], horizon=20.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            prog = synthesize(theorem2_model(), task, 50, max_iters=1, seed=0,
                              target_fidelity=0.9999)
        assert not prog.converged
