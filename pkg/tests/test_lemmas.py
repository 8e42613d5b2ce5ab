"""Unit tests for the exact bracket-identity suite."""

import itertools

import pytest

from accessor_ctrl import (
    ControlModel,
    GaussianRational,
    PauliString,
    StructuredOperator,
    SystemBasisOp,
    build_drift_parts,
    nested_commutator,
    verify_lemma_suite,
)
from helpers import simpler_coupling_model, three_by_three_model


def by_id(checks):
    return {c.identity: c for c in checks}


def chain_model(m, c=None):
    c = [1] * (m - 1) if c is None else c
    return ControlModel.create(2, m, [1, -1], [1] * m, c, [1], [])


class TestChainDoubleBracket:
    def test_two_qubit_model_all_branches(self):
        checks = by_id(verify_lemma_suite(chain_model(2, c=[1])))
        for beta in ("xx", "xy", "yx", "yy"):
            check = checks[f"chain-double-bracket[M=2,beta={beta}]"]
            assert check.status == "pass"
            assert check.deviation == 0.0

    def test_yy_branch_value(self):
        model = chain_model(2, c=[3])
        parts = build_drift_parts(model, exact=True)
        seq = [
            StructuredOperator.from_terms(
                2, 2, [(SystemBasisOp.one(), PauliString.single(2, site, "Y"),
                        GaussianRational(0, 1))], exact=True)
            for site in (1, 2)
        ]
        got = nested_commutator(seq, parts.register_chain.times_i())
        expected = StructuredOperator.from_terms(
            2, 2, [(SystemBasisOp.one(), "ZZ", GaussianRational(0, 12))], exact=True
        )
        assert got == expected

    @pytest.mark.parametrize("m", [3, 4])
    def test_longer_chains_vanish(self, m):
        checks = verify_lemma_suite(chain_model(m))
        branch = [c for c in checks if c.identity.startswith("chain-double-bracket")]
        assert len(branch) == 1 << m
        assert all(c.status == "pass" and c.deviation == 0.0 for c in branch)

    def test_single_qubit_skipped(self):
        checks = by_id(verify_lemma_suite(simpler_coupling_model()))
        assert checks["chain-double-bracket"].status == "skipped"


class TestCouplingCollapse:
    def test_three_qubit_unit_table(self):
        checks = verify_lemma_suite(three_by_three_model())
        branch = [c for c in checks if c.identity.startswith("coupling-collapse")]
        assert len(branch) == 8
        for check in branch:
            assert check.status == "pass"
            assert check.deviation == 0.0
            assert "transition" in check.detail

    def test_skipped_for_short_registers(self):
        checks = by_id(verify_lemma_suite(chain_model(2)))
        assert checks["coupling-collapse"].status == "skipped"

    def test_collapse_produces_complemented_row(self):
        # beta with exactly one surviving coupling: result holds that row only
        model = three_by_three_model()
        parts = build_drift_parts(model, exact=True)
        beta = ("X", "X", "X")       # complement YYY couples through x_1
        seq = [
            StructuredOperator.from_terms(
                3, 3, [(SystemBasisOp.one(), PauliString.single(3, s + 1, label),
                        GaussianRational(0, 1))], exact=True)
            for s, label in enumerate(beta)
        ]
        target = (parts.system + parts.excitation + parts.register_chain
                  + parts.coupling).times_i()
        got = nested_commutator(seq, target)
        expected = StructuredOperator.from_terms(
            3, 3, [(SystemBasisOp.x(1, 2), "ZZZ", GaussianRational(0, -8))],
            exact=True,
        )
        assert got == expected


class TestChainExtraction:
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_every_link_extracted(self, m):
        checks = verify_lemma_suite(chain_model(m, c=list(range(1, m))))
        branch = [c for c in checks if c.identity.startswith("chain-extraction")]
        assert len(branch) == m - 1
        assert all(c.status == "pass" and c.deviation == 0.0 for c in branch)


class TestSingleCouplingIdentities:
    def test_identities_hold(self):
        checks = by_id(verify_lemma_suite(simpler_coupling_model()))
        assert checks["single-coupling-xz"].status == "pass"
        assert checks["single-coupling-xz"].deviation == 0.0
        assert checks["single-coupling-yz"].status == "pass"
        assert checks["single-coupling-yz"].deviation == 0.0

    def test_skipped_for_other_shapes(self):
        checks = by_id(verify_lemma_suite(three_by_three_model()))
        assert checks["single-coupling-xz"].status == "skipped"
        assert "N=2" in checks["single-coupling-xz"].detail

    def test_fractional_parameters(self):
        model = ControlModel.create(2, 1, [0.5, -0.5], [0.25], [], [0.75],
                                    [(1, 1, "X", 0.5)])
        checks = by_id(verify_lemma_suite(model))
        assert checks["single-coupling-xz"].status == "pass"
        assert checks["single-coupling-yz"].status == "pass"


class TestSuiteShape:
    def test_every_identity_reported(self):
        checks = verify_lemma_suite(chain_model(2))
        kinds = {c.identity.split("[")[0] for c in checks}
        assert kinds == {
            "chain-double-bracket", "coupling-collapse",
            "chain-extraction", "single-coupling-xz", "single-coupling-yz",
        }

    def test_no_failures_on_reference_models(self):
        for model in (chain_model(2), chain_model(3), three_by_three_model(),
                      simpler_coupling_model()):
            assert all(c.status != "fail" for c in verify_lemma_suite(model))
