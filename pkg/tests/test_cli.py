"""End-to-end tests of the command-line driver and its JSON reports."""

import json

import pytest

import accessor_ctrl.cli as cli
from accessor_ctrl.cli import main, render_report, run
from accessor_ctrl.errors import ContractViolationError

CROSS_COUPLED = """\
N=2
M=1
E=[1, -1]
omega=[1]
c=[]
d=[1]
coupling { j=1 k=1 alpha="Y" g=1 }
coupling { j=1 k=2 alpha="X" g=1 }
task { initial_system=[1+0i, 0+0i] target_system=[0+0i, 1+0i] T=20 segments=200 }
"""

ZERO_EXCITATION = CROSS_COUPLED.replace("d=[1]", "d=[0]")

TWO_QUBIT_SCHEME = """\
N=3
M=2
E=[-1, 0, 2]
omega=[1, 1]
c=[0]
d=[1, 1]
coupling { j=1 k=1 alpha="XX" g=1 }
coupling { j=1 k=2 alpha="XY" g=1 }
coupling { j=2 k=1 alpha="YX" g=1 }
coupling { j=2 k=2 alpha="YY" g=1 }
extra_control="XX"
"""

DECOUPLED_TASK = """\
N=2
M=1
E=[1, -1]
omega=[1]
c=[]
d=[0]
task { initial_system=[1+0i, 0+0i] target_system=[0+0i, 1+0i] T=5 segments=20 }
"""


@pytest.fixture
def config(tmp_path):
    def write(text, name="model.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


class TestRun:
    def test_closure_report_dimensions(self, config):
        report, code = run("closure", config(CROSS_COUPLED), no_timing=True)
        assert code == 0
        assert report["closure"]["dimension"] == 15
        assert report["closure"]["controllable"] is True
        assert report["conditions"]["cond2"]["ok"] is True
        assert report["pulses"] is None

    def test_symplectic_case(self, config):
        report, code = run("closure", config(ZERO_EXCITATION), no_timing=True)
        assert code == 0
        assert report["closure"]["dimension"] == 10
        assert report["closure"]["controllable"] is False

    def test_check_only_runs_conditions(self, config):
        report, code = run("check", config(ZERO_EXCITATION))
        assert code == 0
        assert report["conditions"]["cond3"]["ok"] is False
        assert report["closure"] is None

    def test_zero_chain_coupling_is_data_not_error(self, config):
        text = TWO_QUBIT_SCHEME
        report, code = run("check", config(text), exact=True)
        assert code == 0
        assert report["conditions"]["cond1"]["ok"] is False
        assert report["conditions"]["cond1"]["zero_c_indices"] == [1]

    def test_parse_error_exit_code(self, config):
        report, code = run("check", config("N=3\nM=1\nE=[1, -1]\nomega=[1]\nd=[1,1]\n"))
        assert code == 2
        assert "error" in report

    def test_missing_file_exit_code(self):
        report, code = run("check", "/nonexistent/path.cfg")
        assert code == 2

    def test_verify_lemmas(self, config):
        report, code = run("verify-lemmas", config(CROSS_COUPLED))
        assert code == 0
        assert all(item["status"] != "fail" for item in report["lemmas"])

    def test_synthesize_converges(self, config):
        report, code = run("synthesize", config(CROSS_COUPLED), no_timing=True)
        assert code == 0
        assert report["pulses"]["converged"] is True
        assert report["pulses"]["final_fidelity"] >= 0.99

    def test_synthesize_unconverged_exit_code(self, config):
        report, code = run("synthesize", config(DECOUPLED_TASK), no_timing=True)
        assert code == 4
        assert report["pulses"]["converged"] is False
        assert any("not completely controllable" in w for w in report["warnings"])

    def test_synthesize_without_task(self, config):
        report, code = run("synthesize", config(TWO_QUBIT_SCHEME))
        assert code == 2

    def test_exact_mode_determinant_string(self, config):
        report, _ = run("check", config(CROSS_COUPLED), exact=True)
        assert report["conditions"]["cond2"]["witness_determinant"] == "-1"


class TestGoldenWarnings:
    def test_two_qubit_scheme_warning_present(self, config):
        report, code = run("closure", config(TWO_QUBIT_SCHEME), no_timing=True)
        assert code == 0
        assert report["closure"]["dimension"] == 143
        assert any("su(12)" in w for w in report["warnings"])

    def test_standard_models_have_no_warnings(self, config):
        report, _ = run("closure", config(CROSS_COUPLED), no_timing=True)
        assert report["warnings"] == []


class TestDeterminism:
    def test_byte_identical_reports(self, config):
        path = config(CROSS_COUPLED)
        first = render_report(run("report", path, seed=7, no_timing=True)[0])
        second = render_report(run("report", path, seed=7, no_timing=True)[0])
        assert first == second

    def test_report_round_trips(self, config):
        text = render_report(run("report", config(CROSS_COUPLED), seed=1,
                                 no_timing=True)[0])
        assert render_report(json.loads(text)) == text

    def test_timing_fields_null_only_with_flag(self, config):
        path = config(CROSS_COUPLED)
        timed, _ = run("closure", path)
        untimed, _ = run("closure", path, no_timing=True)
        assert timed["closure"]["wall_time_s"] > 0
        assert untimed["closure"]["wall_time_s"] is None


class TestMain:
    def test_writes_report_to_file(self, config, tmp_path):
        out = tmp_path / "report.json"
        code = main(["closure", "--config", config(CROSS_COUPLED),
                     "--no-timing", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["closure"]["dimension"] == 15

    def test_stdout_report(self, config, capsys):
        code = main(["check", "--config", config(CROSS_COUPLED)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["conditions"]["cond1"]["ok"] is True

    def test_contract_violation_exit_code(self, config, monkeypatch):
        def boom(*args, **kwargs):
            raise ContractViolationError("engine invariant broken")
        monkeypatch.setattr(cli, "run", boom)
        code = main(["closure", "--config", config(CROSS_COUPLED)])
        assert code == 3

    def test_unknown_command_rejected(self, config):
        with pytest.raises(SystemExit):
            main(["frobnicate", "--config", config(CROSS_COUPLED)])

    def test_thread_cap_env_var(self, config, monkeypatch):
        import os
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            monkeypatch.delenv(var, raising=False)
        monkeypatch.setenv("ACCESSOR_CTRL_THREADS", "2")
        main(["check", "--config", config(CROSS_COUPLED)])
        assert os.environ["OMP_NUM_THREADS"] == "2"
