import json

import numpy as np
import pytest

from extremal_marginals import block_gram, sigma_rank2
from extremal_marginals.cli import (
    EXIT_BORDERLINE,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    cmd_oracle,
    cmd_proptest,
    cmd_table,
    cmd_verify,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestVerify:
    def test_paper_3_2(self, capsys):
        code, report = run(capsys, "verify", "paper", "3", "2")
        assert code == EXIT_PASS
        assert report["passed"]
        cert = report["certificates"][0]
        assert cert["extremal"] and cert["mode"] == "exact"
        assert cert["gram_rank"]["rank"] == 25
        assert report["verdicts"][0]["conclusion"] == "separable"
        assert report["verdicts"][0]["choi_rank"] == 5

    def test_ohno4(self, capsys):
        code, report = run(capsys, "verify", "ohno4")
        assert code == EXIT_PASS
        assert report["certificates"][0]["extremal"]
        assert report["verdicts"][0]["choi_rank"] == 4

    def test_ohno_d(self, capsys):
        code, report = run(capsys, "verify", "ohno-d", "5")
        assert code == EXIT_PASS
        assert report["verdicts"][0]["choi_rank"] == 5

    def test_rank8_66(self, capsys):
        code, report = run(capsys, "verify", "rank8-66")
        assert code == EXIT_PASS
        assert report["certificates"][0]["extremal"]
        assert report["verdicts"][0]["choi_rank"] == 8

    def test_unknown_family_is_usage_error(self, capsys):
        assert main(["verify", "nosuch"]) == EXIT_USAGE

    def test_wrong_params_usage_error(self, capsys):
        assert main(["verify", "paper", "3"]) == EXIT_USAGE
        assert main(["verify", "paper", "1", "1"]) == EXIT_USAGE
        assert main(["verify", "rank8k", "2"]) == EXIT_USAGE

    def test_forced_exact_on_irrational_family(self, capsys):
        assert main(["verify", "sigma2", "--exact"]) == EXIT_USAGE

    def test_huge_tol_forces_failure_exit(self, capsys):
        code, report = run(capsys, "verify", "paper", "2", "1", "--numerical", "--tol", "1e9")
        assert code == EXIT_FAIL
        assert not report["passed"]

    def test_borderline_exit(self, capsys):
        g = block_gram(sigma_rank2())
        smallest = np.linalg.svd(g, compute_uv=False).min()
        code, report = run(
            capsys, "verify", "sigma2", "--numerical", "--tol", str(smallest / 5)
        )
        assert code == EXIT_BORDERLINE
        assert report["passed"] and report["borderline"]

    def test_guardrail_and_override(self, capsys):
        assert main(["verify", "rank8k", "5"]) == EXIT_USAGE
        # (8*5)^2 = 1600 needs a raised guardrail; keep it small enough to run
        code, report = run(capsys, "verify", "rank8k", "5", "--max-dim", "1600")
        assert code == EXIT_PASS
        assert report["verdicts"][0]["choi_rank"] == 40

    def test_json_file_output(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, report = run(capsys, "verify", "sigma2", "--json", str(path))
        assert code == EXIT_PASS
        on_disk = json.loads(path.read_text())
        assert on_disk == report


class TestTable:
    def test_small_grid(self, capsys):
        code, report = run(capsys, "table", "2", "4", "1", "3")
        assert code == EXIT_PASS
        rows = {(r["d1"], r["d2"]): r for r in report["table_rows"]}
        assert rows[(2, 3)]["constructed_rank"] == 3
        assert rows[(2, 3)]["bound"] == 3
        assert rows[(2, 3)]["attained"]
        assert rows[(4, 6)]["constructed_rank"] == 6
        assert rows[(4, 6)]["bound"] == 7
        assert not rows[(4, 6)]["attained"]
        assert rows[(6, 6)]["marginal_name"] == "D"
        assert rows[(6, 6)]["constructed_rank"] == 8
        assert rows[(18, 18)]["constructed_rank"] == 24

    def test_range_limits(self, capsys):
        assert main(["table", "2", "8", "1", "2"]) == EXIT_USAGE
        assert main(["table", "3", "2", "1", "1"]) == EXIT_USAGE

    def test_range_override(self, capsys):
        code, report = run(capsys, "table", "7", "7", "1", "1", "--max-dim", "64")
        assert code == EXIT_PASS
        rows = {(r["d1"], r["d2"]): r for r in report["table_rows"]}
        assert rows[(7, 8)]["constructed_rank"] == 8


class TestOracle:
    def test_2_1(self, capsys):
        code, report = run(capsys, "oracle", "2", "1")
        assert code == EXIT_PASS
        dev = report["oracle_deviations"]
        assert dev["choi_pt_closed_form"] <= 1e-12
        assert dev["gram_closed_form"] == pytest.approx(2.0)
        assert report["warnings"]  # the known closed-form gap is surfaced

    def test_3_2_exact_rank(self, capsys):
        code, report = run(capsys, "oracle", "3", "2")
        assert code == EXIT_PASS
        checks = {c["name"]: c for c in report["checks"]}
        assert checks["gram-full-rank"]["passed"]
        assert checks["choi-ppt"]["passed"]

    def test_bad_args(self, capsys):
        assert main(["oracle", "1", "1"]) == EXIT_USAGE


class TestProptest:
    def test_runs_clean(self, capsys):
        code, report = run(capsys, "proptest", "--seed", "11", "--count", "5")
        assert code == EXIT_PASS
        assert {c["name"] for c in report["checks"]} == {
            "adjoint-verdict-invariance",
            "canonicalization",
            "restrict-idempotent",
            "span-equals-gram-rank",
        }

    def test_deterministic_for_fixed_seed(self, capsys):
        _, first = run(capsys, "proptest", "--seed", "3", "--count", "4")
        _, second = run(capsys, "proptest", "--seed", "3", "--count", "4")
        first.pop("timings_ms")
        second.pop("timings_ms")
        assert first == second


class TestReportShape:
    def test_report_keys(self, capsys):
        _, report = run(capsys, "verify", "sigma2")
        assert set(report) == {
            "command",
            "inputs",
            "certificates",
            "verdicts",
            "table_rows",
            "oracle_deviations",
            "timings_ms",
            "checks",
            "warnings",
            "passed",
            "borderline",
        }
        cert = report["certificates"][0]
        for key in ("r", "gram_rank", "extremal", "mode", "gap", "marginal_residual"):
            assert key in cert

    def test_command_functions_return_reports(self):
        assert cmd_verify("sigma2", []).passed
        assert cmd_oracle(2, 2).passed
        assert cmd_table(2, 3, 1, 2).passed
        assert cmd_proptest(5, count=3).passed
