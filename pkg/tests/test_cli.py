import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from pqdslln.cli import EXIT_NUMERIC, EXIT_OK, EXIT_PARAMETER, main

SCHEMA = json.loads(
    resources.files("pqdslln").joinpath("schemas/outputs.schema.json").read_text()
)


def validate(instance, def_name: str) -> None:
    jsonschema.validate(instance, {"$ref": f"#/$defs/{def_name}", "$defs": SCHEMA["$defs"]})


def read_json(path: Path):
    return json.loads(path.read_text())


def run_cli(args, outdir: Path) -> int:
    return main([*args, "--outdir", str(outdir)])


class TestSpecfunEval:
    def test_gamma_prints_value(self, tmp_path, capsys):
        assert run_cli(["specfun", "eval", "--fn", "gamma", "--x", "5"], tmp_path) == EXIT_OK
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "24"
        validate(read_json(tmp_path / "result.json"), "specfun_result")
        validate(read_json(tmp_path / "manifest.json"), "manifest")

    def test_2f1_fifteen_digits(self, tmp_path, capsys):
        code = run_cli(
            ["specfun", "eval", "--fn", "2f1", "--a", "1", "--b", "1", "--c", "2", "--z", "0.5"],
            tmp_path,
        )
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "1.38629436111989"

    def test_domain_error_exit_code(self, tmp_path, capsys):
        code = run_cli(["specfun", "eval", "--fn", "gamma", "--x", "-1"], tmp_path)
        assert code == EXIT_PARAMETER
        assert "[parameter]" in capsys.readouterr().err


class TestGEval:
    def test_zero_theta_all_methods(self, tmp_path, capsys):
        code = run_cli(
            ["g", "eval", "--theta", "0", "--r", "1", "--s", "1", "--u", "2", "--v", "2"],
            tmp_path,
        )
        assert code == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "g_eval_result")
        assert result["methods"]["closed"] == 0.0
        assert result["methods"]["factor"] == 0.0
        assert abs(result["methods"]["numeric"]) <= 1e-12

    def test_methods_agree(self, tmp_path):
        run_cli(
            ["g", "eval", "--theta", "1", "--r", "2", "--s", "1", "--u", "3", "--v", "3"],
            tmp_path,
        )
        result = read_json(tmp_path / "result.json")
        assert result["max_discrepancy"] <= 1e-6

    def test_numeric_failure_exit_code(self, tmp_path, capsys):
        code = run_cli(
            [
                "g", "eval", "--theta", "1", "--r", "1", "--s", "1", "--u", "20", "--v", "20",
                "--method", "numeric", "--quad-tol", "1e-14", "--max-panels", "2",
            ],
            tmp_path,
        )
        assert code == EXIT_NUMERIC
        assert "[numeric]" in capsys.readouterr().err


class TestConditionCheck:
    def test_nec12_example(self, tmp_path):
        code = run_cli(
            [
                "condition", "check", "--kind", "nec12", "--p", "1", "--mu", "0.2",
                "--nu", "-1.5", "--N", "500",
            ],
            tmp_path,
        )
        assert code == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "condition_result")
        assert result["verdict"] == "converges"
        terms = (tmp_path / "terms.csv").read_text().splitlines()
        assert terms[0] == "j,term"
        assert len(terms) == 500  # header + j = 2..500

    def test_window_violation_names_inequality(self, tmp_path, capsys):
        code = run_cli(
            [
                "condition", "check", "--kind", "nec12", "--p", "1", "--mu", "-0.2",
                "--nu", "-1.5", "--N", "100",
            ],
            tmp_path,
        )
        assert code == EXIT_PARAMETER
        assert "1/p - 1 < mu" in capsys.readouterr().err


class TestBc:
    def test_ratio_outputs(self, tmp_path):
        code = run_cli(
            ["bc", "ratio", "--alpha", "1", "--p", "1", "--n-grid", "10,100,1000"],
            tmp_path,
        )
        assert code == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "bc_ratio_result")
        lines = (tmp_path / "ratio.csv").read_text().splitlines()
        assert lines[0] == "n,ratio,running_min"
        assert len(lines) == 4

    def test_ratio_with_dependence(self, tmp_path):
        code = run_cli(
            [
                "bc", "ratio", "--alpha", "2", "--p", "1", "--theta-spec", "power:0.2,-1.5",
                "--n-grid", "log:1000:5",
            ],
            tmp_path,
        )
        assert code == EXIT_OK

    def test_bracket(self, tmp_path):
        code = run_cli(
            ["bc", "bracket", "--alpha", "2", "--p", "1", "--k", "2", "--j", "3", "--eps", "2"],
            tmp_path,
        )
        assert code == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "bc_bracket_result")
        assert result["holds"] is True
        assert result["lhs"] == pytest.approx(1.0 / 6.0, abs=1e-8)


class TestSimulateSlln:
    ARGS = [
        "simulate", "slln", "--p", "1", "--alpha", "2", "--theta-spec", "zero",
        "--n-max", "1024", "--replicates", "4", "--seed", "11", "--c", "2",
    ]

    def test_outputs(self, tmp_path):
        assert run_cli(self.ARGS, tmp_path) == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "slln_result")
        lines = (tmp_path / "paths.csv").read_text().splitlines()
        assert lines[0] == "replicate,checkpoint_n,m_n,e_n"
        assert len(lines) == 1 + 4 * len(result["checkpoints"])

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([*self.ARGS, "--outdir", str(a), "--workers", "1"]) == EXIT_OK
        assert main([*self.ARGS, "--outdir", str(b), "--workers", "4"]) == EXIT_OK
        for name in ("result.json", "paths.csv", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_infinite_mean_needs_explicit_centering(self, tmp_path, capsys):
        args = [
            "simulate", "slln", "--p", "1", "--alpha", "1", "--theta-spec", "zero",
            "--n-max", "512", "--replicates", "2", "--seed", "3",
        ]
        assert run_cli(args, tmp_path) == EXIT_PARAMETER
        assert "explicit c" in capsys.readouterr().err


class TestReportExample:
    def test_end_to_end(self, tmp_path):
        code = run_cli(
            [
                "report", "example", "--p", "1", "--mu", "0.2", "--nu", "-1.5",
                "--r", "1", "--s", "1", "--N", "500",
            ],
            tmp_path,
        )
        assert code == EXIT_OK
        result = read_json(tmp_path / "result.json")
        validate(result, "example_report")
        assert result["verdict"] == "converges"
        assert result["g_oracle_max_discrepancy"] <= 1e-6
        assert result["majorant_bound_holds_at_every_checkpoint"] is True
        assert (tmp_path / "gtable.csv").exists()
        assert (tmp_path / "terms.csv").exists()


class TestManifestRerun:
    def test_rerun_is_byte_identical(self, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        args = [
            "condition", "check", "--kind", "nec12", "--p", "1", "--mu", "0.2",
            "--nu", "-1.5", "--N", "300", "--outdir", str(first),
        ]
        assert main(args) == EXIT_OK
        assert main(["rerun", "--manifest", str(first / "manifest.json"), "--outdir", str(second)]) == EXIT_OK
        for name in ("manifest.json", "result.json", "terms.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_rerun_simulate(self, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        assert main([*TestSimulateSlln.ARGS, "--outdir", str(first)]) == EXIT_OK
        assert main(["rerun", "--manifest", str(first / "manifest.json"), "--outdir", str(second), "--workers", "3"]) == EXIT_OK
        for name in ("manifest.json", "result.json", "paths.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("# base settings\nfn = gamma\nx = 5\n")
        a = tmp_path / "a"
        code = main(["specfun", "eval", "--config", str(config), "--outdir", str(a)])
        assert code == EXIT_OK
        assert read_json(a / "result.json")["value"] == pytest.approx(24.0, rel=1e-13)
        b = tmp_path / "b"
        code = main(["specfun", "eval", "--config", str(config), "--x", "6", "--outdir", str(b)])
        assert code == EXIT_OK
        assert read_json(b / "result.json")["value"] == pytest.approx(120.0, rel=1e-13)

    def test_structured_config_keys(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(
            "kind = nec12\np = 1\nschedule = power(0.2, -1.5)\nmarginal = pareto(2.0)\nN = 64\n"
        )
        out = tmp_path / "out"
        code = main(["condition", "check", "--config", str(config), "--outdir", str(out)])
        assert code == EXIT_OK
        result = read_json(out / "result.json")
        assert result["kind"] == "nec12"
        assert result["verdict"] in ("converges", "inconclusive")

    def test_structured_copula_key(self, tmp_path):
        config = tmp_path / "g.cfg"
        config.write_text("copula = gfm(0.5, 1, 1)\nu = 2\nv = 2\nmethod = closed\n")
        out = tmp_path / "out"
        code = main(["g", "eval", "--config", str(config), "--outdir", str(out)])
        assert code == EXIT_OK
        result = read_json(out / "result.json")
        assert result["methods"]["closed"] == pytest.approx(0.5 * (5.0 / 24.0) ** 2, rel=1e-12)

    def test_missing_config_is_parameter_error(self, tmp_path, capsys):
        code = main(["specfun", "eval", "--fn", "gamma", "--x", "1", "--config", str(tmp_path / "nope.cfg")])
        assert code == EXIT_PARAMETER

    def test_outdir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PQDSLLN_OUTDIR", str(tmp_path / "envbase"))
        code = main(["specfun", "eval", "--fn", "gamma", "--x", "2"])
        assert code == EXIT_OK
        assert (tmp_path / "envbase" / "specfun-eval" / "result.json").exists()

    def test_format_json_only(self, tmp_path):
        code = run_cli(
            [
                "condition", "check", "--kind", "cs11", "--p", "1", "--mu", "0.2",
                "--nu", "-1.5", "--N", "50", "--format", "json",
            ],
            tmp_path,
        )
        assert code == EXIT_OK
        assert (tmp_path / "result.json").exists()
        assert not (tmp_path / "terms.csv").exists()


class TestUsage:
    def test_unknown_flag_exits_2(self, capsys):
        assert main(["g", "eval", "--bogus", "1"]) == 2

    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert "pqdslln" in capsys.readouterr().out
