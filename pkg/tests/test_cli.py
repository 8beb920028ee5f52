import json
import math

import pytest

import support
from fidespec.cli import ProblemFileError, load_problem, main


def _write_problem(tmp_path, **overrides):
    doc = {
        "name": "tiny",
        "q": 0.5,
        "lambda": 0.0,
        "p": "0",
        "f": "1",
        "kernel": "0",
        "exact": "2*sqrt(x)/sqrt(pi)",
    }
    doc.update(overrides)
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestLoadProblem:
    def test_benchmark_file(self):
        problem = load_problem(str(support.SIN_SQRT))
        assert problem.name == "sin_sqrt"
        assert problem.q == 0.5 and problem.lam == 0.5
        assert problem.p(0.3) == 1.0
        assert problem.kernel(0.5, 0.5) == pytest.approx(0.5)
        assert problem.exact(0.25) == pytest.approx(math.sin(0.25) / 0.5, rel=1e-15)

    def test_q_range(self, tmp_path):
        with pytest.raises(ProblemFileError) as err:
            load_problem(_write_problem(tmp_path, q=1.5))
        assert "q" in str(err.value)

    def test_unknown_kernel_variable(self, tmp_path):
        with pytest.raises(ProblemFileError) as err:
            load_problem(_write_problem(tmp_path, kernel="sqrt(x*s)"))
        assert "s" in str(err.value)

    def test_unknown_member_rejected(self, tmp_path):
        with pytest.raises(ProblemFileError) as err:
            load_problem(_write_problem(tmp_path, extra=1))
        assert "extra" in str(err.value)

    def test_missing_member(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"name": "x", "q": 0.5}))
        with pytest.raises(ProblemFileError) as err:
            load_problem(str(path))
        assert "missing" in str(err.value)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ProblemFileError):
            load_problem(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemFileError):
            load_problem(str(tmp_path / "absent.json"))

    def test_default_d(self, tmp_path):
        problem = load_problem(_write_problem(tmp_path))
        assert problem.d == 0.0


class TestSolveCommand:
    def test_success_summary_line(self, capsys):
        code = main(["solve", "--problem", str(support.SIN_SQRT), "--order", "8"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("N=8 residual=")
        assert "cond=" in out

    def test_output_json(self, tmp_path, capsys):
        out_path = tmp_path / "solution.json"
        code = main(
            ["solve", "--problem", str(support.SQRT_IDENTITY), "--order", "1",
             "--output", str(out_path), "--grid", "10"]
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["name"] == "sqrt_identity"
        assert payload["N"] == 1
        assert payload["coefficients"] == pytest.approx([1.0 / math.sqrt(math.pi)], rel=1e-14)
        assert payload["x"] == pytest.approx([i / 10 for i in range(1, 11)])
        assert payload["u"][-1] == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-13)

    def test_missing_argument_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--order", "8"])
        assert err.value.code == 2

    def test_invalid_order_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--problem", str(support.SIN_SQRT), "--order", "0"])
        assert err.value.code == 2

    def test_bad_problem_exits_1(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{}")
        code = main(["solve", "--problem", str(path), "--order", "2"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestConvergeCommand:
    def test_table_and_csv(self, tmp_path, capsys):
        csv_path = tmp_path / "out.csv"
        code = main(
            ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2,3,4",
             "--csv", str(csv_path)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "N" in out.splitlines()[0] and "l2_error" in out.splitlines()[0]
        assert len(out.splitlines()) == 4
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "N,l2_error,linf_error,cond_estimate,elapsed_ms"
        assert len(lines) == 4

    def test_orders_range_spec(self, tmp_path):
        json_path = tmp_path / "out.json"
        code = main(
            ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2:6:2",
             "--json", str(json_path)]
        )
        assert code == 0
        payload = json.loads(json_path.read_text())
        assert [row["order"] for row in payload["rows"]] == [2, 4, 6]

    def test_empty_range_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["converge", "--problem", str(support.SIN_SQRT), "--orders", "16:2:2"])
        assert err.value.code == 2

    def test_missing_exact_exits_1(self, tmp_path, capsys):
        path = _write_problem(tmp_path)
        doc = json.loads(open(path).read())
        del doc["exact"]
        open(path, "w").write(json.dumps(doc))
        code = main(["converge", "--problem", path, "--orders", "2,3"])
        assert code == 1
        assert "exact" in capsys.readouterr().err

    def test_plot_data_and_figure(self, tmp_path):
        plot_path = tmp_path / "plot.txt"
        figure_path = tmp_path / "figure.png"
        code = main(
            ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2,3,4",
             "--plot", str(plot_path), "--figure", str(figure_path)]
        )
        assert code == 0
        assert len(plot_path.read_text().splitlines()) == 3
        assert figure_path.read_bytes()[:4] == b"\x89PNG"

    def test_byte_identical_outputs(self, tmp_path):
        paths = []
        for tag in ("a", "b"):
            csv_path = tmp_path / f"{tag}.csv"
            json_path = tmp_path / f"{tag}.json"
            plot_path = tmp_path / f"{tag}.txt"
            assert main(
                ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2,3",
                 "--csv", str(csv_path), "--json", str(json_path), "--plot", str(plot_path)]
            ) == 0
            paths.append((csv_path, json_path, plot_path))
        (csv_a, json_a, plot_a), (csv_b, json_b, plot_b) = paths

        def mask_csv(text):
            return ["," .join(line.split(",")[:4]) for line in text.splitlines()]

        assert mask_csv(csv_a.read_text()) == mask_csv(csv_b.read_text())
        assert plot_a.read_bytes() == plot_b.read_bytes()

        def mask_json(path):
            payload = json.loads(path.read_text())
            for row in payload["rows"]:
                row.pop("elapsed_ms")
            return payload

        assert mask_json(json_a) == mask_json(json_b)

    def test_error_quad_env_override(self, tmp_path, monkeypatch):
        json_path = tmp_path / "out.json"
        monkeypatch.setenv("FIDE_ERROR_QUAD_POINTS", "64")
        assert main(
            ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2,3",
             "--json", str(json_path)]
        ) == 0
        assert json.loads(json_path.read_text())["error_quad_points"] == 64

    def test_error_quad_env_invalid_warns(self, tmp_path, monkeypatch, capsys):
        json_path = tmp_path / "out.json"
        monkeypatch.setenv("FIDE_ERROR_QUAD_POINTS", "banana")
        assert main(
            ["converge", "--problem", str(support.POLY_KERNEL), "--orders", "2,3",
             "--json", str(json_path)]
        ) == 0
        assert "warning" in capsys.readouterr().err
        assert json.loads(json_path.read_text())["error_quad_points"] == 200


class TestRuleCommand:
    def test_two_point_values(self, capsys):
        assert main(["rule", "--points", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 2
        node, weight = (float(part) for part in lines[0].split())
        assert node == pytest.approx(0.5 - 1.0 / (2.0 * math.sqrt(3.0)), abs=1e-15)
        assert weight == pytest.approx(0.5, abs=1e-15)

    def test_invalid_points_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["rule", "--points", "0"])
        assert err.value.code == 2


class TestCheckCommand:
    def test_valid_problem_passes(self, capsys):
        assert main(["check", "--problem", str(support.SIN_SQRT)]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") >= 6
        assert "FAIL" not in out

    def test_broken_problem_fails(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"name": "broken", "q": 2.0}))
        assert main(["check", "--problem", str(path)]) == 1
        assert "FAIL schema" in capsys.readouterr().out

    def test_bad_data_fails_self_tests(self, tmp_path, capsys):
        # schema-valid but f divides by zero wherever it is sampled
        path = _write_problem(tmp_path, f="1/(x-x)")
        assert main(["check", "--problem", str(path)]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out and "PASS schema" in out
