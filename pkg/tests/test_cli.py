import json
import re

import numpy as np
import pytest

from ckrig.cli import EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, ParseError, main, parse_csv, render_one_decimal
from conftest import DATA_DIR


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseCsv:
    def test_small_with_header(self):
        data = parse_csv("x,v\n1.7,3.2\n2.1,3.9\n")
        assert data.n == 2
        assert data.header == ("x", "v")
        assert data.x.tolist() == [1.7, 2.1]
        assert data.v.tolist() == [3.2, 3.9]

    def test_headerless(self):
        data = parse_csv("1.0,2.0\n3.0,4.0\n")
        assert data.header is None
        assert data.n == 2

    def test_example_file(self, example_csv_path):
        data = parse_csv(example_csv_path.read_text())
        assert data.n == 11
        assert float(np.sum(data.x)) == pytest.approx(50.6, rel=1e-12)

    def test_bad_cell_reports_location(self):
        with pytest.raises(ParseError) as err:
            parse_csv("x,v\n1.7,abc\n")
        assert err.value.row == 2
        assert err.value.col == 2

    def test_three_columns_rejected(self):
        with pytest.raises(ParseError):
            parse_csv("1,2,3\n")

    def test_missing_cell_rejected(self):
        with pytest.raises(ParseError):
            parse_csv("x,v\n1.7,\n")

    def test_empty_input(self):
        with pytest.raises(ParseError):
            parse_csv("")

    def test_header_only(self):
        with pytest.raises(ParseError):
            parse_csv("x,v\n")

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError):
            parse_csv("1.0,2.0\n3.0,inf\n")

    def test_row_order_preserved(self):
        data = parse_csv("9,1\n1,9\n5,5\n")
        assert data.x.tolist() == [9.0, 1.0, 5.0]
        assert data.v.tolist() == [1.0, 9.0, 5.0]


class TestRendering:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (6.145454545454546, "6.1"),
            (0.5313888922162827, "0.5"),
            (0.21609521591748287, "0.2"),
            (-0.21609521591748287, "-0.2"),
            (0.25, "0.2"),   # half-even: ties go to the even digit
            (0.35, "0.4"),
            (2.0, "2.0"),
        ],
    )
    def test_round_half_even(self, value, expected):
        assert render_one_decimal(value) == expected


class TestFitCommand:
    def test_constant_example(self, capsys, example_csv_path):
        code, out, _ = run_cli(capsys, "fit", str(example_csv_path), "--basis", "constant", "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["outputs"]["beta_hat"][0] == pytest.approx(6.145454545454546, rel=1e-12)
        assert doc["outputs"]["rendered"]["beta_hat"] == ["6.1"]

    def test_linear_example(self, capsys, example_csv_path, example_oracle):
        code, out, _ = run_cli(capsys, "fit", str(example_csv_path), "--basis", "linear", "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        beta = doc["outputs"]["beta_hat"]
        assert beta[0] == pytest.approx(example_oracle["b_hat"], rel=1e-10)
        assert beta[1] == pytest.approx(example_oracle["a_hat"], rel=1e-10)

    def test_at_point(self, capsys, example_csv_path):
        code, out, _ = run_cli(
            capsys, "fit", str(example_csv_path), "--basis", "linear", "--at", "4.6", "--json"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        at = doc["outputs"]["at"]
        assert at["variance_factor"]["re"] == pytest.approx(1.0 / 11.0, rel=1e-10)
        assert at["prediction"]["re"] == pytest.approx(6.145454545454546, rel=1e-10)

    def test_single_row_linear_degenerate(self, capsys, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("x,v\n1.0,2.0\n")
        code, out, err = run_cli(capsys, "fit", str(p), "--basis", "linear")
        assert code == EXIT_DEGENERATE
        assert out == ""
        assert "error" in err

    def test_missing_file(self, capsys):
        code, out, err = run_cli(capsys, "fit", "no-such-file.csv")
        assert code == EXIT_INPUT
        assert out == ""

    def test_parse_error_exit(self, capsys, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x,v\n1.7,abc\n")
        code, _, err = run_cli(capsys, "fit", str(p))
        assert code == EXIT_INPUT
        assert "row 2" in err

    def test_lambda_identity_file_matches_default(self, capsys, example_csv_path, tmp_path):
        lam_file = tmp_path / "lam.txt"
        lam_file.write_text("\n".join(" ".join(str(float(i == j)) for j in range(11)) for i in range(11)))
        code, out_default, _ = run_cli(capsys, "fit", str(example_csv_path), "--json")
        code2, out_file, _ = run_cli(
            capsys, "fit", str(example_csv_path), "--lambda", str(lam_file), "--json"
        )
        assert code == code2 == EXIT_OK
        a = json.loads(out_default)["outputs"]["beta_hat"]
        b = json.loads(out_file)["outputs"]["beta_hat"]
        assert a == pytest.approx(b, rel=1e-12)

    def test_lambda_not_spd_exits_3(self, capsys, example_csv_path, tmp_path):
        lam_file = tmp_path / "lam.txt"
        # unit diagonal, but the off-diagonal 1.0 pair makes it singular
        rows = np.eye(11)
        rows[0, 1] = rows[1, 0] = 1.0
        lam_file.write_text("\n".join(" ".join(str(v) for v in row) for row in rows))
        code, _, _ = run_cli(capsys, "fit", str(example_csv_path), "--lambda", str(lam_file))
        assert code == EXIT_DEGENERATE

    def test_lambda_wrong_count_exits_2(self, capsys, example_csv_path, tmp_path):
        lam_file = tmp_path / "lam.txt"
        lam_file.write_text("1.0 0.0 0.0 1.0")
        code, _, _ = run_cli(capsys, "fit", str(example_csv_path), "--lambda", str(lam_file))
        assert code == EXIT_INPUT

    def test_gram_warning_lands_in_document_and_stderr(self, capsys, tmp_path):
        p = tmp_path / "narrow.csv"
        p.write_text("x,v\n1000.0,1.0\n1000.1,2.0\n1000.2,3.0\n")
        code, out, err = run_cli(capsys, "fit", str(p), "--basis", "linear", "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert any("condition" in w for w in doc["warnings"])
        assert "condition" in err


class TestComplexMeanCommand:
    def test_example_rendered_values(self, capsys, example_csv_path):
        code, out, _ = run_cli(capsys, "complex-mean", str(example_csv_path), "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        rendered = doc["outputs"]["rendered"]
        assert rendered["mean_re"] == "6.1"
        assert rendered["real_standard_error"] == "0.5"
        assert rendered["imaginary_standard_error"] == "0.2"
        assert rendered["mean_im_plus"] == "-0.2"
        assert rendered["mean_im_minus"] == "0.2"

    def test_example_full_precision(self, capsys, example_csv_path, example_oracle):
        _, out, _ = run_cli(capsys, "complex-mean", str(example_csv_path), "--json")
        doc = json.loads(out)
        mean_plus = doc["outputs"]["mean"]["plus"]
        assert mean_plus["re"] == pytest.approx(example_oracle["mean_plus"].real, abs=1e-10)
        assert mean_plus["im"] == pytest.approx(example_oracle["mean_plus"].imag, abs=1e-10)
        var_plus = doc["outputs"]["variance"]["plus"]
        assert var_plus["re"] == pytest.approx(example_oracle["var_plus"].real, abs=1e-10)
        assert var_plus["im"] == pytest.approx(example_oracle["var_plus"].imag, abs=1e-10)

    def test_branch_filter(self, capsys, example_csv_path):
        _, out, _ = run_cli(capsys, "complex-mean", str(example_csv_path), "--branch", "plus", "--json")
        doc = json.loads(out)
        assert "plus" in doc["outputs"]["mean"]
        assert "minus" not in doc["outputs"]["mean"]
        assert "mean_im_minus" not in doc["outputs"]["rendered"]

    def test_constant_observations(self, capsys, tmp_path):
        p = tmp_path / "const.csv"
        p.write_text("x,v\n1.0,4.0\n2.0,4.0\n3.0,4.0\n")
        code, out, _ = run_cli(capsys, "complex-mean", str(p), "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["outputs"]["mean"]["plus"]["re"] == pytest.approx(4.0, rel=1e-14)
        assert doc["outputs"]["real_standard_error"] == 0.0
        assert abs(doc["outputs"]["imaginary_standard_error"]) <= 1e-14

    def test_constant_covariates_degenerate(self, capsys, tmp_path):
        p = tmp_path / "flat.csv"
        p.write_text("x,v\n2.0,1.0\n2.0,5.0\n")
        code, out, err = run_cli(capsys, "complex-mean", str(p))
        assert code == EXIT_DEGENERATE
        assert out == ""

    def test_golden_file_byte_identical(self, capsys, example_csv_path):
        code, out, err = run_cli(capsys, "complex-mean", str(example_csv_path), "--json")
        assert code == EXIT_OK
        golden = (DATA_DIR / "complex_mean_golden.json").read_text()
        assert out == golden

    def test_json_purity(self, capsys, example_csv_path):
        _, out, err = run_cli(capsys, "complex-mean", str(example_csv_path), "--json")
        json.loads(out)  # exactly one parseable document
        assert err == ""

    def test_json_round_trips_losslessly(self, capsys, example_csv_path):
        _, out, _ = run_cli(capsys, "complex-mean", str(example_csv_path), "--json")
        assert json.dumps(json.loads(out), indent=2) + "\n" == out


class TestZeroPointsCommand:
    def test_example(self, capsys, example_csv_path, example_oracle):
        code, out, _ = run_cli(capsys, "zero-points", str(example_csv_path), "--json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["outputs"]["points"]["plus"]["re"] == pytest.approx(4.6, rel=1e-14)
        assert doc["outputs"]["points"]["plus"]["im"] == pytest.approx(
            example_oracle["sigma_n"], rel=1e-12
        )

    def test_integer_indices(self, capsys, tmp_path):
        p = tmp_path / "idx.csv"
        p.write_text("".join(f"{i},0.0\n" for i in range(1, 12)))
        _, out, _ = run_cli(capsys, "zero-points", str(p), "--json")
        doc = json.loads(out)
        assert doc["outputs"]["m_n"] == pytest.approx(6.0, rel=1e-15)
        assert doc["outputs"]["points"]["minus"]["im"] == pytest.approx(-np.sqrt(10.0), rel=1e-14)

    def test_two_equal_covariates_degenerate(self, capsys, tmp_path):
        p = tmp_path / "dup.csv"
        p.write_text("3.0,1.0\n3.0,2.0\n")
        code, _, _ = run_cli(capsys, "zero-points", str(p))
        assert code == EXIT_DEGENERATE


class TestSimulateCommand:
    def test_zero_sigma_zero_moments(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--n", "11", "--sigma", "0", "--replicates", "100", "--json"
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["outputs"]["var_re"] == 0.0
        assert doc["outputs"]["var_im"] == 0.0
        assert doc["outputs"]["bilinear_mse"] == {"re": 0.0, "im": 0.0}

    def test_same_seed_byte_identical(self, capsys):
        argv = ["simulate", "--n", "11", "--sigma", "1", "--replicates", "500", "--seed", "42", "--json"]
        code1, out1, _ = run_cli(capsys, *argv)
        code2, out2, _ = run_cli(capsys, *argv)
        assert code1 == code2 == EXIT_OK
        assert out1 == out2

    def test_at_literal_point(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "simulate", "--n", "11", "--sigma", "0.5", "--replicates", "200",
            "--at", "6+3.1622776601683795j", "--json",
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["inputs"]["at"]["im"] == pytest.approx(np.sqrt(10.0), rel=1e-12)

    def test_default_at_is_zero_variance(self, capsys):
        _, out, _ = run_cli(capsys, "simulate", "--n", "11", "--replicates", "10", "--json")
        doc = json.loads(out)
        assert doc["inputs"]["at"]["re"] == pytest.approx(6.0, rel=1e-14)
        assert doc["inputs"]["at"]["im"] == pytest.approx(np.sqrt(10.0), rel=1e-14)

    def test_invalid_at_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["simulate", "--at", "sideways"])
        assert err.value.code == EXIT_INPUT

    def test_invalid_replicates_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "simulate", "--replicates", "0")
        assert code == EXIT_INPUT


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == EXIT_INPUT


def test_table_output_is_aligned(capsys, example_csv_path):
    code, out, _ = run_cli(capsys, "zero-points", str(example_csv_path))
    assert code == EXIT_OK
    lines = [line for line in out.splitlines() if line]
    # two-column layout: every value starts at the same offset
    matches = [re.match(r"^(\S+)( +)\S", line) for line in lines]
    assert all(matches)
    offsets = {len(m.group(1)) + len(m.group(2)) for m in matches}
    assert len(offsets) == 1
