import json

import pytest

from src.cli import EXIT_BOT, EXIT_ERROR, EXIT_OK, main
from src.metrics.distances import dist_mixture
from src.models.mixture import Gmm
from src.ppe.calibration import min_subsets
from src.utils.serialization import gmm_to_json

BUDGET = ["--epsilon", "3", "--delta", "1e-3", "--alpha", "0.5", "--beta", "0.1"]


@pytest.fixture(scope="module")
def generated(tmp_path_factory):
    root = tmp_path_factory.mktemp("gen")
    data, truth = root / "data.csv", root / "truth.json"
    code = main(
        [
            "gen", "--k", "1", "--d", "1", "--n", str(62 * 1000), "--separation", "5",
            "--seed", "11", "--out-data", str(data), "--out-truth", str(truth), "--no-progress",
        ]
    )
    assert code == EXIT_OK
    return data, truth


def _last_json(out):
    return json.loads(out.strip().splitlines()[-1])


def test_gen_writes_files(generated):
    data, truth = generated
    assert len(data.read_text().splitlines()) == 62_000
    assert json.loads(truth.read_text())["k"] == 1


def test_fit_releases_and_is_thread_independent(generated, capsys):
    data, _ = generated
    args = ["fit", "--data", str(data), "--k", "1", *BUDGET, "--r", "1", "--seed", "5"]
    assert main(args + ["--threads", "1"]) == EXIT_OK
    single = capsys.readouterr().out
    assert main(args + ["--threads", "4"]) == EXIT_OK
    assert capsys.readouterr().out == single

    record = json.loads(single)
    assert record["outcome"] == "released"
    assert record["certified"] is False
    assert record["config"]["t"] == 62
    assert record["released"]["k"] == 1
    assert "diagnostics" not in record and "timings" not in record


def test_fit_bot_exit_code(generated, capsys):
    data, _ = generated
    code = main(["fit", "--data", str(data), "--k", "1", *BUDGET, "--unsafe-diagnostics"])
    record = _last_json(capsys.readouterr().out)
    assert code == EXIT_BOT
    assert record["outcome"] == "bot"
    assert record["certified"] is True
    assert record["diagnostics"]["failure"] == "below_threshold"


def test_fit_errors(generated, tmp_path, capsys):
    small = tmp_path / "small.csv"
    small.write_text("0.0\n1.0\n2.0\n")
    assert main(["fit", "--data", str(small), "--k", "3", *BUDGET]) == EXIT_ERROR
    captured = capsys.readouterr()
    assert _last_json(captured.out)["outcome"] == "error"
    assert captured.err.startswith("error:")

    data, _ = generated
    args = ["fit", "--data", str(data), "--k", "1", "--epsilon", "1", "--delta", "1e-6",
            "--alpha", "0.5", "--beta", "0.1", "--t", "100"]
    assert main(args) == EXIT_ERROR
    assert "1.07327" in capsys.readouterr().err


def test_calibrate_reports_formulas(capsys):
    args = ["calibrate", "--k", "2", "--d", "3", "--alpha", "0.05", "--beta", "0.05",
            "--epsilon", "0.1", "--delta", "1e-6", "--c2", "1"]
    assert main(args) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["gamma"] == pytest.approx(6.0112e-6, rel=1e-4)
    assert report["t_min"] == min_subsets(0.1, 1e-6)
    assert report["eta_w"] is None
    assert "mask_error" in report


def test_calibrate_rejects_large_epsilon(capsys):
    args = ["calibrate", "--k", "1", "--d", "1", "--alpha", "0.1", "--beta", "0.1",
            "--epsilon", "0.5", "--delta", "1e-6"]
    assert main(args) == EXIT_ERROR
    assert "ln(2)/3" in capsys.readouterr().err


def test_dist_of_identical_files(generated, capsys):
    _, truth = generated
    assert main(["dist", "--a", str(truth), "--b", str(truth)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"distance": 0.0}


def test_dist_prints_twelve_significant_digits(tmp_path, capsys):
    a = Gmm.from_arrays([1.0], [[0.0]], [[[1.0]]])
    b = Gmm.from_arrays([1.0], [[5.0 / 3.0]], [[[1.7]]])
    (tmp_path / "a.json").write_text(gmm_to_json(a))
    (tmp_path / "b.json").write_text(gmm_to_json(b))
    args = ["dist", "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json")]
    assert main(args) == EXIT_OK
    printed = json.loads(capsys.readouterr().out)["distance"]
    exact = dist_mixture(a, b)
    assert printed == float(f"{exact:.12g}")
    assert printed != exact
    assert printed == pytest.approx(exact, rel=1e-11)
    assert len(repr(printed).replace(".", "").lstrip("0")) <= 12


def test_audit_triangle(tmp_path, capsys):
    out = tmp_path / "reports.jsonl"
    args = ["audit", "triangle", "--sampler", "collinear", "--trials", "20", "--out", str(out)]
    assert main(args) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["name"] == "triangle"
    assert report["passed"] is True
    assert json.loads(out.read_text()) == report


def test_audit_concentration_noise_flags(generated, capsys):
    _, truth = generated
    args = ["audit", "concentration", "--gmm", str(truth), "--trials", "200",
            "--alpha", "10", "--beta", "0.1", "--epsilon", "0.1", "--delta", "1e-6"]
    assert main(args + ["--eta-w", "0", "--eta-mean", "0.1", "--eta-cov", "0"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["statistic"] == 0.0
    assert main(args + ["--eta-w", "0.1"]) == EXIT_ERROR
