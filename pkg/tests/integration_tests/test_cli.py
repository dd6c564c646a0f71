import json
import os

import pytest
from click.testing import CliRunner

from glim.io import read_graph
from glim_experimental.cli.cli_experiments import CUSTOM_ACCUMULATORS
from glim_experimental.main import cli

CYCLE_EXP = [
    "exp",
    "bs-convergence",
    "--ensemble",
    "cycle-schreier",
    "--n-list",
    "[50]",
    "--rank",
    "1",
    "--r",
    "1",
]


def cycle(n):
    return ["cycle-schreier", "--n", str(n), "--rank", "1"]


def invoke(*args):
    return CliRunner().invoke(cli, list(args))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_gen(tmp_path):
    first, second = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
    args = ["gen", "regular", "--n", "50", "--d", "3", "--seed", "7"]
    result = invoke(*args, "-o", first)
    assert result.exit_code == 0
    invoke(*args, "-o", second)
    with open(first) as a, open(second) as b:
        assert a.read() == b.read()
    g = read_graph(first)
    assert g.vertex_count == 50
    assert g.num_edges == 75


def test_gen_errors():
    assert invoke("gen", "regular", "--n", "50", "--d", "3").exit_code == 1
    assert invoke("gen", "regular", "--d", "3", "--seed", "1").exit_code == 1
    assert invoke("gen", "lattice", "--n", "5", "--seed", "1").exit_code == 1
    odd = invoke("gen", "regular", "--n", "5", "--d", "3", "--seed", "1")
    assert odd.exit_code == 1


def test_spec(tmp_path):
    graph = str(tmp_path / "g.txt")
    invoke("gen", "regular", "--n", "40", "--d", "3", "--seed", "1", "-o", graph)

    out = str(tmp_path / "spectrum.json")
    assert invoke("spec", graph, "--bins", "10", "-o", out).exit_code == 0
    data = read_json(out)
    assert data["schema"] == "glim.spectrum/1"
    assert data["dim"] == 40
    assert data["extremes"][0] == pytest.approx(3.0)
    assert data["config"]["command"] == "spec"

    nb = str(tmp_path / "nb.json")
    result = invoke("spec", graph, "--op", "nb", "--extreme", "-k", "2", "-o", nb)
    assert result.exit_code == 0
    assert read_json(nb)["method"] == "arnoldi"

    values = str(tmp_path / "values.csv")
    assert invoke("spec", *cycle(12), "--format", "csv", "-o", values).exit_code == 0
    with open(values) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "value"
    assert len(lines) == 13


def test_spec_plot(tmp_path):
    plot = str(tmp_path / "scatter.svg")
    out = str(tmp_path / "s.json")
    result = invoke("spec", *cycle(8), "--op", "nb", "-o", out, "--plot", plot)
    assert result.exit_code == 0
    assert os.path.exists(plot)


def test_census(tmp_path):
    out = str(tmp_path / "census.json")
    assert invoke("census", *cycle(10), "--r", "1", "-o", out).exit_code == 0
    data = read_json(out)
    assert data["schema"] == "glim.census/1"
    assert len(data["classes"]) == 1
    assert data["classes"][0]["weight"] == 1.0

    table = str(tmp_path / "census.csv")
    assert invoke("census", *cycle(10), "--format", "csv", "-o", table).exit_code == 0
    with open(table) as fh:
        assert fh.readline().strip() == "code,kind,size,exact,count,weight"


def test_nb_scatter(tmp_path):
    graph = str(tmp_path / "g.txt")
    invoke("gen", "regular", "--n", "20", "--d", "3", "--seed", "2", "-o", graph)
    out, plot = str(tmp_path / "scatter.csv"), str(tmp_path / "scatter.svg")
    assert invoke("nb-scatter", graph, "-o", out, "--plot", plot).exit_code == 0
    with open(out) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "re,im"
    assert len(lines) == 61
    assert os.path.exists(plot)

    assert invoke("nb-scatter", graph, "--max-dim", "10", "-o", out).exit_code == 1


def test_exp_pass_and_fail(tmp_path):
    out = str(tmp_path / "report.json")
    result = invoke("--quiet", *CYCLE_EXP, "--seed", "0", "-o", out)
    assert result.exit_code == 0
    report = read_json(out)
    assert report["schema"] == "glim.experiment/1"
    assert report["verdict"] == "pass"
    assert report["config"]["seed"] == 0

    result = invoke("--quiet", *CYCLE_EXP, "--seed", "0", "--tol", "tv=-1", "-o", out)
    assert result.exit_code == 2
    assert read_json(out)["verdict"] == "fail"


def test_exp_prints_tables():
    result = invoke(*CYCLE_EXP, "--seed", "0")
    assert result.exit_code == 0
    assert "bs-convergence checks" in result.output
    assert "Trial Summary" in result.output


def test_exp_errors():
    assert invoke(*CYCLE_EXP).exit_code == 1
    assert invoke("exp", "bogus", "--seed", "0").exit_code == 1
    assert invoke(*CYCLE_EXP, "--seed", "0", "--size", "3").exit_code == 1
    assert invoke(*CYCLE_EXP, "--seed", "0", "--tol", "tv").exit_code == 1
    assert invoke(*CYCLE_EXP, "--seed", "0", "--tol", "speed=1").exit_code == 1


def test_help_experiments():
    result = invoke("exp", "--help-experiments")
    assert result.exit_code == 0
    assert "Experiment Legend" in result.output
    assert "kesten-mckay" in result.output


def test_exp_config_file(tmp_path):
    config = tmp_path / "run.toml"
    config.write_text(
        'seed = 0\n\n[params]\n'
        'ensemble = "cycle-schreier"\nn_list = [40]\nrank = 1\nr = 1\n'
    )
    out = str(tmp_path / "report.json")
    result = invoke(
        "--quiet", "exp", "bs-convergence", "--config", str(config), "-o", out
    )
    assert result.exit_code == 0
    report = read_json(out)
    assert report["parameters"]["n_list"] == [40]
    assert report["seed"] == 0


def test_exp_trial_and_plot_dirs(tmp_path):
    trials, plots = str(tmp_path / "trials"), str(tmp_path / "plots")
    result = invoke(
        "--quiet",
        "exp",
        "kesten-mckay",
        *["--n", "100", "--d", "3", "--moments", "2", "--bins", "10", "--seed", "1"],
        *["--format", "csv", "--trial-dir", trials, "--plot-dir", plots],
        *["-o", str(tmp_path / "trials.csv")],
    )
    assert result.exit_code in (0, 2)
    assert os.path.exists(os.path.join(trials, "trial-0000.json"))
    assert os.path.exists(os.path.join(trials, "trials.csv"))
    assert os.path.exists(os.path.join(plots, "histogram-0000.svg"))
    with open(tmp_path / "trials.csv") as fh:
        assert fh.readline().startswith("index,seed,ks")


def test_exp_custom_accumulator(tmp_path):
    marker = tmp_path / "after_all.txt"
    code = tmp_path / "custom.py"
    code.write_text(
        "from glim_experimental.cli.cli_experiments import register_accumulator\n"
        "from glim_experimental.cli.simulation_accumulator import (\n"
        "    SimulationAccumulator,\n"
        ")\n"
        "\n"
        "@register_accumulator\n"
        "class CountTrials(SimulationAccumulator):\n"
        "    def before_all(self):\n"
        "        self.count = 0\n"
        "\n"
        "    def after(self, trial):\n"
        "        self.count += 1\n"
        "\n"
        "    def after_all(self):\n"
        f"        open({str(marker)!r}, 'w').write(str(self.count))\n"
    )
    try:
        out = str(tmp_path / "r.json")
        result = invoke(
            "--quiet",
            *CYCLE_EXP,
            *["--trials", "3", "--seed", "0", "--code", str(code), "-o", out],
        )
        assert result.exit_code == 0
        assert marker.read_text() == "3"
    finally:
        CUSTOM_ACCUMULATORS.clear()
