import csv
import json

import pytest
from conftest import CONFIG_DIR

from config.constants import (
    EXIT_CONFIG,
    EXIT_DOMAIN,
    EXIT_IMPROBABLE,
    EXIT_OK,
    EXIT_TOLERANCE,
)
from src.catgen.tools.catgen import CatgenRunner, main
from src.catgen.tools.scenario import parse_scenario

SMALL = """\
schema_version = 1
input.kind = squeezed_vacuum
input.kappa = 0.5
splitter.transmissivity = 0.9
operation.kind = subtract
operation.count = 2
grid.n_x = 11
grid.n_p = 11
output.slice_points = 41
"""


def write_config(directory, text, name="small.cfg"):
    path = directory / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def read_summary(out_dir):
    return json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


def test_generate_chopping_preset(run_env):
    out = run_env / "fig1"
    config = str(CONFIG_DIR / "fig1.cfg")
    code = main(["generate", "--config", config, "--out", str(out)])
    assert code == EXIT_OK
    summary = read_summary(out)
    assert summary["probabilities"]["detect"] == pytest.approx(6.10657e-4, rel=1e-4)
    assert summary["command"] == "generate"
    weights = read_csv(out / "mixture_weights.csv")
    assert weights[0] == ["count", "weight"]
    assert weights[1][0] == "4"
    assert (out / "component_4.csv").exists()
    assert (run_env / "catgen.log").exists()


def test_generate_pure_state(run_env):
    config = write_config(run_env, SMALL)
    assert main(["generate", "-c", config, "-o", str(run_env / "out")]) == EXIT_OK
    rows = read_csv(run_env / "out" / "state.csv")
    assert rows[0] == ["n", "re", "im"]
    # two subtractions keep the even parity
    assert float(rows[2][1]) == 0.0
    summary = read_summary(run_env / "out")
    assert 0.0 < summary["probabilities"]["outcome"] < 1.0


def test_output_dir_from_environment(run_env):
    config = write_config(run_env, SMALL)
    assert main(["generate", "-c", config]) == EXIT_OK
    assert (run_env / "output" / "state.csv").exists()


def test_runs_are_byte_identical(run_env):
    config = str(CONFIG_DIR / "fig2.cfg")
    first, second = run_env / "first", run_env / "second"
    assert main(["generate", "-c", config, "-o", str(first)]) == EXIT_OK
    assert main(["generate", "-c", config, "-o", str(second)]) == EXIT_OK
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_compare_passes_on_small_grid(run_env):
    config = write_config(run_env, SMALL)
    assert main(["compare", "-c", config, "-o", str(run_env / "out")]) == EXIT_OK
    deviations = read_summary(run_env / "out")["deviations"]
    assert set(deviations) == {
        "wigner",
        "husimi",
        "quadrature",
        "state_infidelity",
        "probability_relative",
    }
    assert deviations["wigner"] < 1e-6


def test_compare_failure_still_writes_summary(run_env):
    config = write_config(run_env, SMALL)
    out = run_env / "out"
    code = main(["compare", "-c", config, "-o", str(out), "--tolerance", "1e-30"])
    assert code == EXIT_TOLERANCE
    assert "wigner_worst_point" in read_summary(out)["diagnostics"]


def test_probability_table(run_env):
    config = write_config(run_env, SMALL)
    out = run_env / "out"
    assert main(["probability", "-c", config, "-o", str(out)]) == EXIT_OK
    rows = read_csv(out / "probabilities.csv")
    assert rows[0] == ["count", "closed_form", "ideal_sum", "general_sum"]
    assert len(rows) == 1 + 7
    for _, closed, ideal, general in rows[1:]:
        expected = pytest.approx(float(closed), rel=1e-6, abs=1e-10)
        assert float(ideal) == expected
        assert float(general) == expected


def test_grid_files(run_env):
    config = write_config(run_env, SMALL)
    out = run_env / "out"
    assert main(["grid", "-c", config, "-o", str(out), "--numeric"]) == EXIT_OK
    wigner = read_csv(out / "wigner.csv")
    assert len(wigner) == 2 + 11
    assert len(wigner[2]) == 11
    quadrature = read_csv(out / "quadrature.csv")
    assert len(quadrature) == 1 + 2 * 41
    assert "wigner_integral" in read_summary(out)["diagnostics"]


def test_detector_command(run_env):
    out = run_env / "det"
    config = str(CONFIG_DIR / "fig1.cfg")
    assert main(["detector", "-c", config, "-o", str(out)]) == EXIT_OK
    summary = read_summary(out)
    assert summary["probabilities"]["evidence"] == pytest.approx(6.10657e-4, rel=1e-4)
    posterior = read_csv(out / "posterior.csv")
    assert posterior[0] == ["m", "prior", "likelihood", "posterior"]
    total = sum(float(row[3]) for row in posterior[1:])
    assert total == pytest.approx(1.0, abs=1e-12)
    assert read_csv(out / "response.csv")[0] == ["k", "m", "probability"]


def test_detector_command_needs_chopping(run_env):
    config = write_config(run_env, SMALL)
    assert main(["detector", "-c", config, "-o", str(run_env / "out")]) == EXIT_CONFIG


def test_missing_config(run_env):
    assert main(["generate", "-c", str(run_env / "absent.cfg")]) == EXIT_CONFIG


def test_squeeze_out_of_domain(run_env):
    config = write_config(run_env, SMALL.replace("kappa = 0.5", "kappa = 1.2"))
    assert main(["generate", "-c", config]) == EXIT_DOMAIN


def test_subtraction_from_vacuum_is_improbable(run_env):
    text = SMALL.replace(
        "input.kind = squeezed_vacuum\ninput.kappa = 0.5",
        "input.kind = fock\ninput.n = 0",
    )
    config = write_config(run_env, text)
    assert main(["generate", "-c", config]) == EXIT_IMPROBABLE


def test_closed_forms_need_squeezed_input(run_env):
    text = SMALL.replace(
        "input.kind = squeezed_vacuum\ninput.kappa = 0.5",
        "input.kind = fock\ninput.n = 3",
    )
    config = write_config(run_env, text)
    assert main(["generate", "-c", config, "--analytic"]) == EXIT_CONFIG
    assert main(["generate", "-c", config]) == EXIT_OK


def test_usage(run_env):
    assert main(["--help"]) == EXIT_OK
    assert main(["generate"]) == EXIT_CONFIG
    assert main(["teleport", "-c", "x.cfg"]) == EXIT_CONFIG


def test_routes(run_env):
    scenario = parse_scenario(write_config(run_env, SMALL))
    out = run_env / "out"
    assert CatgenRunner(scenario, out).route() == "closed"
    assert CatgenRunner(scenario, out, numeric=True).route() == "pipeline"
    condition = SMALL.replace("operation.kind = subtract", "operation.kind = condition")
    scenario = parse_scenario(write_config(run_env, condition, "condition.cfg"))
    assert CatgenRunner(scenario, out).route() == "pipeline"


def test_verbose_runner_logs(run_env):
    scenario = parse_scenario(CONFIG_DIR / "fig2.cfg")
    lines = []
    runner = CatgenRunner(scenario, run_env / "out", verbose=True, logger=lines.append)
    runner.run("generate")
    assert any(line.startswith("[MIXTURE]") for line in lines)
    assert any(line.startswith("[ARTIFACT]") for line in lines)
