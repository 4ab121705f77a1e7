import json
import os

import pytest

from configs.experiment_config import ExperimentConfig, load_config, parse_config, serialize_config
from main import EXIT_BLOW_UP, EXIT_CONFIG, EXIT_OK, main
from utils.errors import ConfigError

SMALL = """
trajectories = 2
perturbations = [0.01]
identity_pairs = 5
identity_samples = 100
sim.radius = 2.0
sim.spacing = 0.25
sim.horizon = 0.02
sim.sample_stride = 5
sim.modes = 4
sim.tail_ladder = [0.5, 1.0, 1.5]
sim.block_size = 1
"""

BLOW_UP = SMALL + """
initial_amplitude = 1000.0
amplitudes = [1000.0, 10000.0]
sim.linf_ceiling = 1e12
sim.max_halvings = 1
"""


def _read_bytes(directory):
    out = {}
    for name in sorted(os.listdir(directory)):
        with open(os.path.join(directory, name), "rb") as f:
            out[name] = f.read()
    return out


# ----------------------------------------------------------------------
# Configuration documents
# ----------------------------------------------------------------------

def test_empty_document_gives_defaults():
    config = parse_config("")
    assert config == ExperimentConfig()
    assert config.amplitudes == (0.1, 1.0)


def test_errors_name_the_offending_key():
    with pytest.raises(ConfigError) as excinfo:
        parse_config("sim.intensity = 1.5\n")
    assert excinfo.value.errors[0].startswith("sim.intensity:")


def test_explicit_guard_is_reported():
    with pytest.raises(ConfigError, match="stability guard"):
        parse_config('sim.scheme = "explicit"\nsim.dt = 0.01\n')


def test_unknown_and_malformed_documents():
    with pytest.raises(ConfigError) as unknown:
        parse_config("colour = 1\n")
    assert any(error.startswith("colour:") for error in unknown.value.errors)

    with pytest.raises(ConfigError) as malformed:
        parse_config("sim.dt = = 3\n")
    assert malformed.value.errors[0].startswith("document:")


@pytest.mark.parametrize(
    "line",
    [
        "radii = [8.0, 4.0]",
        "eps_list = [0.5, 0.1]",
        "delta_list = [0.05, 0.1]",
        "m_ladder = [1.0, 1.0]",
        "perturbations = [0.001, 0.01]",
        "oracle_modes = [0, 1]",
        "amplitudes = [1.0]",
        "amplitudes = [1.0, 1.0]",
        "eps_base = 0.95",
    ],
)
def test_ladders_are_validated(line):
    with pytest.raises(ConfigError):
        parse_config(line + "\n")


def test_measurement_window_must_fit_the_step():
    with pytest.raises(ConfigError, match="burn_in"):
        parse_config('kind = "measure"\nburn_in = 0.0015\n')
    parse_config('kind = "simulate"\nburn_in = 0.0015\n')


def test_document_round_trip():
    config = parse_config(SMALL + 'kind = "expand"\nradii = [1.0, 2.0]\nformat = "json"\nsim.seed = 9\n')
    assert parse_config(serialize_config(config)) == config


def test_overrides_and_missing_files(tmp_path):
    config = ExperimentConfig().with_overrides(kind="oracle-check", seed=7, out="elsewhere")
    assert config.kind == "oracle-check"
    assert config.sim.seed == 7
    assert config.out == "elsewhere"
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.toml"))


# ----------------------------------------------------------------------
# Command line
# ----------------------------------------------------------------------

def test_identity_suite_writes_versioned_csv(write_config, tmp_path):
    out = tmp_path / "reports"
    code = main(["identity-suite", "--config", write_config(SMALL), "--out", str(out), "--threads", "1"])
    assert code == EXIT_OK
    files = sorted(os.listdir(out))
    assert files == ["identity_suite_identities.csv", "identity_suite_summary.csv"]
    for name in files:
        with open(out / name, encoding="utf-8") as f:
            assert f.readline() == "# schema=1\n"


def test_invalid_config_writes_nothing(write_config, tmp_path):
    out = tmp_path / "reports"
    code = main(["simulate", "--config", write_config("sim.intensity = 1.5\n"), "--out", str(out)])
    assert code == EXIT_CONFIG
    assert not out.exists()


def test_json_report_is_sorted(write_config, tmp_path):
    out = tmp_path / "reports"
    path = write_config(SMALL)
    code = main(["identity-suite", "--config", path, "--out", str(out), "--format", "json", "--threads", "1"])
    assert code == EXIT_OK
    with open(out / "identity_suite.json", encoding="utf-8") as f:
        document = json.load(f)
    assert list(document) == sorted(document)
    assert document["kind"] == "identity-suite"
    assert document["flags"] == {"experimental": False, "partial": False}
    assert document["summary"]["passed"]["cross_orthogonality"] is True


def test_eps_sweep_reports_distances(write_config, tmp_path):
    out = tmp_path / "reports"
    path = write_config(SMALL + "burn_in = 0.01\naveraging_window = 0.01\n")
    code = main(["eps-sweep", "--config", path, "--out", str(out), "--format", "json", "--threads", "1"])
    assert code == EXIT_OK
    with open(out / "eps_sweep.json", encoding="utf-8") as f:
        sweep = json.load(f)["tables"]["eps_sweep"]
    assert sweep["delta"] == [0.1, 0.05, 0.025]
    assert all(0.0 <= d <= 1.0 for d in sweep["bl_distance"])


def test_reports_do_not_depend_on_threads(write_config, tmp_path):
    path = write_config(SMALL)
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert main(["simulate", "--config", path, "--out", str(serial), "--threads", "1"]) == EXIT_OK
    assert main(["simulate", "--config", path, "--out", str(parallel), "--threads", "4"]) == EXIT_OK
    assert _read_bytes(serial) == _read_bytes(parallel)
    assert "simulate_continuity.csv" in _read_bytes(serial)


def test_stubs_replay_the_same_report(write_config, tmp_path):
    path = write_config(SMALL)
    stubs = tmp_path / "stubs"
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        args = ["simulate", "--config", path, "--out", str(out), "--threads", "1", "--stub_path", str(stubs)]
        assert main(args) == EXIT_OK
    assert os.listdir(stubs)
    assert _read_bytes(first) == _read_bytes(second)


def test_blow_up_gives_partial_report(write_config, tmp_path):
    out = tmp_path / "reports"
    code = main(["simulate", "--config", write_config(BLOW_UP), "--out", str(out), "--format", "json"])
    assert code == EXIT_BLOW_UP
    with open(out / "simulate.json", encoding="utf-8") as f:
        document = json.load(f)
    assert document["flags"]["partial"] is True
    assert document["summary"]["failed"] == 2
