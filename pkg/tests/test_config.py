import pytest

from glim.errors import ConfigError
from glim_experimental.config import RunConfig, default_jobs, load_toml

CONFIG = """
seed = 7
jobs = 2
out = "reports/run.json"

[params]
n = 4000
d = 4

[tolerances]
ks = 0.05
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(CONFIG)
    return str(path)


def test_config_file_values(config_path):
    config = RunConfig.from_sources("exp", "kesten-mckay", config_path)
    assert config.seed == 7
    assert config.jobs == 2
    assert config.out == "reports/run.json"
    assert config.params == {"n": 4000, "d": 4}
    assert config.tolerances == {"ks": 0.05}
    assert config.fmt == "json"


def test_command_line_overrides_file(config_path):
    config = RunConfig.from_sources(
        "exp",
        "kesten-mckay",
        config_path,
        {
            "seed": 3,
            "jobs": None,
            "params": {"n": 100},
            "tolerances": {"moment": 1},
            "format": "csv",
        },
    )
    assert config.seed == 3
    assert config.jobs == 2
    assert config.params == {"n": 100, "d": 4}
    assert config.tolerances == {"ks": 0.05, "moment": 1.0}
    assert config.fmt == "csv"

    data = config.to_dict()
    assert data["command"] == "exp"
    assert data["target"] == "kesten-mckay"
    assert data["format"] == "csv"


def test_defaults_without_a_file(monkeypatch):
    monkeypatch.delenv("GLIM_JOBS", raising=False)
    config = RunConfig.from_sources("spec")
    assert config.seed is None
    assert config.jobs == 1
    assert config.params == {}
    with pytest.raises(ConfigError, match="requires --seed"):
        config.require_seed()


def test_jobs_from_environment(monkeypatch):
    monkeypatch.setenv("GLIM_JOBS", "3")
    assert default_jobs() == 3
    assert RunConfig.from_sources("exp", "friedman").jobs == 3
    monkeypatch.setenv("GLIM_JOBS", "many")
    with pytest.raises(ConfigError, match="must be an integer"):
        default_jobs()
    monkeypatch.setenv("GLIM_JOBS", "0")
    with pytest.raises(ConfigError, match="must be positive"):
        default_jobs()


@pytest.mark.parametrize(
    "cli, message",
    [
        ({"format": "xml"}, "Unknown format"),
        ({"jobs": 0}, "jobs must be positive"),
        ({"seed": -1}, "seed must be a non-negative integer"),
        ({"seed": True}, "seed must be a non-negative integer"),
        ({"seed": "7"}, "seed must be a non-negative integer"),
    ],
)
def test_invalid_command_line_values(cli, message):
    with pytest.raises(ConfigError, match=message):
        RunConfig.from_sources("exp", "friedman", cli_params=cli)


def test_unknown_command():
    with pytest.raises(ConfigError, match="Unknown command"):
        RunConfig.from_sources("play")


def test_invalid_files(tmp_path):
    unknown = tmp_path / "unknown.toml"
    unknown.write_text("seeds = 3\n")
    with pytest.raises(ConfigError, match="Unknown config keys"):
        load_toml(str(unknown))

    malformed = tmp_path / "malformed.toml"
    malformed.write_text("seed = = 3\n")
    with pytest.raises(ConfigError, match="Malformed config"):
        load_toml(str(malformed))

    not_a_table = tmp_path / "params.toml"
    not_a_table.write_text("params = 3\n")
    with pytest.raises(ConfigError, match=r"\[params\] must be a table"):
        load_toml(str(not_a_table))

    with pytest.raises(ConfigError, match="Cannot read config"):
        load_toml(str(tmp_path / "missing.toml"))
