"""Run configuration merged from preset defaults, a TOML file and the command line.

A config file looks like::

    seed = 7
    jobs = 4
    out = "reports/kesten-mckay.json"

    [params]
    n = 4000
    d = 4

    [tolerances]
    ks = 0.02
"""
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

from glim.errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = ("gen", "spec", "exp", "census", "nb-scatter")
FORMATS = ("json", "csv")
JOBS_ENV = "GLIM_JOBS"
FILE_KEYS = {"seed", "jobs", "out", "format", "params", "tolerances"}


def load_toml(path: str) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"Malformed config {path}: {err}") from err
    except OSError as err:
        raise ConfigError(f"Cannot read config {path}: {err}") from err
    unknown = set(data) - FILE_KEYS
    if unknown:
        raise ConfigError(f"Unknown config keys {sorted(unknown)} in {path}")
    for table in ("params", "tolerances"):
        if not isinstance(data.get(table, {}), dict):
            raise ConfigError(f"[{table}] must be a table in {path}")
    return data


def default_jobs() -> int:
    value = os.environ.get(JOBS_ENV)
    if not value:
        return 1
    try:
        jobs = int(value)
    except ValueError as err:
        raise ConfigError(f"{JOBS_ENV} must be an integer, got {value!r}") from err
    if jobs < 1:
        raise ConfigError(f"{JOBS_ENV} must be positive, got {jobs}")
    return jobs


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the output of one command."""

    command: str
    target: Optional[str] = None  # experiment, ensemble or graph path
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "json"
    jobs: int = 1
    tolerances: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "target": self.target,
            "params": dict(self.params),
            "seed": self.seed,
            "out": self.out,
            "format": self.fmt,
            "jobs": self.jobs,
            "tolerances": dict(self.tolerances),
        }

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(f"glim {self.command} {self.target} requires --seed")
        return self.seed

    @classmethod
    def from_sources(
        cls,
        command: str,
        target: Optional[str] = None,
        config_path: Optional[str] = None,
        cli_params: Optional[Mapping[str, Any]] = None,
    ) -> "RunConfig":
        """Command-line values override the TOML file, which overrides defaults.

        ``cli_params`` may hold "seed", "out", "format", "jobs", "params" and
        "tolerances"; None values are ignored.
        """
        if command not in COMMANDS:
            raise ConfigError(f"Unknown command {command!r}")
        data = load_toml(config_path) if config_path else {}
        cli = {k: v for k, v in (cli_params or {}).items() if v is not None}
        params = {**data.get("params", {}), **cli.get("params", {})}
        tolerances = {**data.get("tolerances", {}), **cli.get("tolerances", {})}
        fmt = cli.get("format", data.get("format", "json"))
        if fmt not in FORMATS:
            raise ConfigError(f"Unknown format {fmt!r}; choose from {list(FORMATS)}")
        jobs = cli.get("jobs", data.get("jobs"))
        jobs = default_jobs() if jobs is None else int(jobs)
        if jobs < 1:
            raise ConfigError(f"jobs must be positive, got {jobs}")
        seed = cli.get("seed", data.get("seed"))
        valid_seed = isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0
        if seed is not None and not valid_seed:
            raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
        return cls(
            command=command,
            target=target,
            params=params,
            seed=seed,
            out=cli.get("out", data.get("out")),
            fmt=fmt,
            jobs=jobs,
            tolerances={k: float(v) for k, v in tolerances.items()},
        )
