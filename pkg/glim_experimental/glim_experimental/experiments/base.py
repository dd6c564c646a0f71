"""Experiment presets: trial plans, per-trial results and reports.

An :class:`Experiment` turns parameters into a list of trial specs, runs each
spec with its own seed and finally derives pass/fail checks from the
collected statistics. Seeds are spawned from the run seed by trial index, so
statistics do not depend on how trials are scheduled.
"""
import logging
import statistics
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from glim.errors import ConfigError

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "glim.experiment/1"


class TrialAccumulator:
    """Interface to hook into trial lifecycle events.

    Useful to compute aggregate statistics, write per-trial data, etc...
    """

    def __init__(*args, **kwargs):
        pass

    def before(self, spec):
        """Called right before the trial described by ``spec`` runs."""
        pass

    def after(self, trial):
        """Called with the finished Trial."""
        pass


@dataclass(frozen=True)
class TrialSpec:
    index: int
    seed: int
    params: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"index": self.index, "seed": self.seed, "params": dict(self.params)}


@dataclass
class Trial:
    """Statistics of one trial.

    ``data`` holds bulky arrays (spectra, scatters) handed to accumulators;
    it is not part of the report.
    """

    spec: TrialSpec
    stats: Dict[str, Any]
    data: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    duration: float = 0.0

    def to_dict(self) -> dict:
        return {
            **self.spec.to_dict(),
            "stats": self.stats,
            "notes": self.notes,
            "duration": self.duration,
        }


@dataclass
class Check:
    """A declared threshold applied to a statistic.

    Advisory checks are reported but never change the verdict.
    """

    name: str
    passed: bool
    value: float
    threshold: float
    relation: str = "<="
    required: bool = True
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "relation": self.relation,
            "threshold": self.threshold,
            "required": self.required,
            "detail": self.detail,
        }


def at_most(name: str, value: float, threshold: float, **kwargs) -> Check:
    return Check(
        name, bool(value <= threshold), float(value), float(threshold), "<=", **kwargs
    )


def at_least(name: str, value: float, threshold: float, **kwargs) -> Check:
    return Check(
        name, bool(value >= threshold), float(value), float(threshold), ">=", **kwargs
    )


def fraction_of(flags: Sequence[bool]) -> float:
    flags = list(flags)
    return sum(1 for f in flags if f) / len(flags) if flags else 0.0


def median(values: Sequence[float]) -> float:
    values = list(values)
    return float(statistics.median(values)) if values else float("nan")


@dataclass
class ExperimentReport:
    name: str
    parameters: Dict[str, Any]
    tolerances: Dict[str, float]
    seed: int
    trials: List[Trial]
    checks: List[Check]
    summary: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    wall_clock: float = 0.0
    config: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "name": self.name,
            "verdict": self.verdict,
            "seed": self.seed,
            "parameters": self.parameters,
            "tolerances": self.tolerances,
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
            "notes": self.notes,
            "trials": [t.to_dict() for t in self.trials],
            "wall_clock": self.wall_clock,
            "config": self.config,
        }


class Experiment:
    """Base class of the presets.

    Subclasses set ``name``, ``description``, ``defaults`` and ``tolerances``
    and implement :meth:`run_trial` and :meth:`evaluate`.
    """

    name = ""
    description = ""
    defaults: Dict[str, Any] = {}
    tolerances: Dict[str, float] = {}

    def resolve(self, params: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        unknown = set(params or {}) - set(self.defaults)
        if unknown:
            raise ConfigError(f"Unknown parameters for {self.name}: {sorted(unknown)}")
        merged = {**self.defaults, **(params or {})}
        self.validate(merged)
        return merged

    def resolve_tolerances(
        self, tolerances: Optional[Mapping[str, float]] = None
    ) -> Dict[str, float]:
        unknown = set(tolerances or {}) - set(self.tolerances)
        if unknown:
            raise ConfigError(f"Unknown tolerances for {self.name}: {sorted(unknown)}")
        overrides = {k: float(v) for k, v in (tolerances or {}).items()}
        return {**self.tolerances, **overrides}

    def validate(self, params: Dict[str, Any]):
        pass

    def prepare(self, params: Dict[str, Any]) -> Dict[str, Any]:
        """Deterministic quantities shared by every trial (limits, targets)."""
        return {}

    def plan(self, params: Dict[str, Any]) -> List[Dict[str, Any]]:
        return [{} for _ in range(int(params.get("trials", 1)))]

    def run_trial(
        self, params: Dict[str, Any], context: Dict[str, Any], spec: TrialSpec
    ) -> Trial:
        raise NotImplementedError

    def evaluate(
        self,
        params: Dict[str, Any],
        context: Dict[str, Any],
        tolerances: Dict[str, float],
        trials: List[Trial],
    ) -> Tuple[List[Check], Dict[str, Any], List[str]]:
        raise NotImplementedError
