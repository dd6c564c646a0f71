import logging
import time
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence

from glim.seeding import SeedLike, as_seed

from glim_experimental.cli.simulation_accumulator import SimulationAccumulator
from glim_experimental.experiments.base import (
    Experiment,
    ExperimentReport,
    Trial,
    TrialAccumulator,
    TrialSpec,
)

logger = logging.getLogger(__name__)


def trial_specs(
    experiment: Experiment, params: Dict[str, Any], seed: SeedLike
) -> List[TrialSpec]:
    plan = experiment.plan(params)
    seeds = as_seed(seed).spawn(len(plan))
    return [
        TrialSpec(index=i, seed=int(s.value), params=trial_params)
        for i, (trial_params, s) in enumerate(zip(plan, seeds))
    ]


def _execute(experiment: Experiment, params, context, spec: TrialSpec) -> Trial:
    start = time.time()
    trial = experiment.run_trial(params, context, spec)
    trial.duration = time.time() - start
    return trial


def run_trials_core(
    experiment: Experiment,
    params: Dict[str, Any],
    context: Dict[str, Any],
    specs: Sequence[TrialSpec],
    accumulators: Sequence[TrialAccumulator] = (),
    jobs: int = 1,
) -> Iterator[Trial]:
    """Yields finished trials in spec order, whatever ``jobs`` is."""
    for accumulator in accumulators:
        if isinstance(accumulator, SimulationAccumulator):
            accumulator.before_all()

    if jobs <= 1 or len(specs) <= 1:
        for spec in specs:
            for accumulator in accumulators:
                accumulator.before(spec)
            trial = _execute(experiment, params, context, spec)
            for accumulator in accumulators:
                accumulator.after(trial)
            yield trial
    else:
        for spec in specs:
            for accumulator in accumulators:
                accumulator.before(spec)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(
                _execute, repeat(experiment), repeat(params), repeat(context), specs
            )
            for trial in results:
                for accumulator in accumulators:
                    accumulator.after(trial)
                yield trial

    for accumulator in accumulators:
        if isinstance(accumulator, SimulationAccumulator):
            accumulator.after_all()


def run_experiment(
    experiment: Experiment,
    params: Optional[Mapping[str, Any]] = None,
    seed: SeedLike = None,
    tolerances: Optional[Mapping[str, float]] = None,
    accumulators: Sequence[TrialAccumulator] = (),
    jobs: int = 1,
    config: Optional[dict] = None,
) -> ExperimentReport:
    """Runs every trial of ``experiment`` and applies its checks."""
    start = time.time()
    resolved = experiment.resolve(params)
    limits = experiment.resolve_tolerances(tolerances)
    seed = as_seed(seed)
    context = experiment.prepare(resolved)
    specs = trial_specs(experiment, resolved, seed)
    logger.info(
        f"{experiment.name}: {len(specs)} trials, seed {seed.value}, jobs {jobs}"
    )
    trials = list(
        run_trials_core(experiment, resolved, context, specs, accumulators, jobs)
    )
    checks, summary, notes = experiment.evaluate(resolved, context, limits, trials)
    for trial in trials:
        notes.extend(f"trial {trial.spec.index}: {note}" for note in trial.notes)
    report = ExperimentReport(
        name=experiment.name,
        parameters=resolved,
        tolerances=limits,
        seed=int(seed.value),
        trials=trials,
        checks=checks,
        summary=summary,
        notes=notes,
        wall_clock=time.time() - start,
        config=config,
    )
    logger.info(f"{experiment.name}: verdict {report.verdict}")
    return report
