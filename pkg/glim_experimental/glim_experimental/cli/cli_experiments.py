from collections import namedtuple

from rich.table import Table

from glim_experimental.experiments.alon_boppana import AlonBoppanaBound
from glim_experimental.experiments.bs_convergence import BsConvergence
from glim_experimental.experiments.cover_spectrum import CoverSpectrum
from glim_experimental.experiments.distance_profile import DistanceProfile
from glim_experimental.experiments.er_edges import ErEdges
from glim_experimental.experiments.friedman import Friedman
from glim_experimental.experiments.gw_kernel import GwKernel
from glim_experimental.experiments.kesten_mckay import KestenMcKay
from glim_experimental.experiments.strong_convergence import StrongConvergence

# Experiment must have a CODE, NAME, DESCRIPTION, CLASS.
CliExperiment = namedtuple(
    "CliExperiment", ["code", "name", "description", "import_fn"]
)
CLI_EXPERIMENTS = [
    CliExperiment(cls.name, cls.__name__, cls.description, cls)
    for cls in [
        BsConvergence,
        KestenMcKay,
        GwKernel,
        Friedman,
        ErEdges,
        StrongConvergence,
        AlonBoppanaBound,
        DistanceProfile,
        CoverSpectrum,
    ]
]


def register_experiment(code):
    def decorator(experiment_class):
        CLI_EXPERIMENTS.append(
            CliExperiment(
                code,
                experiment_class.__name__,
                experiment_class.__doc__ or experiment_class.description,
                experiment_class,
            ),
        )
        return experiment_class

    return decorator


def find_experiment(code):
    for cli_experiment in CLI_EXPERIMENTS:
        if cli_experiment.code == code:
            return cli_experiment
    return None


CUSTOM_ACCUMULATORS = []


def register_accumulator(accumulator_class):
    CUSTOM_ACCUMULATORS.append(accumulator_class)
    return accumulator_class


def experiment_help_table():
    table = Table(title="Experiment Legend")
    table.add_column("CODE", justify="center", style="cyan", no_wrap=True)
    table.add_column("EXPERIMENT")
    table.add_column("DESCRIPTION")
    for experiment in CLI_EXPERIMENTS:
        table.add_row(experiment.code, experiment.name, experiment.description)
    return table
