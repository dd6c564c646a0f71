from glim_experimental.cli.simulation_accumulator import SimulationAccumulator
from glim_experimental.cli.cli_experiments import (
    register_experiment,
    register_accumulator,
)
