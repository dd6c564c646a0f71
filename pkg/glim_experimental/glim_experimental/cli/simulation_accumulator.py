from glim_experimental.experiments.base import TrialAccumulator


class SimulationAccumulator(TrialAccumulator):
    def before_all(self):
        """Called before all trials of a glim exp run."""
        pass

    def after_all(self):
        """Called after all trials of a glim exp run."""
        pass
