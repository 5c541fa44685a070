"""Learning-to-search structured prediction toolkit.

Roll-in / roll-out online training over task-defined search spaces, a
cost-sensitive online learner, an epsilon-greedy structured bandit,
three concrete tasks (sequence tagging, label-tree multiclass,
arc-hybrid dependency parsing), and exact small-space verification
oracles for the algorithm's guarantees and failure modes.
"""

from . import bandit, core, cslearn, errors, experiment, rng, sparse
from . import tasks, theory, trainer
from .core import LinearPolicy, Policy, SearchTask, StateRef
from .cslearn import CostSensitiveExample, CostSensitiveLearner
from .trainer import RolloutPlan, Trainer

__version__ = "0.1.0"

__all__ = [
    "bandit", "core", "cslearn", "errors", "experiment", "rng", "sparse",
    "tasks", "theory", "trainer",
    "LinearPolicy", "Policy", "SearchTask", "StateRef",
    "CostSensitiveExample", "CostSensitiveLearner",
    "RolloutPlan", "Trainer",
]
