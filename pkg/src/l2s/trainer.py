"""Online roll-in / roll-out training loop.

For each structured example: roll in with the chosen roll-in policy to
every decision point, try every one-step deviation, complete each with
the roll-out policy, and turn the resulting end-state losses into one
cost-sensitive example per decision point (costs are losses minus their
minimum). The T examples are then fed to the online learner in decision
order, and the updated policy snapshot is appended to the history.
"""

from dataclasses import dataclass, field

import numpy as np

from . import core, rng
from .cslearn import CostSensitiveExample, CostSensitiveLearner
from .errors import BadConfig, NonFiniteCost, NoPolicies

ROLL_IN_CHOICES = ("reference", "learned")
ROLL_OUT_CHOICES = ("reference", "learned", "mixture")
DRAW_CHOICES = ("per_rollout", "per_state")


@dataclass
class RolloutPlan:
    """Strategy knobs for one training run."""

    roll_in: str = "learned"
    roll_out: str = "mixture"
    beta: float = 0.5
    draw_granularity: str = "per_rollout"
    seed: int = 0

    def __post_init__(self):
        if self.roll_in not in ROLL_IN_CHOICES:
            raise BadConfig(f"roll_in must be one of {ROLL_IN_CHOICES}")
        if self.roll_out not in ROLL_OUT_CHOICES:
            raise BadConfig(f"roll_out must be one of {ROLL_OUT_CHOICES}")
        if self.draw_granularity not in DRAW_CHOICES:
            raise BadConfig(f"draw_granularity must be one of {DRAW_CHOICES}")
        if not 0.0 <= self.beta <= 1.0:
            raise BadConfig(f"beta {self.beta} outside [0, 1]")


def extract_costs(rollout_losses):
    """Shift rollout losses so the best action has cost exactly 0."""
    losses = np.asarray(rollout_losses, dtype=np.float64)
    if losses.size == 0:
        raise NonFiniteCost("empty loss vector")
    if not np.all(np.isfinite(losses)):
        raise NonFiniteCost(f"losses {losses}")
    return losses - losses.min()


def draw_rollout_policy(plan, generator):
    """One Bernoulli(beta) draw: 'reference' or 'learned'."""
    return "reference" if generator.random() < plan.beta else "learned"


class _PerStateMixture(core.Policy):
    """Draws reference-vs-learned independently at every visited state."""

    def __init__(self, plan, reference, learned, generator):
        self.plan = plan
        self.reference = reference
        self.learned = learned
        self.generator = generator

    def choose(self, task, state):
        kind = draw_rollout_policy(self.plan, self.generator)
        pol = self.reference if kind == "reference" else self.learned
        return pol.choose(task, state)


class Trainer:
    """Mutable training state: learner, policy history and RNG streams."""

    def __init__(self, dimension, plan, eta0=0.5, record_examples=False,
                 record_history=True, tie_break="lowest"):
        self.plan = plan
        self.learner = CostSensitiveLearner(dimension, eta0,
                                            record_examples=record_examples)
        self.tie_break = tie_break
        self.record_history = record_history
        # history[0] is the untrained initial policy
        self.history = [self.learner.weights.copy()]
        self.examples_seen = 0
        self.mixture_rng = rng.substream(plan.seed, rng.MIXTURE)

    def current_policy(self):
        return self.learner.policy(tie_break=self.tie_break)

    def _rollout_policy(self, reference, learned):
        """Policy completing one deviation, per the plan's roll-out strategy."""
        if self.plan.roll_out == "reference":
            return reference
        if self.plan.roll_out == "learned":
            return learned
        if self.plan.draw_granularity == "per_state":
            return _PerStateMixture(self.plan, reference, learned, self.mixture_rng)
        kind = draw_rollout_policy(self.plan, self.mixture_rng)
        return reference if kind == "reference" else learned

    def process_example(self, task, reference=None):
        """Run one structured example through the loop; returns diagnostics."""
        if reference is None:
            reference = task.reference_policy()  # may raise MissingGold
        learned = self.current_policy()  # frozen for the whole instance
        roll_in = reference if self.plan.roll_in == "reference" else learned

        # one roll-in pass collecting the states at every decision point
        states = [task.start_state()]
        for _ in range(task.horizon - 1):
            s = states[-1]
            states.append(task.transition(s, roll_in.choose(task, s)))

        examples = []
        diag_actions, diag_costs = [], []
        for t, s_t in enumerate(states):
            feats = task.action_features(s_t)
            losses = []
            for a in range(task.action_count(s_t)):
                out_policy = self._rollout_policy(reference, learned)
                nxt = task.transition(s_t, a)
                end = core.execute(task, out_policy, nxt, task.horizon - t - 1)
                losses.append(core.end_loss(task, end))
            costs = extract_costs(losses)
            examples.append(CostSensitiveExample(feats, costs))
            diag_costs.append([float(c) for c in costs])
            diag_actions.append(int(np.argmin(losses)))

        for ex in examples:
            self.learner.update(ex)
        self.examples_seen += 1
        if self.record_history:
            self.history.append(self.learner.weights.copy())

        post_loss = float(np.mean([
            float(ex.costs[self.learner.predict(ex)]) for ex in examples
        ])) if examples else 0.0
        diagnostics = {
            "instance": self.examples_seen,
            "best_actions": diag_actions,
            "cost_vectors": diag_costs,
            "post_update_loss": post_loss,
        }
        return examples, diagnostics

    def averaged_policy(self, generator, include_initial=False):
        """Uniform sampler over the recorded policy snapshots."""
        pool = self.history if include_initial else self.history[1:]
        if not pool:
            raise NoPolicies("no trained policies to average over")
        return AveragedPolicy(pool, generator, tie_break=self.tie_break)


class AveragedPolicy:
    """Online-to-batch average: sample one historical policy per trajectory."""

    def __init__(self, snapshots, generator, tie_break="lowest"):
        if not snapshots:
            raise NoPolicies("empty snapshot pool")
        self.snapshots = snapshots
        self.generator = generator
        self.tie_break = tie_break

    def sample(self):
        i = int(self.generator.integers(len(self.snapshots)))
        return core.LinearPolicy(self.snapshots[i], tie_break=self.tie_break)
