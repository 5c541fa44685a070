"""Epsilon-greedy structured contextual bandit.

Each round either explores (probability epsilon): roll in with the
latest explored policy to a uniformly random depth, take a uniformly
random action there, complete the trajectory with the mixture roll-out,
observe a single loss in [0, 1] and update on the importance-weighted
one-hot cost vector K * loss * 1[a = a_t]; or exploits: follow a policy
drawn uniformly from the explored pool and report its prediction.
"""

from dataclasses import dataclass

import numpy as np

from . import core, rng
from .cslearn import CostSensitiveExample, CostSensitiveLearner
from .errors import LossOutOfRange
from .trainer import RolloutPlan, draw_rollout_policy


@dataclass
class BanditOutcome:
    mode: str  # "explored" | "exploited"
    prediction: object
    observed_loss: float
    exploration_record: dict = None


class BanditState:
    """Mutable bandit session: learner, explored-policy pool, RNG streams."""

    def __init__(self, dimension, epsilon=0.1, beta=0.5, seed=0, eta0=0.5,
                 record_examples=False):
        self.epsilon = epsilon
        self.beta = beta
        self.learner = CostSensitiveLearner(dimension, eta0,
                                            record_examples=record_examples)
        self.explored_policies = [self.learner.weights.copy()]
        self.n_explore = 0
        self.explore_rng = rng.substream(seed, rng.EXPLORATION)
        self.mixture_rng = rng.substream(seed, rng.MIXTURE)
        self.average_rng = rng.substream(seed, rng.AVERAGING)
        self._plan = RolloutPlan(roll_in="learned", roll_out="mixture",
                                 beta=beta, seed=seed)

    def latest_policy(self):
        return core.LinearPolicy(self.explored_policies[-1])

    def pool_policy(self):
        i = int(self.average_rng.integers(len(self.explored_policies)))
        return core.LinearPolicy(self.explored_policies[i])


def importance_weighted_costs(k, taken, loss):
    """K * loss on the explored action, zero elsewhere."""
    c = np.zeros(k)
    c[taken] = k * loss
    return c


def bandit_step(state, task, loss_oracle, reference):
    """One bandit round. `loss_oracle` maps an end state to a loss in [0, 1].

    The reference policy must not peek at gold labels; the oracle is the
    only feedback channel.
    """
    if state.explore_rng.random() < state.epsilon:
        return _explore(state, task, loss_oracle, reference)
    policy = state.pool_policy()
    traj_end = core.execute(task, policy, task.start_state(), task.horizon)
    loss = _checked_loss(loss_oracle, traj_end)
    return state, BanditOutcome(mode="exploited",
                                prediction=task.decode(traj_end),
                                observed_loss=loss)


def _checked_loss(loss_oracle, end_state):
    loss = float(loss_oracle(end_state))
    if not 0.0 <= loss <= 1.0:
        raise LossOutOfRange(f"oracle returned {loss}")
    return loss


def _explore(state, task, loss_oracle, reference):
    latest = state.latest_policy()
    t = int(state.explore_rng.integers(task.horizon))
    s_t = core.execute(task, latest, task.start_state(), t)
    k = task.action_count(s_t)
    a_t = int(state.explore_rng.integers(k))

    kind = draw_rollout_policy(state._plan, state.mixture_rng)
    out_policy = reference if kind == "reference" else latest
    nxt = task.transition(s_t, a_t)
    end = core.execute(task, out_policy, nxt, task.horizon - t - 1)
    loss = _checked_loss(loss_oracle, end)

    costs = importance_weighted_costs(k, a_t, loss)
    example = CostSensitiveExample(task.action_features(s_t), costs, raw=True)
    state.learner.update(example)
    state.explored_policies.append(state.learner.weights.copy())
    state.n_explore += 1
    record = {"t": t, "action": a_t, "k": k, "loss": loss,
              "rollout": kind, "costs": costs.tolist()}
    return state, BanditOutcome(mode="explored",
                                prediction=task.decode(end),
                                observed_loss=loss,
                                exploration_record=record)


def epsilon_schedule(k, horizon, n_rounds, policy_class_size):
    """The theoretical exploration rate (KT)^{2/3} (log(N|Pi|)/N)^{1/3}."""
    return ((k * horizon) ** (2.0 / 3.0)
            * (np.log(n_rounds * policy_class_size) / n_rounds) ** (1.0 / 3.0))


def unbiasedness_probe(model, latest_weights, action, trials, beta=0.5,
                       seed=0, tie_break="lowest"):
    """Monte Carlo mean of the importance-weighted cost of `action` versus
    the enumerated expectation over random depth and rollout mixture.

    The latest policy is frozen (no updates) so repeated exploration
    rounds are identically distributed.
    """
    from .theory import exact as ex

    task = ex.ExactModelTask(model)
    ref_exact = ex.reference_policy(model)
    latest_exact = task.learned_slot_policy(latest_weights, tie_break=tie_break)
    T = model.horizon

    # exact side: mean over depths of E_{s ~ d_t^latest}[Q^mix(s, action)]
    exact_value = 0.0
    for t in range(T):
        dist = ex.state_distribution(model, latest_exact, t)
        for s, p in dist.items():
            edges = model.edges[s]
            if action >= len(edges):
                continue  # action not live here contributes zero
            q = (beta * ex.exact_Q(model, ref_exact, s, action)
                 + (1 - beta) * ex.exact_Q(model, latest_exact, s, action))
            exact_value += p * q / T
    # simulation side
    latest = core.LinearPolicy(latest_weights, tie_break=tie_break)
    g = rng.substream(seed, rng.EXPLORATION)
    gm = rng.substream(seed, rng.MIXTURE)
    plan = RolloutPlan(roll_in="learned", roll_out="mixture", beta=beta,
                       seed=seed)
    values = np.empty(trials)
    for i in range(trials):
        t = int(g.integers(T))
        s_t = core.execute(task, latest, task.start_state(), t)
        k = task.action_count(s_t)
        a_t = int(g.integers(k))
        kind = draw_rollout_policy(plan, gm)
        out_policy = ref_exact if kind == "reference" else latest
        end = core.execute(task, out_policy, task.transition(s_t, a_t),
                           T - t - 1)
        loss = core.end_loss(task, end)
        values[i] = k * loss if a_t == action else 0.0
    return float(values.mean()), exact_value, float(values.std(ddof=1))
