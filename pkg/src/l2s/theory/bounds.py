"""Machine checks of the exact identities and the regret bound.

Everything here is computed by enumeration over an ExactModel: state
distributions, Q values, the telescoping difference identity, and the
convex-combination regret bound with its epsilon term. Mixture rollout
Q values are combined analytically (beta-weighted), never sampled.
"""

from dataclasses import dataclass

from .. import rng as rngmod
from ..trainer import Trainer
from ..errors import TraceIncomplete
from . import exact
from .exact import (
    ExactModel,
    ExactModelTask,
    exact_J,
    exact_Q,
    exact_Q_policy,
    state_distribution,
)


def expected_Q_under(model, dist, rollout_policy, acting_policy):
    """E_{s ~ dist}[Q^rollout(s, acting)]."""
    return sum(p * exact_Q_policy(model, rollout_policy, s, acting_policy)
               for s, p in dist.items())


def expected_min_Q(model, dist, rollout_policy):
    """E_{s ~ dist}[min_a Q^rollout(s, a)]."""
    return sum(p * exact.min_slot_Q(model, rollout_policy, s)
               for s, p in dist.items())


def class_min_expected_Q(model, weighted_dists):
    """min over the feature-consistent policy class of the summed expectation.

    weighted_dists: list of (dist, rollout_policy) pairs; minimizes
    sum_i E_{s ~ dist_i}[Q^{rollout_i}(s, pi)] over policies pi. The
    objective is additive across signatures, so the minimum is taken
    per signature without enumerating the full class.
    """
    # per signature: label -> accumulated weighted Q
    per_sig = {}
    for dist, rollout in weighted_dists:
        for s, p in dist.items():
            sig = model.signature(s)
            bucket = per_sig.setdefault(sig, {})
            for label in set(sig):
                slots = [i for i, l in enumerate(sig) if l == label]
                q = sum(exact_Q(model, rollout, s, i) for i in slots) / len(slots)
                bucket[label] = bucket.get(label, 0.0) + p * q
    return sum(min(bucket.values()) for bucket in per_sig.values())


def check_difference_identity(model, policy1, policy2):
    """The difference J(p1) - J(p2) as both telescoping expectations."""
    T = model.horizon
    lhs = exact_J(model, policy1) - exact_J(model, policy2)

    def telescoped(rollin, rollout):
        # T * E_{t ~ U, s ~ d_t^rollin}[...] == sum over the T decision depths
        total = 0.0
        for t in range(T):
            dist = state_distribution(model, rollin, t)
            total += (expected_Q_under(model, dist, rollout, policy1)
                      - expected_Q_under(model, dist, rollout, policy2))
        return total

    rhs1 = telescoped(policy1, policy2)
    rhs2 = telescoped(policy2, policy1)
    return lhs, rhs1, rhs2


@dataclass
class BoundReport:
    lhs_ref_term: float
    lhs_dev_term: float
    eps_bar: float
    rhs: float
    satisfied: bool
    tolerance: float
    # informational: the two epsilon computations and their split
    eps_cost_term: float = 0.0
    eps_min_term: float = 0.0

    @property
    def lhs(self):
        return self.lhs_ref_term + self.lhs_dev_term


def check_regret_bound(model, ref, trace, beta, tol=1e-9):
    """Verify the convex-combination regret bound on a finished run.

    `trace` holds the learned policy after each round (exact-evaluable).
    The averaged policy couples its draw between roll-in and roll-out, so
    every mixture expectation decomposes into per-round terms.
    """
    if not trace:
        raise TraceIncomplete("empty training trace")
    N = len(trace)
    T = model.horizon
    J_ref = exact_J(model, ref)
    J_bar = sum(exact_J(model, p) for p in trace) / N

    dists = [[state_distribution(model, p, t) for t in range(T)] for p in trace]

    # deviation term: sum_t (J_bar - min_pi (1/N) sum_i E_{d_t^i}[Q^i(s, pi)])
    dev = 0.0
    for t in range(T):
        weighted = [(
            {s: q / N for s, q in dists[i][t].items()}, trace[i]
        ) for i in range(N)]
        dev += J_bar - class_min_expected_Q(model, weighted)

    lhs_ref = beta * (J_bar - J_ref)
    lhs_dev = (1.0 - beta) * dev

    # epsilon: rollout Q is the analytic beta-combination
    cost_term = 0.0
    min_term = 0.0
    for i, pol in enumerate(trace):
        for t in range(T):
            dist = dists[i][t]
            q_mix = (beta * expected_Q_under(model, dist, ref, pol)
                     + (1 - beta) * expected_Q_under(model, dist, pol, pol))
            cost_term += q_mix
            min_term += (beta * expected_min_Q(model, dist, ref)
                         + (1 - beta) * expected_min_Q(model, dist, pol))
    eps_direct = (cost_term - min_term) / (N * T)
    rhs = T * eps_direct
    return BoundReport(
        lhs_ref_term=lhs_ref,
        lhs_dev_term=lhs_dev,
        eps_bar=eps_direct,
        rhs=rhs,
        satisfied=lhs_ref + lhs_dev <= rhs + tol,
        tolerance=tol,
        eps_cost_term=cost_term / (N * T),
        eps_min_term=min_term / (N * T),
    )


def run_training(model, plan, rounds, eta0=0.5, tie_break="lowest"):
    """Train on a single exact model for `rounds` instances.

    Returns (trainer, task, trace, example_stream) where trace holds one
    deterministic SlotPolicy per round and example_stream every emitted
    cost-sensitive example.
    """
    task = ExactModelTask(model)
    trainer = Trainer(task.dimension, plan, eta0=eta0,
                      record_examples=True, tie_break=tie_break)
    ref = task.reference_policy()
    trace = []
    stream = []
    for _ in range(rounds):
        examples, _ = trainer.process_example(task, reference=ref)
        stream.extend(examples)
        trace.append(task.learned_slot_policy(trainer.learner.weights,
                                              tie_break=tie_break))
    return trainer, task, trace, stream


def random_model(generator, max_depth=5, max_branch=3, states_per_depth=3,
                 label_alphabet=4, max_loss=10.0):
    """A seeded layered model with occasional feature sharing."""
    depth = int(generator.integers(2, max_depth + 1))
    layers = [["s0_0"]]
    for d in range(1, depth + 1):
        width = int(generator.integers(1, states_per_depth + 1))
        layers.append([f"s{d}_{j}" for j in range(width)])
    depths, edges, losses, ref = {}, {}, {}, {}
    for d, layer in enumerate(layers):
        for s in layer:
            depths[s] = d
    for d in range(depth):
        labels_pool = [f"L{d}_{j}" for j in range(label_alphabet)]
        for s in layers[d]:
            k = int(generator.integers(1, max_branch + 1))
            chosen = list(generator.choice(label_alphabet, size=k, replace=False))
            outs = []
            for j in sorted(chosen):
                nxt = layers[d + 1][int(generator.integers(len(layers[d + 1])))]
                outs.append((labels_pool[j], nxt))
            edges[s] = outs
            ref[s] = outs[int(generator.integers(len(outs)))][0]
    for s in layers[depth]:
        losses[s] = float(generator.uniform(0.0, max_loss))
    model = ExactModel(depths, edges, losses, "s0_0", ref).validate()
    return model


def random_models(seed, count, **kwargs):
    g = rngmod.substream(seed, rngmod.MODELGEN)
    return [random_model(g, **kwargs) for _ in range(count)]
