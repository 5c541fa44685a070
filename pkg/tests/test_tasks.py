"""Concrete search tasks: tagging, label trees, parsing, data I/O."""

import itertools

import numpy as np
import pytest

from l2s import core
from l2s.errors import DataFormatError, MissingGold
from l2s.tasks import (
    LabelTreeTask,
    ParseTask,
    SequenceTask,
    accuracy,
    gen_multiclass,
    gen_sequences,
    gen_trees,
    leaf_path,
    read_multiclass,
    read_sentences,
    split,
    uas,
    write_multiclass,
    write_sentences,
)


# -- enumeration oracles (independent of the reference implementations) --

def all_end_states(task, state):
    """Every end state reachable from `state`, by brute-force expansion."""
    if state.depth == task.horizon:
        return [state]
    out = []
    for a in range(task.action_count(state)):
        out.extend(all_end_states(task, task.transition(state, a)))
    return out


def min_reachable_loss(task, state):
    return min(task.terminal_loss(e) for e in all_end_states(task, state))


def all_reachable_states(task):
    frontier = [task.start_state()]
    seen = []
    while frontier:
        s = frontier.pop()
        seen.append(s)
        for a in range(task.action_count(s)):
            frontier.append(task.transition(s, a))
    return seen


def assert_reference_is_optimal(task, seed=0):
    """From every reachable state, following the optimal reference attains
    the minimum reachable loss (checked by exhaustive enumeration)."""
    ref = task.reference_policy("optimal", seed=seed)
    for s in all_reachable_states(task):
        if s.depth == task.horizon:
            continue
        end = core.execute(task, ref, s, task.horizon - s.depth)
        assert task.terminal_loss(end) == pytest.approx(
            min_reachable_loss(task, s)), f"suboptimal at {s}"


# -- sequence tagging --

def test_sequence_shapes_and_loss():
    task = SequenceTask(["aa", "bb", "cc"], [0, 1, 2], tag_count=3)
    assert task.horizon == 3
    s = task.start_state()
    assert task.action_count(s) == 3
    feats = task.action_features(s)
    assert len(feats) == 3
    end = core.StateRef(0, 3, (0, 1, 0))
    assert task.terminal_loss(end) == 1.0
    assert 0.0 <= task.terminal_loss(end) <= task.horizon


def test_sequence_normalized_loss():
    task = SequenceTask(["aa", "bb"], [0, 0], tag_count=2, normalize_loss=True)
    end = core.StateRef(0, 2, (1, 1))
    assert task.terminal_loss(end) == 1.0
    end = core.StateRef(0, 2, (1, 0))
    assert task.terminal_loss(end) == 0.5


def test_sequence_optimal_reference_returns_gold():
    task = SequenceTask(["aa", "bb", "cc"], [2, 0, 1], tag_count=3)
    ref = task.reference_policy("optimal")
    s = task.start_state()
    tags = []
    for _ in range(3):
        a = ref.choose(task, s)
        tags.append(a)
        s = task.transition(s, a)
    assert tags == [2, 0, 1]
    assert task.terminal_loss(s) == 0.0


def test_sequence_optimal_reference_minimizes_everywhere():
    for tokens, tags in gen_sequences(4, seed=5, min_len=3, max_len=5,
                                      tag_count=2):
        assert_reference_is_optimal(SequenceTask(tokens, tags, 2))


def test_sequence_bad_reference_is_seeded():
    task = SequenceTask(["aa", "bb", "cc"], [0, 0, 0], tag_count=4)
    choices1 = [task.reference_policy("bad", seed=9).choose(task, task.start_state())
                for _ in range(5)]
    choices2 = [task.reference_policy("bad", seed=9).choose(task, task.start_state())
                for _ in range(5)]
    assert choices1 == choices2


def test_sequence_missing_gold():
    task = SequenceTask(["aa"], None, tag_count=2)
    with pytest.raises(MissingGold):
        task.terminal_loss(core.StateRef(0, 1, (0,)))
    with pytest.raises(MissingGold):
        task.reference_policy()


def test_hamming_cost_vectors_ignore_rollout_policy():
    # completing a one-step deviation with any fixed policy adds the same
    # suffix error count to every action, so extracted cost vectors match
    from l2s.trainer import extract_costs

    task = SequenceTask(["aa", "bb", "cc", "dd"], [0, 1, 0, 1], tag_count=2)

    class FixedTag(core.Policy):
        def __init__(self, tag):
            self.tag = tag

        def choose(self, t, s):
            return self.tag

    rollouts = [FixedTag(0), FixedTag(1), task.reference_policy("optimal")]
    for s in all_reachable_states(task):
        if s.depth == task.horizon:
            continue
        vectors = []
        for pol in rollouts:
            losses = []
            for a in range(task.action_count(s)):
                end = core.execute(task, pol, task.transition(s, a),
                                   task.horizon - s.depth - 1)
                losses.append(task.terminal_loss(end))
            vectors.append(list(extract_costs(losses)))
        assert vectors[0] == vectors[1] == vectors[2]


def test_accuracy_metric():
    task = SequenceTask(["aa", "bb"], [1, 1], tag_count=2)
    assert accuracy(task, [1, 1]) == 1.0
    assert accuracy(task, [0, 0]) == 0.0
    assert accuracy(task, [1, 0]) == 0.5


# -- label tree --

def test_split_left_heavy():
    assert split(0, 3) == ((0, 1), (2, 3))
    assert split(0, 4) == ((0, 2), (3, 4))
    assert split(0, 1) == ((0, 0), (1, 1))


def test_leaf_path_examples():
    assert leaf_path(4, 0) == [0, 0]
    assert leaf_path(4, 3) == [1, 1]
    # k = 5: label 4 sits alone on the right: right, right, then padding
    assert leaf_path(5, 4) == [1, 1, 0]


def test_tree_walk_reaches_declared_leaf():
    for k in (2, 3, 4, 5, 8, 11):
        costs = np.zeros(k)
        for label in range(k):
            task = LabelTreeTask([(0, 1.0)], costs, k)
            s = task.start_state()
            for branch in leaf_path(k, label):
                s = task.transition(s, branch if task.action_count(s) == 2
                                    else 0)
            assert s.payload == (label, label)
            assert s.depth == task.horizon


def test_tree_reference_descends_to_min_cost():
    task = LabelTreeTask([(0, 1.0)], [0.3, 0.0, 0.9, 0.9], 4)
    ref = task.reference_policy("optimal")
    s = task.start_state()
    assert ref.choose(task, s) == 0  # label 1 lives in the left half
    s = task.transition(s, 0)
    assert ref.choose(task, s) == 1  # (0,1): right child holds label 1
    assert task.terminal_loss(task.transition(s, 1)) == 0.0


def test_tree_reference_ties_left():
    task = LabelTreeTask([(0, 1.0)], [0.5, 0.5, 0.5, 0.5], 4)
    assert task.reference_policy("optimal").choose(task, task.start_state()) == 0


def test_tree_optimal_reference_minimizes_everywhere():
    g = np.random.default_rng(2)
    for k in (2, 3, 5, 8):
        costs = g.uniform(size=k)
        assert_reference_is_optimal(LabelTreeTask([(0, 1.0)], costs, k))


def test_tree_loss_bounds():
    costs = [0.2, 0.9, 0.4, 0.6]
    task = LabelTreeTask([(0, 1.0)], costs, 4)
    for e in all_end_states(task, task.start_state()):
        assert min(costs) <= task.terminal_loss(e) <= max(costs)


# -- parsing --

def test_parse_trajectory_length_and_legality():
    for tokens, heads in gen_trees(10, seed=4):
        task = ParseTask(tokens, heads)
        n = len(tokens)
        assert task.horizon == 2 * n - 1
        for s in all_reachable_states(task):
            if s.depth < task.horizon:
                assert task.action_count(s) >= 1
            stack, buf, hd = s.payload
            assert len([h for h in hd if h != -1]) + len(stack) + \
                (n - buf + 1) == n


def test_parse_two_token_oracle():
    # gold: token 1's head is token 2, token 2 is the root
    task = ParseTask(["x", "y"], [2, 0])
    ref = task.reference_policy("optimal")
    traj = core.run_trajectory(task, ref)
    assert traj.end_loss == 0.0
    assert task.decode(traj.end_state) == [2, 0]


def test_parse_three_token_chain_reaches_zero():
    # chain 1 <- 2 <- 3, root 3
    task = ParseTask(["x", "y", "z"], [2, 3, 0])
    ref = task.reference_policy("optimal")
    traj = core.run_trajectory(task, ref)
    assert traj.end_loss == 0.0


def test_parse_optimal_reference_minimizes_everywhere():
    # every projective tree over 2..4 tokens, via the seeded generator
    for tokens, heads in gen_trees(12, seed=8, min_len=2, max_len=4):
        assert_reference_is_optimal(ParseTask(tokens, heads))


def test_parse_loss_is_one_minus_uas():
    task = ParseTask(["x", "y", "z"], [2, 3, 0])
    for e in all_end_states(task, task.start_state()):
        pred = task.decode(e)
        assert task.terminal_loss(e) == pytest.approx(1.0 - uas(task, pred))
        assert 0.0 <= task.terminal_loss(e) <= 1.0
        # exactly one root and every token has a head
        assert pred.count(0) == 1
        assert all(h != -1 for h in pred)


def test_parse_suboptimal_greedy_when_obvious():
    task = ParseTask(["x", "y"], [2, 0])
    sub = task.reference_policy("suboptimal", seed=0)
    s = task.start_state()
    # only one legal action (shift) => zero-cost and unique => taken
    assert sub.choose(task, s) == 0


def test_parse_missing_gold():
    task = ParseTask(["x", "y"], None)
    with pytest.raises(MissingGold):
        task.reference_policy()


# -- synthetic data --

def test_generators_are_seeded():
    assert gen_sequences(5, seed=1) == gen_sequences(5, seed=1)
    assert gen_trees(5, seed=1) == gen_trees(5, seed=1)
    a = gen_multiclass(5, seed=1)
    b = gen_multiclass(5, seed=1)
    assert all(pa == pb and np.array_equal(ca, cb)
               for (pa, ca), (pb, cb) in zip(a, b))


def test_multiclass_costs_in_unit_interval_with_zero_gold():
    for pairs, costs in gen_multiclass(50, seed=2):
        assert costs.min() == 0.0
        assert costs.max() <= 1.0


def test_trees_are_projective_single_root():
    for tokens, heads in gen_trees(20, seed=3):
        assert heads.count(0) == 1
        n = len(tokens)
        for i, h in enumerate(heads, start=1):
            assert 0 <= h <= n and h != i
        # projectivity: arcs (min(i,h), max(i,h)) never cross
        arcs = [(min(i, h), max(i, h)) for i, h in enumerate(heads, 1) if h]
        for (a, b), (c, d) in itertools.combinations(arcs, 2):
            assert not (a < c < b < d or c < a < d < b)


# -- on-disk formats --

def test_sentence_round_trip(tmp_path):
    data = [(["aa", "bb"], [0, 1], [2, 0]), (["cc"], [1], [0])]
    p = tmp_path / "sents.tsv"
    write_sentences(p, data)
    assert read_sentences(p) == data


def test_sentence_partial_columns(tmp_path):
    p = tmp_path / "s.tsv"
    write_sentences(p, [(["aa", "bb"], [0, 1], None)])
    assert read_sentences(p) == [(["aa", "bb"], [0, 1], None)]


def test_sentence_format_errors(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("tok\t0\n")
    with pytest.raises(DataFormatError) as e:
        read_sentences(p)
    assert e.value.line == 1
    p.write_text("tok\tnotanint\t0\n\n")
    with pytest.raises(DataFormatError):
        read_sentences(p)


def test_multiclass_round_trip(tmp_path):
    data = [([(0, 1.0), (3, 2.5)], [0.0, 0.5]), ([(1, 1.0)], [1.0, 0.25])]
    p = tmp_path / "mc.csv"
    write_multiclass(p, data)
    back = read_multiclass(p)
    assert back == data


def test_multiclass_format_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0:1.0,0.5,0.5\n1:1.0,0.5\n")
    with pytest.raises(DataFormatError) as e:
        read_multiclass(p)
    assert e.value.line == 2
    p.write_text("nocolon,1.0\n")
    with pytest.raises(DataFormatError):
        read_multiclass(p)
