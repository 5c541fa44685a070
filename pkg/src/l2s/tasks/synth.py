"""Seeded synthetic data: HMM sequences, projective trees, cost vectors."""

import numpy as np

from .. import rng
from .labeltree import leaf_path, split


def gen_sequences(count, seed, tag_count=5, vocab_per_tag=8, min_len=5,
                  max_len=8, emission_noise=0.1):
    """Sentences from a seeded HMM with peaked, learnable emissions.

    Returns a list of (tokens, tags). Each tag owns a vocabulary slice;
    with probability `emission_noise` a word is drawn from a random tag's
    slice instead.
    """
    g = rng.substream(seed, rng.DATA)
    trans = g.dirichlet([1.0] * tag_count, size=tag_count)
    init = g.dirichlet([1.0] * tag_count)
    out = []
    for _ in range(count):
        n = int(g.integers(min_len, max_len + 1))
        tags, tokens = [], []
        for t in range(n):
            probs = init if t == 0 else trans[tags[-1]]
            tag = int(g.choice(tag_count, p=probs))
            tags.append(tag)
            src = tag
            if g.random() < emission_noise:
                src = int(g.integers(tag_count))
            word = f"w{src:02d}_{int(g.integers(vocab_per_tag)):02d}"
            tokens.append(word)
        out.append((tokens, tags))
    return out


def _random_projective(lo, hi, g, heads, head_of_span):
    """Pick a span root attached to head_of_span; recurse on both sides."""
    if lo > hi:
        return
    r = int(g.integers(lo, hi + 1))
    heads[r - 1] = head_of_span
    _random_projective(lo, r - 1, g, heads, r)
    _random_projective(r + 1, hi, g, heads, r)


def gen_trees(count, seed, min_len=3, max_len=6, vocab=30):
    """Random projective dependency trees with weakly indicative tokens.

    Returns a list of (tokens, gold_heads); heads are 1-based with 0 the
    root. Token strings encode the head offset direction so a linear
    model has signal to learn from.
    """
    g = rng.substream(seed, rng.DATA)
    out = []
    for _ in range(count):
        n = int(g.integers(min_len, max_len + 1))
        heads = [-1] * n
        _random_projective(1, n, g, heads, 0)
        tokens = []
        for i in range(1, n + 1):
            h = heads[i - 1]
            direction = "r" if h == 0 else ("l" if h < i else "g")
            word = f"t{direction}{int(g.integers(vocab)):02d}"
            tokens.append(word)
        out.append((tokens, heads))
    return out


def sibling_label(k, label):
    """The label sharing `label`'s deepest tree split."""
    lo, hi = 0, k - 1
    while hi - lo + 1 > 2:
        left, right = split(lo, hi)
        lo, hi = left if label <= left[1] else right
    return lo if label == hi else hi


def gen_multiclass(count, seed, label_count=8, noise_features=3,
                   off_lo=0.5, off_hi=1.0):
    """Cost-sensitive examples with all costs in [0, 1].

    The gold label costs 0; every other label draws a uniform cost in
    [off_lo, off_hi]. One feature indicates the gold label, padded with a
    few noise features. Returns a list of (feature_pairs, costs).
    """
    g = rng.substream(seed, rng.DATA)
    out = []
    for _ in range(count):
        gold = int(g.integers(label_count))
        costs = g.uniform(off_lo, off_hi, size=label_count)
        costs[gold] = 0.0
        pairs = [(gold, 1.0)]
        for _ in range(noise_features):
            pairs.append((label_count + int(g.integers(20)), 1.0))
        pairs = sorted(set(pairs))
        out.append((pairs, costs))
    return out
