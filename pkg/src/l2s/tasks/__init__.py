from .sequence import SequenceTask, SequenceReference, accuracy
from .labeltree import LabelTreeTask, TreeReference, leaf_path, split
from .parse import ParseTask, ParseReference, uas
from .io import (
    read_multiclass,
    read_sentences,
    write_multiclass,
    write_sentences,
)
from .synth import gen_multiclass, gen_sequences, gen_trees, sibling_label
from . import io, synth

__all__ = [
    "SequenceTask", "SequenceReference", "accuracy",
    "LabelTreeTask", "TreeReference", "leaf_path", "split",
    "ParseTask", "ParseReference", "uas",
    "read_multiclass", "read_sentences",
    "write_multiclass", "write_sentences",
    "gen_multiclass", "gen_sequences", "gen_trees", "sibling_label",
    "io", "synth",
]
