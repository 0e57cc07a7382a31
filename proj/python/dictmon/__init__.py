"""Shift-invariant dictionary learning for vibration condition monitoring."""

from ._core import (
    Atom,
    ConfigError,
    DataError,
    Dictionary,
    Error,
    FormatError,
    HistoryRecord,
    IoError,
    Monitor,
    NumericError,
    ParseError,
    atom_coherence,
    dictionary_distance,
    encode,
    init_pseudorandom,
    instance_budget,
    mad_scores,
    planted_atoms,
    preprocess,
    roc_auc,
    synth_segments,
    train,
)

__all__ = [
    "Atom",
    "ConfigError",
    "DataError",
    "Dictionary",
    "Error",
    "FormatError",
    "HistoryRecord",
    "IoError",
    "Monitor",
    "NumericError",
    "ParseError",
    "atom_coherence",
    "dictionary_distance",
    "encode",
    "init_pseudorandom",
    "instance_budget",
    "mad_scores",
    "planted_atoms",
    "preprocess",
    "roc_auc",
    "synth_segments",
    "train",
]
