"""Dependency parsing as sequence labeling.

Trees are given as head lists: ``heads[i]`` is the head of token ``i + 1``
and 0 is the dummy root.
"""

from ._deplabel import (
    ENCODINGS,
    DataError,
    Model,
    attachment_scores,
    decode,
    encode,
    is_projective,
    oracle,
    run_cli,
    train,
    validate,
)

__all__ = [
    "ENCODINGS",
    "DataError",
    "Model",
    "attachment_scores",
    "decode",
    "encode",
    "is_projective",
    "oracle",
    "run_cli",
    "train",
    "validate",
]
