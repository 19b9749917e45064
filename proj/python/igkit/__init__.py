"""Python bindings for the igkit institutional grammar pipeline."""

from ._igkit import (
    IgkitError,
    chi_square,
    chi_square_p_value,
    classify_deontic,
    cluster,
    embed,
    evaluate_split,
    group_spans,
    join_tokens,
    load_corpus,
    predict,
    run,
    segment_statements,
    tokenize,
    train,
)

__all__ = [
    "IgkitError",
    "chi_square",
    "chi_square_p_value",
    "classify_deontic",
    "cluster",
    "embed",
    "evaluate_split",
    "group_spans",
    "join_tokens",
    "load_corpus",
    "predict",
    "run",
    "segment_statements",
    "tokenize",
    "train",
]
