from ._pqn import (
    Error,
    HypothesisViolation,
    __version__,
    check,
    deform,
    evaluate,
    involutivity,
    known_models,
    parse_scalar,
    partial,
    poisson_bracket,
    trace_invariants,
)

__all__ = [
    "Error",
    "HypothesisViolation",
    "__version__",
    "check",
    "deform",
    "evaluate",
    "involutivity",
    "known_models",
    "parse_scalar",
    "partial",
    "poisson_bracket",
    "trace_invariants",
]
