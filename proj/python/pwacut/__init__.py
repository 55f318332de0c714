"""Piecewise-affine approximation by iterative cutting hyperplanes."""

from ._core import (
    EvalError,
    Model,
    ParseError,
    PwacutError,
    Result,
    __version__,
    approximate,
    approximate_bench,
    approximate_expr,
    benchmarks,
    chambers,
    eval_expr,
    parse_expr,
    run_cli,
    validate,
)

__all__ = [
    "EvalError",
    "Model",
    "ParseError",
    "PwacutError",
    "Result",
    "approximate",
    "approximate_bench",
    "approximate_expr",
    "benchmarks",
    "chambers",
    "eval_expr",
    "parse_expr",
    "run_cli",
    "validate",
]
