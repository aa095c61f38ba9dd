"""Kernel change-point detection with analytic and permutation p-values."""

from ._core import (
    Gram,
    GkcpError,
    build_gram,
    fgkcp1,
    fgkcp2,
    generate,
    median_heuristic,
    permutation_test,
    scan,
    segment,
)

__all__ = [
    "Gram",
    "GkcpError",
    "build_gram",
    "fgkcp1",
    "fgkcp2",
    "generate",
    "median_heuristic",
    "permutation_test",
    "scan",
    "segment",
]
