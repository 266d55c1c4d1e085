"""IV bounds for the survivor-complier treatment effect under selection.

Thin python wrapper around the C++ core; see `_core` for the operations:
estimate, sensitivity, simulate, check, summary.
"""

from ._core import check, estimate, sensitivity, simulate, summary

__all__ = ["check", "estimate", "sensitivity", "simulate", "summary"]
