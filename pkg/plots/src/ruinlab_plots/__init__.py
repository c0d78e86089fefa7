"""Static convergence and ratio figures from ruinlab-v1 result files.

This package only reads the versioned CSV files; it never calls the
estimators, so the simulation side stays verifiable on its own.
"""

from .reader import EmptyInput, SchemaMismatch, read_csv

__all__ = ["EmptyInput", "SchemaMismatch", "read_csv"]
__version__ = "0.1.0"
