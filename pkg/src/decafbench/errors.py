"""Exception hierarchy shared across the pipeline.

The CLI maps these onto exit codes: input/validation problems -> 2,
degenerate manifolds -> 3, I/O failures -> 4.
"""

from __future__ import annotations


class DecafBenchError(Exception):
    """Base class for all pipeline errors."""


class InputError(DecafBenchError):
    """Invalid configuration, arguments, or file contents."""


class ParseError(InputError):
    """A dataset annotation file could not be parsed."""


class DegenerateManifoldError(DecafBenchError):
    """A class manifold has too few samples or a zero centroid."""

    def __init__(self, message: str, class_key=None):
        super().__init__(message)
        self.class_key = class_key
