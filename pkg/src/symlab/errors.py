"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (wrong shapes,
incompatible representations, malformed configs) and numerical breakdowns
(orthonormalization that cannot be repaired, grids that fail to close,
empty voxel sets where a body is required).  The CLI maps them to distinct
exit codes.
"""


class SymlabError(Exception):
    """Base class for all package errors."""


class InputError(SymlabError):
    """Invalid argument, config, or representation mismatch."""


class NumericalError(SymlabError):
    """A computation failed for numerical reasons (ill-conditioning,
    non-terminating closure, degenerate geometry)."""
