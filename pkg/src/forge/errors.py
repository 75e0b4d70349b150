"""Shared exception base for the package.

Every domain error raised by this package derives from :class:`ForgeError`,
so callers (and the CLI) can distinguish domain failures from bugs.
"""


class ForgeError(Exception):
    """Base class for all domain errors raised by this package."""
