"""Exception types shared across the package.

The CLI maps these onto exit codes: input problems exit 1, numerical
failures exit 2.
"""


class InputError(ValueError):
    """A user-supplied file, flag, or argument is invalid."""


class GraphFormatError(InputError):
    """An edge-list, labels, or costs file failed to parse."""


class NumericalError(RuntimeError):
    """A linear-algebra step failed (singular or near-singular matrix)."""
