"""Exception hierarchy for slocc4."""


class SloccError(Exception):
    """Base class for every error raised by the package."""


class ZeroState(SloccError, ValueError):
    """The input state (or matrix) has zero norm."""


class BadPartition(SloccError, ValueError):
    pass


class BadPermutation(SloccError, ValueError):
    pass


class ZeroMatrix(SloccError, ValueError):
    pass


class SingularPivot(SloccError, ValueError):
    """The pivot block handed to a spectrum test is not invertible."""


class UnresolvedPencil(SloccError, RuntimeError):
    """Pencil analysis could not reach a consistent structure.

    Raised when generic samples along the pencil disagree, when the number of
    special points exceeds what a genuine four-qubit state can carry, or when
    the special-point pattern matches none of the known structures.
    """


class NotGenuine(SloccError, ValueError):
    pass


class DegenerateParams(SloccError, ValueError):
    pass


class BadParams(SloccError, ValueError):
    pass


class StateFileError(SloccError, ValueError):
    """Malformed JSON state file."""
