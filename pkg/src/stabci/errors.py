"""Exception hierarchy shared across the toolkit."""


class StabciError(Exception):
    """Base class for all toolkit errors."""


class PauliParseError(StabciError, ValueError):
    """Malformed Pauli-string text (bad token, bad index, duplicate qubit)."""


class DimensionError(StabciError, ValueError):
    """Operands act on different qubit counts."""


class NotHermitianError(StabciError, ValueError):
    """A Hermitian Pauli operator was required."""


class ExcitationNotUnbiasedError(StabciError, ValueError):
    """The excitation operator has nonzero expectation on the current state,
    so the equal-weight superposition would not be a stabilizer state."""


class ResourceLimitError(StabciError, RuntimeError):
    """Requested computation exceeds a configured size cap."""


class SchemaError(StabciError, ValueError):
    """An input file does not validate against its documented schema."""


class WordOperatorError(StabciError, RuntimeError):
    """No usable word operator found below the configured weight cap."""
