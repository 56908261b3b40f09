"""Exception types shared by all gqcon modules."""


class GqconError(Exception):
    """Base class for all errors raised by this package."""


class NonFinite(GqconError):
    """Input contains NaN or infinite entries."""


class NonHermitianInput(GqconError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class NegativeEigenvalue(GqconError):
    """Matrix required to be positive semidefinite has a negative eigenvalue."""


class BadSubsystem(GqconError):
    """Subsystem label set is empty, duplicated, or out of range."""


class BadCut(GqconError):
    """Bipartition does not split the register into two nonempty parts."""


class SizeOutOfRange(GqconError):
    """Register size outside the supported range."""


class BadRank(GqconError):
    """Requested or detected rank is invalid for the operation."""


class BadParameter(GqconError):
    """Scalar parameter outside its admissible range."""


class BadQ(GqconError):
    """Measure parameter q must be a finite real number greater than 1."""


class BadDimension(GqconError):
    """Operation requires a register of a specific size (e.g. two qubits)."""


class RegimeError(GqconError):
    """Parameter q lies outside the regime where the formula is valid."""


class BadDomain(GqconError):
    """Function argument outside its domain."""


class NotIsometry(GqconError):
    """Matrix columns are not orthonormal within tolerance."""


class BadFocus(GqconError):
    """Focus qubit label is not a valid register label."""


class BadAlpha(GqconError):
    """Monogamy power alpha must be at least 2."""


class ParseError(GqconError):
    """State file could not be parsed into a pure state or density matrix."""
