"""Exception types raised by the decontamination routines."""


class DecontamError(Exception):
    """Base class for every error raised by this package."""


class InvalidProportion(DecontamError, ValueError):
    pass


class LengthMismatch(DecontamError, ValueError):
    pass


class EqualInputs(DecontamError, ValueError):
    """Residue requested for two identical distributions (kappa would be 1)."""


class NonSquare(DecontamError, ValueError):
    pass


class PreconditionB1(DecontamError):
    """Mixing matrix is singular or its inverse violates the sign pattern."""


class RankDeficient(DecontamError):
    pass


class LoopCapExceeded(DecontamError):
    """A search loop that terminates in theory hit its iteration cap."""


class DuplicateColumns(DecontamError, ValueError):
    """Partial label matrix has two identical columns; classes are not identifiable."""


class ConditionDViolated(DecontamError, ValueError):
    """Some contaminated source carries a single class only."""


class KappaOne(DecontamError):
    """Estimated kappa is (numerically) one, so the residue is undefined."""


class EmptyCandidateFamily(DecontamError, ValueError):
    pass


class ConfigError(DecontamError, ValueError):
    pass
