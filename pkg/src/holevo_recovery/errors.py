"""Exception hierarchy shared by all modules."""


class RecoveryError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(RecoveryError, ValueError):
    pass


class ConvergenceFailure(RecoveryError, ArithmeticError):
    pass


class DomainError(RecoveryError, ValueError):
    """A matrix function was evaluated outside its domain."""


class ShapeMismatch(RecoveryError, ValueError):
    pass


class LabelMismatch(RecoveryError, ValueError):
    pass


class BadRank(RecoveryError, ValueError):
    pass


class NotPSD(RecoveryError, ValueError):
    pass


class NotPositiveDefinite(RecoveryError, ValueError):
    pass


class InvalidChannel(RecoveryError, ValueError):
    pass


class QuadratureDivergence(RecoveryError, ArithmeticError):
    pass


class NegativeGap(RecoveryError, ArithmeticError):
    """Quasi-entropy difference is significantly negative (data processing violated)."""


class ZeroGap(RecoveryError, ArithmeticError):
    pass


class SupportViolation(RecoveryError, ValueError):
    pass


class ConfigError(RecoveryError, ValueError):
    pass
