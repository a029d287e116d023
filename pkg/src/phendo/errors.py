"""Exception hierarchy shared by every module."""


class PhendoError(Exception):
    pass


class InvalidLinearisationError(PhendoError, ValueError):
    pass


class UnsupportedClassError(PhendoError, ValueError):
    pass


class InvalidParameterError(PhendoError, ValueError):
    pass


class InversionError(PhendoError, ArithmeticError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class SingularInputError(PhendoError, ValueError):
    pass


class InsufficientDepthError(PhendoError, ValueError):
    pass


class SeedSelectionError(PhendoError):
    pass


class DegenerateLeafError(PhendoError):
    pass


class ConvergenceError(PhendoError):
    def __init__(self, message, gap):
        super().__init__(f"{message} (last gap {gap:.3e})")
        self.gap = gap


class CertificateError(PhendoError):
    pass


class InsufficientWindowError(PhendoError, ValueError):
    pass


class ExtensionRequiredError(PhendoError, ValueError):
    pass
