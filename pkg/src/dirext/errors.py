"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class DirextError(Exception):
    code = "DIREXT_ERROR"


class AdmissibilityError(DirextError, ValueError):
    code = "DIRECTION_INADMISSIBLE"


class ZeroComponent(AdmissibilityError):
    code = "ZERO_COMPONENT"


class NotUnit(AdmissibilityError):
    code = "NOT_UNIT"


class DimensionMismatch(DirextError, ValueError):
    code = "DIMENSION_MISMATCH"


class DimensionTooLarge(DirextError, ValueError):
    code = "DIMENSION_TOO_LARGE"


class DegenerateCovariance(DirextError, ValueError):
    code = "DEGENERATE_COVARIANCE"


class ConfigInvalid(DirextError, ValueError):
    code = "CONFIG_INVALID"


class QOutOfRange(DirextError, ValueError):
    code = "Q_OUT_OF_RANGE"


class NonFinite(DirextError, ArithmeticError):
    code = "NON_FINITE"


class OutOfUnitSquare(DirextError, ValueError):
    code = "OUT_OF_UNIT_SQUARE"


class BisectionFailure(DirextError, RuntimeError):
    code = "BISECTION_FAILURE"


class TreeInvalid(DirextError, ValueError):
    code = "TREE_INVALID"


class ResolutionTooCoarse(DirextError, ValueError):
    code = "RESOLUTION_TOO_COARSE"


class SpecInvalid(DirextError, ValueError):
    code = "SPEC_INVALID"


class LengthMismatch(DirextError, ValueError):
    code = "LENGTH_MISMATCH"


class ParseError(DirextError, ValueError):
    code = "PARSE_ERROR"


class NonFiniteValue(ParseError):
    code = "NON_FINITE_VALUE"
