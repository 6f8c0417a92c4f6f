"""Exception hierarchy.

Every error raised by the library derives from :class:`SymWebError`.  The
three intermediate classes map onto CLI exit codes: parse/format problems
(2), domain errors (3) and exceeded resource caps (4).
"""


class SymWebError(Exception):
    pass


class FormatError(SymWebError, ValueError):
    """Malformed textual input (scalars, polynomials, .swt files)."""


class DomainError(SymWebError):
    """The input is well formed but outside an operation's domain."""


class ResourceCapExceeded(SymWebError):
    """An exhaustive enumeration would exceed its configured cap."""


class FieldMismatch(DomainError, TypeError):
    pass


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class NotEnumerable(DomainError):
    pass


class InfiniteField(DomainError):
    pass


class DimensionMismatch(DomainError, ValueError):
    pass


class IndexOutOfRange(DomainError, IndexError):
    pass


class ZeroPolynomial(DomainError):
    pass


class NotHomogeneous(DomainError):
    pass


class InexactDivision(DomainError):
    pass


class NotSymmetric(FormatError):
    pass


class SingularMatrix(DomainError):
    pass


class ZeroDiscriminant(DomainError):
    pass


class FactorsDoNotExhaust(DomainError):
    pass


class ClosureFailure(SymWebError, AssertionError):
    """Raised when an algebraic identity that must hold fails (a bug)."""


class NotInGrRegime(DomainError):
    pass


class NotGeometricallyReduced(DomainError):
    pass


class CharTwo(DomainError):
    pass


class SpanDegenerate(DomainError):
    pass


class EnumerationTooLarge(ResourceCapExceeded):
    pass


class SearchTooLarge(ResourceCapExceeded):
    pass
