"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: numeric-domain failures exit with 3,
everything else derived from :class:`AdditiveLabError` exits with 2.
"""


class AdditiveLabError(Exception):
    """Base class for all library errors."""


class CapacityError(AdditiveLabError, ValueError):
    """A table or window request exceeds the configured memory budget."""


class DomainError(AdditiveLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(AdditiveLabError, ValueError):
    """Inconsistent configuration, e.g. too few sieving primes."""


class EvaluationError(AdditiveLabError, ValueError):
    """A rule is undefined at a prime power that an evaluation needs."""


class DegenerateFunctionError(AdditiveLabError, ValueError):
    """The approximate variance vanishes, so a normalised quantity is undefined."""


class PreconditionError(AdditiveLabError, ValueError):
    """A stated precondition of an inequality or estimate is violated."""


class NumericDomainError(AdditiveLabError, ArithmeticError):
    """A numeric quantity left its admissible range (e.g. a nonpositive Euler factor)."""


class ComplexValueError(AdditiveLabError, TypeError):
    """A real-valued function was required but a complex one was supplied."""
