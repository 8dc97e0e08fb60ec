"""Exception hierarchy shared by every outerlab module."""


class OuterlabError(Exception):
    """Base class for all errors raised by outerlab."""


class GroupConstructionError(OuterlabError, ValueError):
    """A Cayley table or generator set does not define a group."""


class SizeError(OuterlabError):
    """A configured size cap was exceeded."""


class NotNormalError(OuterlabError, ValueError):
    """Quotient requested by a subgroup that is not normal."""


class HnnValidationError(OuterlabError, ValueError):
    """The triple (H, K, phi) does not define an automorphism-induced HNN-extension."""


class PreconditionError(OuterlabError, ValueError):
    """Input to an engine operation violates its stated precondition."""


class ConsistencyError(OuterlabError, AssertionError):
    """An identity guaranteed by the theory failed; indicates a bug."""


class InstanceParseError(OuterlabError, ValueError):
    """An instance file or word string could not be parsed."""
