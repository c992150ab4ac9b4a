"""Exception hierarchy shared by all kreinlab modules.

Every exception carries an ``exit_code`` used by the CLI:
2 usage/parse, 3 invalid structure, 4 mathematical precondition failure.
"""


class KreinLabError(Exception):
    exit_code = 4

    @property
    def violated(self) -> str:
        return type(self).__name__


class ParseError(KreinLabError):
    exit_code = 2


class UnknownScenario(KreinLabError):
    exit_code = 2


class InvalidStructure(KreinLabError):
    """Malformed mathematical object (bad J, non-orthonormal basis, ...)."""

    exit_code = 3


class DimensionMismatch(InvalidStructure):
    pass


class NotHermitian(KreinLabError):
    pass


class EmptySubspace(KreinLabError):
    pass


class NotRegular(KreinLabError):
    pass


class NotIdempotent(KreinLabError):
    pass


class NotComplementary(KreinLabError):
    pass


class EnvelopeMissing(KreinLabError):
    pass


class NotSelfadjointFamily(KreinLabError):
    pass


class NotOrthogonalFamily(KreinLabError):
    pass


class SingularX(KreinLabError):
    pass


class IncompatibleNet(KreinLabError):
    pass


class UnboundedNet(KreinLabError):
    pass


class NotNormalInput(KreinLabError):
    pass


class ConditionViolated(KreinLabError):
    """A pairwise orthogonality relation failed; names the offending pair."""

    def __init__(self, message, pair=None, relation=None):
        super().__init__(message)
        self.pair = pair
        self.relation = relation


class NotNeutralRange(KreinLabError):
    pass
