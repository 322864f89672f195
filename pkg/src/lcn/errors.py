"""Exception hierarchy for the lcn library.

CLI exit-code mapping: parse/semantic errors exit 2, dimension/data errors
exit 3, property failures (not a lattice, not observable, ...) exit 1.
"""


class LcnError(Exception):
    """Base class for all lcn errors."""


class DimensionError(LcnError):
    """Operands do not have the shapes an operation requires."""


class ExpressionError(LcnError):
    """An expression tree is malformed for the declared arity or lattice."""


class NotAPosetError(LcnError):
    """A relation is not reflexive, antisymmetric and transitive."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotALatticeError(LcnError):
    """A join table or order fails one of the lattice axioms."""

    def __init__(self, message, verdict=None, witness=None):
        super().__init__(message)
        self.verdict = verdict
        self.witness = witness


class NotClosedError(LcnError):
    """A subset is not closed under join and meet."""

    def __init__(self, message, pair=None, escapee=None):
        super().__init__(message)
        self.pair = pair
        self.escapee = escapee


class NotInvariantError(LcnError):
    """A transition map sends a restricted state outside the subset."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDecomposableError(LcnError):
    """A map over a product lattice does not act factor-wise."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotComparabilityGraphError(LcnError):
    """A graph admits no transitive orientation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotMonotoneError(LcnError):
    """A function is not monotone with respect to the given order."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(LcnError):
    """Syntax error in a model file."""

    def __init__(self, message, line, col):
        super().__init__(f"line {line} col {col}: {message}")
        self.line = line
        self.col = col


class SemanticError(LcnError):
    """Well-formed but meaningless model text (unknown names, arity, ...)."""

    def __init__(self, message, line, col):
        super().__init__(f"line {line} col {col}: {message}")
        self.line = line
        self.col = col


class StateSpaceCapError(LcnError):
    """The stacked state space exceeds the configured column cap."""
