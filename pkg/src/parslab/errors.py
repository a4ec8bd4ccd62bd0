"""Exception types shared across the package."""


class ParsError(Exception):
    """Base class for all errors raised by parslab."""


class MassOverflow(ParsError, ValueError):
    """A (multi)distribution would carry total mass greater than 1."""


class InvalidRule(ParsError, ValueError):
    """A rewrite rule whose right-hand side is not a full distribution."""


class NotAValue(ParsError, ValueError):
    """Substitution was asked to plug in a term that is not a value."""


class InvalidPosition(ParsError, ValueError):
    """A redex position that does not point at a redex of the term."""


class UnknownPolicy(ParsError, KeyError):
    """A policy or strategy name that cannot be resolved."""


class ParseError(ParsError):
    """Syntax error in a rule file or a lambda term, with a 1-based location."""

    def __init__(self, message, line=1, column=1, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")
