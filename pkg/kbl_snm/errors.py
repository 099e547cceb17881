"""Exceptions raised by kbl_snm."""

__all__ = [
    "KBLError",
    "VocabularyError",
    "ConfigurationError",
    "EvaluationError",
    "InconsistentKnowledgeError",
    "InconsistentFormulaError",
    "KindError",
    "UnsupportedModalityError",
    "ResourceExhaustedError",
    "BoundExhaustedError",
    "ParseError",
]


class KBLError(Exception):
    """Base class of all kbl_snm errors."""


class VocabularyError(KBLError, ValueError):
    """Undeclared symbol, arity mismatch or reserved predicate name."""


class ConfigurationError(KBLError, ValueError):
    """Invalid configuration value or unknown sort."""


class EvaluationError(KBLError, ValueError):
    """A function table has no entry for the requested arguments."""


class InconsistentKnowledgeError(KBLError, ValueError):
    """A formula would make a knowledge base inconsistent."""

    def __init__(self, message: str, agent: str = None, formula=None):
        super().__init__(message)
        self.agent = agent
        self.formula = formula


class InconsistentFormulaError(KBLError, ValueError):
    """A formula is not KD4-consistent."""


class KindError(KBLError, TypeError):
    """A formula of the wrong kind for the place it is used in."""


class UnsupportedModalityError(KBLError, ValueError):
    """Common or distributed knowledge reached the KD4 prover."""


class ResourceExhaustedError(KBLError, RuntimeError):
    """The prover step budget or the canonical model guard was exceeded."""

    def __init__(self, message: str, estimate: int = None):
        super().__init__(message)
        self.estimate = estimate


class BoundExhaustedError(KBLError, RuntimeError):
    """Common knowledge could not be decided within the unroll bound."""


class ParseError(KBLError, ValueError):
    """Syntax error in a formula, model or Kripke file."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
