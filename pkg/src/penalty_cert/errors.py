"""
errors.py — Exception hierarchy

Every failure the toolkit raises on purpose derives from CertifyError, so the
CLI and the MCP dispatcher can tell input/evaluation problems apart from bugs.
"""


import sys


class CertifyError(Exception):
    """Base class for all toolkit errors."""

    if sys.version_info < (3, 11):

        def add_note(self, note: str) -> None:
            # Backport of BaseException.add_note (Python 3.11+).
            if not isinstance(note, str):
                raise TypeError("note must be a str")
            if not hasattr(self, "__notes__"):
                self.__notes__ = []
            self.__notes__.append(note)


class IndeterminateSum(CertifyError, ArithmeticError):
    """+inf and -inf both survived in an extended-real sum."""


class DomainError(CertifyError, ArithmeticError):
    """An expression was evaluated outside its real domain (or produced NaN/inf)."""


class ExprSyntaxError(CertifyError):
    """Malformed expression text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifier(CertifyError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"Unknown identifier '{name}' (at byte {offset})")
        self.name = name
        self.offset = offset


class VariableOutOfRange(CertifyError):
    def __init__(self, index: int, dim: int, offset: int):
        super().__init__(f"Variable x{index} out of range 1..{dim} (at byte {offset})")
        self.index = index
        self.dim = dim
        self.offset = offset


class ProblemIoError(CertifyError, OSError):
    """Problem file missing or unreadable."""


class FormatError(CertifyError):
    """Problem file is readable but violates the section/field format."""


class InvalidCandidate(CertifyError):
    """Candidate point fails membership in X, G or S."""


class NotInG(CertifyError):
    """Point lies outside G = {x in X | g_i(x) <= 0}."""


class EmptyFeasibleGrid(CertifyError):
    """No grid point of the delta-ball lies in G."""


class NoOffSPoints(CertifyError):
    """Sampling found no point of the neighbourhood outside S."""
