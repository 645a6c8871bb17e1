"""
Optimizer Errors

Exception hierarchy shared by the IR layer, the analyses, the passes and the
interpreter. Library code raises these; only the command line turns them into
messages and exit codes.
"""

from typing import List, Optional


class OptimizerError(Exception):
    """Base class for all errors raised by vnlcm."""


class ParseError(OptimizerError, ValueError):
    """Syntax or structural error in IR text.

    Attributes:
        line: 1-based line of the offending token
        column: 1-based column of the offending token
        reason: Message without the location prefix
    """

    def __init__(self, reason: str, line: int, column: int):
        self.reason = reason
        self.line = line
        self.column = column
        super().__init__(f"ParseError at line {line}, column {column}: {reason}")


class IRValidationError(OptimizerError):
    """A module failed validation after a pass."""

    def __init__(self, diagnostics: List[str], pass_name: Optional[str] = None):
        self.diagnostics = list(diagnostics)
        self.pass_name = pass_name
        where = f" after pass '{pass_name}'" if pass_name else ""
        summary = "; ".join(self.diagnostics[:3])
        if len(self.diagnostics) > 3:
            summary += f"; ... ({len(self.diagnostics)} total)"
        super().__init__(f"IR validation failed{where}: {summary}")


class UnknownPassError(OptimizerError, ValueError):
    """Requested pass or pipeline name is not registered."""


class DataflowConvergenceError(OptimizerError, RuntimeError):
    """The worklist solver exceeded its visit limit."""


class DataflowCheckError(OptimizerError, AssertionError):
    """A solution disagrees with the reference solver or breaks an inclusion."""

    def __init__(self, function: str, problems: List[str]):
        self.function = function
        self.problems = list(problems)
        summary = '; '.join(self.problems[:3])
        if len(self.problems) > 3:
            summary += f"; ... ({len(self.problems)} total)"
        super().__init__(f"dataflow check failed for @{function}: {summary}")


class PreSafetyError(OptimizerError, AssertionError):
    """A load introduced by PRE is not reached by a store on every path."""


class InterpreterError(OptimizerError):
    """Execution could not start or referenced an undefined value."""
