"""
Base Pass Definitions

This module defines the base class and result record shared by all
function-level optimization passes.
"""

import abc
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from vnlcm.ir.core import Function, Module


@dataclass
class PassResult:
    """Outcome of running one pass on one function."""
    name: str
    function: str
    changed: bool = False
    counters: Dict[str, int] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)
    report: Optional[Any] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'pass': self.name,
            'function': self.function,
            'changed': self.changed,
            'counters': dict(self.counters),
            'diagnostics': list(self.diagnostics),
        }
        if self.report is not None and hasattr(self.report, 'to_dict'):
            data['report'] = self.report.to_dict()
        return data


class PassBase(abc.ABC):
    """Base class for all passes.

    Subclasses set ``name`` and implement ``run_on_function``. Keyword options
    given to the constructor are handed to ``_configure``.
    """

    name = 'pass'

    def __init__(self, **kwargs):
        self.logger = logging.getLogger(f'vnlcm.passes.{self.name}')
        self.options = dict(kwargs)
        self._configure(**kwargs)

    def _configure(self, **kwargs) -> None:
        """Configure the pass with specific options.

        Args:
            **kwargs: Pass-specific options
        """
        pass

    @abc.abstractmethod
    def run_on_function(self, func: Function) -> PassResult:
        """Transform ``func`` in place.

        Args:
            func: Function to transform

        Returns:
            Result record for this function
        """
        pass

    def run(self, module: Module) -> List[PassResult]:
        """Run the pass on every function of a module, in order."""
        return [self.run_on_function(func) for func in module.functions]

    def _result(self, func: Function, changed: bool, diagnostics: List[str],
                **counters: int) -> PassResult:
        result = PassResult(self.name, func.name, changed, dict(counters), list(diagnostics))
        for diag in diagnostics:
            self.logger.warning(diag)
        self.logger.debug(f"{self.name} on @{func.name}: changed={changed} {counters}")
        return result

    def __str__(self) -> str:
        return self.name
