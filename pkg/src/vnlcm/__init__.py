"""
vnlcm

Partial redundancy elimination by lazy code motion over value numbers, for
a small textual SSA IR, together with the normalizing passes it relies on,
an interpreter and a differential tester.
"""

__version__ = '0.1.0'

from vnlcm.errors import (
    DataflowCheckError,
    DataflowConvergenceError,
    InterpreterError,
    IRValidationError,
    OptimizerError,
    ParseError,
    PreSafetyError,
    UnknownPassError,
)
from vnlcm.interp import Behavior, ExecProfile, differential, execute
from vnlcm.ir import Module, load_module, parse_module, print_module, validate
from vnlcm.passes import AVAILABLE_PASSES, PIPELINE_PRESETS, get_pass, pre_pass
from vnlcm.pipeline import OptimizationPipeline, compare_pipelines, optimize, run_pipeline
