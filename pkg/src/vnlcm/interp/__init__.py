"""
Interpreter

Reference execution and differential comparison of modules.
"""

from vnlcm.interp.interpreter import Behavior, ExecProfile, execute, DEFAULT_FUEL
from vnlcm.interp.differential import DiffVerdict, differential, fit_arguments
