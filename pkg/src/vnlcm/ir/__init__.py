"""
SSA IR

Data model, text parser and printer, and validation.
"""

from vnlcm.ir.core import (
    Block, Const, Function, Instruction, Module, NameAllocator, Operand, Var,
    evaluate_binary, wrap_i64,
)
from vnlcm.ir.parser import load_module, parse_function, parse_module
from vnlcm.ir.printer import print_function, print_module
from vnlcm.ir.validate import validate, validate_function
