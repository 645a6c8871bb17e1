"""
IR Printer

Emits the canonical text form of modules and functions. The output parses
back into a structurally equal module.
"""

from typing import List

from vnlcm.ir.core import Block, Function, Module


INDENT = '  '


def print_block(block: Block) -> List[str]:
    lines = [f"{block.label}:"]
    lines.extend(INDENT + instr.text() for instr in block.instructions())
    return lines


def print_function(func: Function) -> str:
    params = ', '.join(f"%{p}" for p in func.params)
    lines = [f"func @{func.name}({params}) {{"]
    for block in func.blocks:
        lines.extend(print_block(block))
    lines.append('}')
    return '\n'.join(lines) + '\n'


def print_module(module: Module) -> str:
    """Render a module; functions are separated by a blank line."""
    return '\n'.join(print_function(func) for func in module.functions)
