"""
IR Interpreter

Reference executor: small-step evaluation with wrapping i64 arithmetic,
simultaneous phi evaluation on each edge, an ``opaque`` input tape and a
step budget. Every executed instruction is counted by opcode so redundancy
can be measured dynamically.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from vnlcm.errors import InterpreterError
from vnlcm.ir.core import CANDIDATE_OPCODES, Const, Function, Instruction, Module, Operand, evaluate_binary


logger = logging.getLogger('vnlcm.interp.interpreter')

DEFAULT_FUEL = 10_000_000

STATUS_RETURNED = 'returned'
STATUS_TRAPPED = 'trapped-div0'
STATUS_FUEL = 'fuel-exhausted'

# Addresses handed out by alloca start here.
FIRST_ADDRESS = 4096

TraceHook = Callable[[Instruction, int], None]


@dataclass(frozen=True)
class Behavior:
    """What an outside observer sees: prints, return value and how it ended."""
    prints: Tuple[int, ...]
    returned: Optional[int]
    status: str


@dataclass
class ExecProfile:
    behavior: Behavior
    op_counts: Counter = field(default_factory=Counter)
    steps: int = 0

    @property
    def candidate_total(self) -> int:
        return sum(self.op_counts.get(op, 0) for op in CANDIDATE_OPCODES)

    def summary(self) -> Dict[str, object]:
        return {
            'status': self.behavior.status,
            'return': self.behavior.returned,
            'prints': list(self.behavior.prints),
            'steps': self.steps,
            'candidate_total': self.candidate_total,
            'op_counts': dict(sorted(self.op_counts.items())),
        }


def execute(module: Module, func_name: str, args: Sequence[int],
            tape: Sequence[int] = (), fuel: int = DEFAULT_FUEL,
            trace: Optional[TraceHook] = None) -> ExecProfile:
    """Run ``@func_name`` on ``args``.

    Args:
        module: Module holding the function
        func_name: Function name without '@'
        args: One value per parameter
        tape: Values consumed in order by ``opaque`` (0 once exhausted)
        fuel: Maximum number of instructions to execute
        trace: Called with every value-producing instruction and its value

    Returns:
        ExecProfile of the run

    Raises:
        InterpreterError: Unknown function, arity mismatch or undefined name
    """
    if not module.has_function(func_name):
        raise InterpreterError(f"Unknown function '@{func_name}'")
    func = module.function(func_name)
    if len(args) != len(func.params):
        raise InterpreterError(
            f"@{func_name} expects {len(func.params)} argument(s), got {len(args)}"
        )
    return _Machine(func, tape, fuel, trace).run(args)


class _Machine:
    def __init__(self, func: Function, tape: Sequence[int], fuel: int,
                 trace: Optional[TraceHook]):
        self.func = func
        self.blocks = func.block_map()
        self.tape = list(tape)
        self.tape_pos = 0
        self.fuel = fuel
        self.trace = trace
        self.env: Dict[str, int] = {}
        self.memory: Dict[int, int] = {}
        self.next_address = FIRST_ADDRESS
        self.counts: Counter = Counter()
        self.prints: List[int] = []
        self.steps = 0

    def value(self, operand: Operand) -> int:
        if isinstance(operand, Const):
            return operand.value
        try:
            return self.env[operand.name]
        except KeyError:
            raise InterpreterError(f"use of undefined '%{operand.name}' in @{self.func.name}")

    def tick(self, instr: Instruction) -> bool:
        """Charge one step; False when the budget is gone."""
        if self.steps >= self.fuel:
            return False
        self.steps += 1
        self.counts[instr.opcode] += 1
        return True

    def define(self, instr: Instruction, value: int) -> None:
        self.env[instr.result] = value
        if self.trace is not None:
            self.trace(instr, value)

    def finish(self, status: str, returned: Optional[int] = None) -> ExecProfile:
        return ExecProfile(Behavior(tuple(self.prints), returned, status), self.counts, self.steps)

    def run(self, args: Sequence[int]) -> ExecProfile:
        for name, value in zip(self.func.params, args):
            self.env[name] = int(value)
        label, previous = self.func.entry, None
        while True:
            block = self.blocks[label]
            if block.phis:
                incoming = [phi.incoming_value(previous) for phi in block.phis]
                values = []
                for phi, operand in zip(block.phis, incoming):
                    if operand is None:
                        raise InterpreterError(
                            f"phi '%{phi.result}' in {label} has no value for edge from {previous}"
                        )
                    values.append(self.value(operand))
                for phi, value in zip(block.phis, values):
                    if not self.tick(phi):
                        return self.finish(STATUS_FUEL)
                    self.define(phi, value)
            for instr in block.body:
                if not self.tick(instr):
                    return self.finish(STATUS_FUEL)
                if not self.step(instr):
                    return self.finish(STATUS_TRAPPED)
            term = block.terminator
            if not self.tick(term):
                return self.finish(STATUS_FUEL)
            if term.opcode == 'ret':
                return self.finish(STATUS_RETURNED, self.value(term.operands[0]))
            previous = label
            if term.opcode == 'jmp':
                label = term.labels[0]
            else:
                label = term.labels[0] if self.value(term.operands[0]) != 0 else term.labels[1]

    def step(self, instr: Instruction) -> bool:
        """Execute one body instruction; False on division by zero."""
        op = instr.opcode
        if op in CANDIDATE_OPCODES:
            lhs, rhs = (self.value(o) for o in instr.operands)
            try:
                result = evaluate_binary(op, lhs, rhs, instr.cond)
            except ZeroDivisionError:
                return False
            self.define(instr, result)
        elif op == 'const':
            self.define(instr, instr.operands[0].value)
        elif op == 'opaque':
            if self.tape_pos < len(self.tape):
                result = int(self.tape[self.tape_pos])
                self.tape_pos += 1
            else:
                result = 0
            self.define(instr, result)
        elif op == 'alloca':
            address = self.next_address
            self.next_address += 8
            self.define(instr, address)
        elif op == 'load':
            self.define(instr, self.memory.get(self.value(instr.operands[0]), 0))
        elif op == 'store':
            self.memory[self.value(instr.operands[1])] = self.value(instr.operands[0])
        elif op == 'print':
            self.prints.append(self.value(instr.operands[0]))
        else:
            raise InterpreterError(f"cannot execute '{instr.text()}'")
        return True
