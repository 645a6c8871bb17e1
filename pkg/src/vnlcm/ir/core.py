"""
IR Core Definitions

This module defines the SSA intermediate representation (modules, functions,
basic blocks, instructions and operands) together with the 64-bit integer
semantics shared by the interpreter and constant folding.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union


INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
_MASK64 = (1 << 64) - 1

BINARY_OPCODES = ('add', 'sub', 'mul', 'div', 'and', 'or', 'xor')
CMP_CONDITIONS = ('eq', 'ne', 'lt', 'le', 'gt', 'ge')

# Pure expressions that take part in value numbering and PRE
CANDIDATE_OPCODES = frozenset(BINARY_OPCODES + ('cmp',))
COMMUTATIVE_OPCODES = frozenset(('add', 'mul', 'and', 'or', 'xor'))
COMMUTATIVE_CONDITIONS = frozenset(('eq', 'ne'))
TERMINATOR_OPCODES = frozenset(('jmp', 'br', 'ret'))
VALUE_OPCODES = CANDIDATE_OPCODES | frozenset(('const', 'opaque', 'phi', 'alloca', 'load'))
SIDE_EFFECT_OPCODES = frozenset(('store', 'print'))


def wrap_i64(value: int) -> int:
    """Wrap an arbitrary Python integer into the signed 64-bit range."""
    return ((value - INT64_MIN) & _MASK64) + INT64_MIN


def evaluate_binary(opcode: str, lhs: int, rhs: int, cond: Optional[str] = None) -> int:
    """Evaluate a candidate operation on two i64 values.

    Args:
        opcode: One of BINARY_OPCODES or 'cmp'
        lhs: Left operand
        rhs: Right operand
        cond: Comparison condition when opcode is 'cmp'

    Returns:
        Wrapped i64 result (0 or 1 for comparisons)

    Raises:
        ZeroDivisionError: For 'div' with a zero divisor
        ValueError: For an unknown opcode or condition
    """
    if opcode == 'add':
        return wrap_i64(lhs + rhs)
    if opcode == 'sub':
        return wrap_i64(lhs - rhs)
    if opcode == 'mul':
        return wrap_i64(lhs * rhs)
    if opcode == 'div':
        if rhs == 0:
            raise ZeroDivisionError("division by zero")
        quotient = abs(lhs) // abs(rhs)
        if (lhs < 0) != (rhs < 0):
            quotient = -quotient
        return wrap_i64(quotient)
    if opcode == 'and':
        return wrap_i64(lhs & rhs)
    if opcode == 'or':
        return wrap_i64(lhs | rhs)
    if opcode == 'xor':
        return wrap_i64(lhs ^ rhs)
    if opcode == 'cmp':
        if cond == 'eq':
            return int(lhs == rhs)
        if cond == 'ne':
            return int(lhs != rhs)
        if cond == 'lt':
            return int(lhs < rhs)
        if cond == 'le':
            return int(lhs <= rhs)
        if cond == 'gt':
            return int(lhs > rhs)
        if cond == 'ge':
            return int(lhs >= rhs)
        raise ValueError(f"Unknown comparison condition: {cond}")
    raise ValueError(f"Not a binary opcode: {opcode}")


@dataclass(frozen=True)
class Var:
    """Reference to an SSA name or function parameter."""
    name: str

    def __str__(self) -> str:
        return f"%{self.name}"


@dataclass(frozen=True)
class Const:
    """Signed 64-bit integer literal."""
    value: int

    def __str__(self) -> str:
        return str(self.value)


Operand = Union[Var, Const]


@dataclass(eq=False)
class Instruction:
    """A single IR instruction.

    Operand layout by opcode:
        binary ops / cmp: [lhs, rhs] (cmp also sets ``cond``)
        const: [Const]
        load: [pointer]; store: [value, pointer]; print / ret: [value]
        br: [condition] with ``labels`` = [true target, false target]
        jmp: no operands, ``labels`` = [target]
        phi: one operand per incoming edge, paired with ``labels``

    Instructions compare by identity so they can be used as dictionary keys
    while passes rewrite them.
    """
    opcode: str
    operands: List[Operand] = field(default_factory=list)
    result: Optional[str] = None
    cond: Optional[str] = None
    labels: List[str] = field(default_factory=list)

    @property
    def is_candidate(self) -> bool:
        return self.opcode in CANDIDATE_OPCODES

    @property
    def is_terminator(self) -> bool:
        return self.opcode in TERMINATOR_OPCODES

    @property
    def is_phi(self) -> bool:
        return self.opcode == 'phi'

    @property
    def is_commutative(self) -> bool:
        if self.opcode == 'cmp':
            return self.cond in COMMUTATIVE_CONDITIONS
        return self.opcode in COMMUTATIVE_OPCODES

    def uses(self) -> Iterator[str]:
        """Yield the names this instruction reads."""
        for operand in self.operands:
            if isinstance(operand, Var):
                yield operand.name

    def incoming(self) -> List[Tuple[str, Operand]]:
        """(predecessor label, value) pairs of a phi."""
        return list(zip(self.labels, self.operands))

    def incoming_value(self, label: str) -> Optional[Operand]:
        for pred, value in zip(self.labels, self.operands):
            if pred == label:
                return value
        return None

    def replace_operand(self, name: str, new: Operand) -> int:
        """Replace every use of ``name``; returns the number of operands changed."""
        count = 0
        for i, operand in enumerate(self.operands):
            if isinstance(operand, Var) and operand.name == name:
                self.operands[i] = new
                count += 1
        return count

    def retarget(self, old: str, new: str) -> int:
        """Rename label ``old`` to ``new`` in branch targets or phi incomings."""
        count = 0
        for i, label in enumerate(self.labels):
            if label == old:
                self.labels[i] = new
                count += 1
        return count

    def clone(self, result: Optional[str] = None) -> 'Instruction':
        return Instruction(
            opcode=self.opcode,
            operands=list(self.operands),
            result=result if result is not None else self.result,
            cond=self.cond,
            labels=list(self.labels),
        )

    def same_as(self, other: 'Instruction') -> bool:
        """Structural equality."""
        return (
            self.opcode == other.opcode
            and self.operands == other.operands
            and self.result == other.result
            and self.cond == other.cond
            and self.labels == other.labels
        )

    def text(self) -> str:
        """Canonical textual form (without indentation)."""
        op = self.opcode
        if op == 'phi':
            pairs = ', '.join(f"{label}: {value}" for label, value in self.incoming())
            rhs = f"phi [{pairs}]"
        elif op == 'cmp':
            rhs = f"cmp {self.cond} {self.operands[0]}, {self.operands[1]}"
        elif op in ('jmp',):
            return f"jmp {self.labels[0]}"
        elif op == 'br':
            return f"br {self.operands[0]}, {self.labels[0]}, {self.labels[1]}"
        elif op in ('opaque', 'alloca'):
            rhs = op
        else:
            rhs = op + (' ' + ', '.join(str(o) for o in self.operands) if self.operands else '')
        if self.result is None:
            return rhs
        return f"%{self.result} = {rhs}"

    def __str__(self) -> str:
        return self.text()


@dataclass(eq=False)
class Block:
    """Basic block: phis, then body, then exactly one terminator."""
    label: str
    phis: List[Instruction] = field(default_factory=list)
    body: List[Instruction] = field(default_factory=list)
    terminator: Optional[Instruction] = None

    def instructions(self) -> Iterator[Instruction]:
        yield from self.phis
        yield from self.body
        if self.terminator is not None:
            yield self.terminator

    def successors(self) -> List[str]:
        """Distinct successor labels in terminator order."""
        if self.terminator is None:
            return []
        seen: List[str] = []
        for label in self.terminator.labels:
            if label not in seen:
                seen.append(label)
        return seen

    def retarget_successor(self, old: str, new: str) -> int:
        if self.terminator is None:
            return 0
        return self.terminator.retarget(old, new)

    def retarget_incoming(self, old: str, new: str) -> int:
        return sum(phi.retarget(old, new) for phi in self.phis)


@dataclass(eq=False)
class Function:
    """A function: parameters and an ordered list of blocks (first is entry)."""
    name: str
    params: List[str] = field(default_factory=list)
    blocks: List[Block] = field(default_factory=list)

    @property
    def entry(self) -> str:
        return self.blocks[0].label

    def block(self, label: str) -> Block:
        for block in self.blocks:
            if block.label == label:
                return block
        raise KeyError(f"No block '{label}' in @{self.name}")

    def has_block(self, label: str) -> bool:
        return any(block.label == label for block in self.blocks)

    def block_map(self) -> Dict[str, Block]:
        return {block.label: block for block in self.blocks}

    def labels(self) -> List[str]:
        return [block.label for block in self.blocks]

    def instructions(self) -> Iterator[Tuple[Block, Instruction]]:
        for block in self.blocks:
            for instr in block.instructions():
                yield block, instr

    def definitions(self) -> Dict[str, Tuple[str, Instruction]]:
        """Map each SSA result name to (block label, defining instruction)."""
        defs: Dict[str, Tuple[str, Instruction]] = {}
        for block, instr in self.instructions():
            if instr.result is not None:
                defs[instr.result] = (block.label, instr)
        return defs

    def use_count(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for _, instr in self.instructions():
            for name in instr.uses():
                counts[name] = counts.get(name, 0) + 1
        return counts

    def replace_uses(self, name: str, new: Operand) -> int:
        """Rewrite every use of ``name`` to ``new``."""
        return sum(instr.replace_operand(name, new) for _, instr in self.instructions())

    def remove_instruction(self, instr: Instruction) -> bool:
        for block in self.blocks:
            for seq in (block.phis, block.body):
                for i, candidate in enumerate(seq):
                    if candidate is instr:
                        del seq[i]
                        return True
        return False

    def insert_block_after(self, label: str, block: Block) -> None:
        for i, existing in enumerate(self.blocks):
            if existing.label == label:
                self.blocks.insert(i + 1, block)
                return
        self.blocks.append(block)

    def remove_block(self, label: str) -> None:
        self.blocks = [block for block in self.blocks if block.label != label]

    def names(self) -> Set[str]:
        names = set(self.params)
        for _, instr in self.instructions():
            if instr.result is not None:
                names.add(instr.result)
        return names

    def fresh_name(self, base: str) -> str:
        return NameAllocator(self).name(base)

    def fresh_label(self, base: str) -> str:
        return NameAllocator(self).label(base)

    def structurally_equal(self, other: 'Function') -> bool:
        if self.name != other.name or self.params != other.params:
            return False
        if len(self.blocks) != len(other.blocks):
            return False
        for mine, theirs in zip(self.blocks, other.blocks):
            if mine.label != theirs.label:
                return False
            ours = list(mine.instructions())
            others = list(theirs.instructions())
            if len(ours) != len(others):
                return False
            if not all(a.same_as(b) for a, b in zip(ours, others)):
                return False
        return True


@dataclass(eq=False)
class Module:
    """Ordered collection of functions with unique names."""
    functions: List[Function] = field(default_factory=list)

    def function(self, name: str) -> Function:
        for func in self.functions:
            if func.name == name:
                return func
        raise KeyError(f"No function '@{name}' in module")

    def has_function(self, name: str) -> bool:
        return any(func.name == name for func in self.functions)

    def structurally_equal(self, other: 'Module') -> bool:
        if len(self.functions) != len(other.functions):
            return False
        return all(a.structurally_equal(b) for a, b in zip(self.functions, other.functions))


class NameAllocator:
    """Hands out SSA names and block labels that do not clash with a function.

    Names handed out are remembered, so several fresh names can be requested
    before any of them is inserted into the function.
    """

    def __init__(self, func: Function, extra: Iterable[str] = ()):
        self._names = func.names() | set(extra)
        self._labels = set(func.labels())

    @staticmethod
    def _pick(base: str, taken: Set[str]) -> str:
        if base not in taken:
            taken.add(base)
            return base
        suffix = 1
        while f"{base}.{suffix}" in taken:
            suffix += 1
        name = f"{base}.{suffix}"
        taken.add(name)
        return name

    def name(self, base: str) -> str:
        return self._pick(base, self._names)

    def label(self, base: str) -> str:
        return self._pick(base, self._labels)
