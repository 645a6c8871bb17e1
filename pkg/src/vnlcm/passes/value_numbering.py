"""
Value Numbering

Hash-based global value numbering over the blocks in reverse post-order.
Each candidate expression is keyed by its opcode and the value numbers of its
operands (sorted for commutative operations), so expressions that are
lexically different but compute the same value share a number. The first
expression seen for a number is its leader.

Optimizations applied during the scan (all enabled by default):

1. ``and``/``or``/``cmp eq``/``cmp ne`` on two operands with one value
   number are replaced by their forced result.
2. Expressions over constants are folded, and ``const`` instructions are
   propagated as literals.
3. Algebraic identities (``x+0``, ``x*1``, ``x*0``, ...) are simplified.
4. A phi whose incoming values all share one number receives that number.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from vnlcm.analysis.cfg import CfgInfo, analyze_cfg
from vnlcm.ir.core import (
    Const, Function, Instruction, Operand, Var, evaluate_binary,
)
from vnlcm.passes.base import PassBase, PassResult


logger = logging.getLogger('vnlcm.passes.value_numbering')

ALL_OPTIMIZATIONS: FrozenSet[int] = frozenset({1, 2, 3, 4})
REASSOCIATE_OPTIMIZATIONS: FrozenSet[int] = frozenset({2, 3})

ExpressionKey = Tuple[str, Optional[str], int, int]


@dataclass
class ValueTable:
    """Value numbers for one function.

    Attributes:
        vn_of: Operand (name or literal) to value number
        leader_of: Value number to its leader expression
        occurrences: Value number to candidate instructions, in scan order
        block_of: Candidate instruction to the label of its block
        constant_of: Value number to the literal it stands for
        max_vn: Highest number handed out
    """
    vn_of: Dict[Operand, int] = field(default_factory=dict)
    leader_of: Dict[int, Instruction] = field(default_factory=dict)
    occurrences: Dict[int, List[Instruction]] = field(default_factory=dict)
    block_of: Dict[Instruction, str] = field(default_factory=dict)
    constant_of: Dict[int, int] = field(default_factory=dict)
    expressions: Dict[ExpressionKey, int] = field(default_factory=dict)
    max_vn: int = 0
    folded: int = 0
    simplified: int = 0
    reordered: int = 0

    def fresh(self) -> int:
        self.max_vn += 1
        return self.max_vn

    def literal(self, value: int) -> int:
        key = Const(value)
        vn = self.vn_of.get(key)
        if vn is None:
            vn = self.fresh()
            self.vn_of[key] = vn
            self.constant_of[vn] = value
        return vn

    def vn(self, operand: Operand) -> Optional[int]:
        """Number of an operand; literals are numbered on first sight."""
        if isinstance(operand, Const):
            return self.literal(operand.value)
        return self.vn_of.get(operand)

    def vn_of_instruction(self, instr: Instruction) -> Optional[int]:
        if instr.result is None:
            return None
        return self.vn_of.get(Var(instr.result))

    def candidate_vns(self) -> List[int]:
        return sorted(vn for vn, occ in self.occurrences.items() if occ)

    def refresh_leaders(self) -> None:
        for vn, occ in self.occurrences.items():
            if occ:
                self.leader_of[vn] = occ[0]
            else:
                self.leader_of.pop(vn, None)

    def describe(self, vn: int) -> str:
        leader = self.leader_of.get(vn)
        if leader is None:
            if vn in self.constant_of:
                return str(self.constant_of[vn])
            return f"v{vn}"
        op = leader.opcode if leader.opcode != 'cmp' else f"cmp {leader.cond}"
        args = ', '.join(
            str(o) if isinstance(o, Const) else f"v{self.vn_of.get(o, 0)}"
            for o in leader.operands
        )
        return f"{op} {args}"


def _forced_result(op: str, cond: Optional[str], lhs: Operand) -> Optional[Operand]:
    if op in ('and', 'or'):
        return lhs
    if op == 'cmp' and cond == 'eq':
        return Const(1)
    if op == 'cmp' and cond == 'ne':
        return Const(0)
    return None


def _identity(op: str, lhs: Operand, rhs: Operand,
              cl: Optional[int], cr: Optional[int]) -> Optional[Operand]:
    if op in ('add', 'xor', 'or'):
        if cr == 0:
            return lhs
        if cl == 0:
            return rhs
    elif op == 'sub':
        if cr == 0:
            return lhs
    elif op == 'mul':
        if cr == 0 or cl == 0:
            return Const(0)
        if cr == 1:
            return lhs
        if cl == 1:
            return rhs
    elif op == 'div':
        if cr == 1:
            return lhs
    elif op == 'and':
        if cr == 0 or cl == 0:
            return Const(0)
    return None


def _simplify(instr: Instruction, vt: ValueTable,
              optimizations: FrozenSet[int]) -> Optional[Operand]:
    """Operand the instruction can be replaced by, if any."""
    lhs, rhs = instr.operands
    vl, vr = vt.vn(lhs), vt.vn(rhs)
    cl = vt.constant_of.get(vl) if vl is not None else None
    cr = vt.constant_of.get(vr) if vr is not None else None
    if 2 in optimizations and cl is not None and cr is not None:
        try:
            vt.folded += 1
            return Const(evaluate_binary(instr.opcode, cl, cr, instr.cond))
        except ZeroDivisionError:
            vt.folded -= 1
    if 1 in optimizations and vl is not None and vl == vr:
        forced = _forced_result(instr.opcode, instr.cond, lhs)
        if forced is not None:
            vt.simplified += 1
            return forced
    if 3 in optimizations:
        replacement = _identity(instr.opcode, lhs, rhs, cl, cr)
        if replacement is not None:
            vt.simplified += 1
            return replacement
    return None


def assign_value_numbers(func: Function, cfg: Optional[CfgInfo] = None,
                         optimizations: Iterable[int] = ALL_OPTIMIZATIONS,
                         reorder_operands: bool = False) -> ValueTable:
    """Number the values of ``func``, simplifying it in place.

    Args:
        func: Function to number
        cfg: Current CfgInfo (computed if None)
        optimizations: Subset of {1, 2, 3, 4} to apply during the scan
        reorder_operands: Also rewrite commutative operands into value number
            order in the text

    Returns:
        The value table
    """
    cfg = cfg or analyze_cfg(func)
    optimizations = frozenset(optimizations)
    vt = ValueTable()
    for param in func.params:
        vt.vn_of[Var(param)] = vt.fresh()

    for label in cfg.rpo:
        block = func.block(label)
        for phi in block.phis:
            incoming = [vt.vn(o) for o in phi.operands]
            if 4 in optimizations and incoming and None not in incoming and len(set(incoming)) == 1:
                vt.vn_of[Var(phi.result)] = incoming[0]
            else:
                vt.vn_of[Var(phi.result)] = vt.fresh()
        for instr in list(block.body):
            _number_instruction(func, block, label, instr, vt, optimizations, reorder_operands)
        for operand in block.terminator.operands:
            vt.vn(operand)

    vt.refresh_leaders()
    logger.debug(
        f"@{func.name}: max_vn={vt.max_vn}, {len(vt.candidate_vns())} candidate VN(s), "
        f"{vt.folded} folded, {vt.simplified} simplified"
    )
    return vt


def _number_instruction(func: Function, block, label: str, instr: Instruction,
                        vt: ValueTable, optimizations: FrozenSet[int],
                        reorder_operands: bool) -> None:
    op = instr.opcode
    if op == 'const':
        value = instr.operands[0].value
        vt.vn_of[Var(instr.result)] = vt.literal(value)
        if 2 in optimizations:
            func.replace_uses(instr.result, Const(value))
            block.body.remove(instr)
            vt.folded += 1
        return
    if op in ('opaque', 'load', 'alloca'):
        vt.vn_of[Var(instr.result)] = vt.fresh()
        return
    if not instr.is_candidate:
        for operand in instr.operands:
            vt.vn(operand)
        return

    replacement = _simplify(instr, vt, optimizations)
    if replacement is not None:
        vt.vn_of[Var(instr.result)] = vt.vn(replacement)
        func.replace_uses(instr.result, replacement)
        block.body.remove(instr)
        return

    vl, vr = vt.vn(instr.operands[0]), vt.vn(instr.operands[1])
    if instr.is_commutative and vl is not None and vr is not None and vl > vr:
        if reorder_operands:
            instr.operands.reverse()
            vt.reordered += 1
        vl, vr = vr, vl
    if vl is None or vr is None:
        # Operand from an unnumbered back edge: always a new value.
        vn = vt.fresh()
    else:
        key = (op, instr.cond, vl, vr)
        vn = vt.expressions.get(key)
        if vn is None:
            vn = vt.fresh()
            vt.expressions[key] = vn
    vt.vn_of[Var(instr.result)] = vn
    vt.occurrences.setdefault(vn, []).append(instr)
    vt.block_of[instr] = label


def format_value_table(func: Function, vt: ValueTable) -> str:
    """Per-instruction value numbers and a per-VN summary (``--dump-vn``)."""
    lines = [f"value numbers for @{func.name} (max_vn={vt.max_vn})"]
    for block in func.blocks:
        lines.append(f"{block.label}:")
        for instr in block.instructions():
            vn = vt.vn_of_instruction(instr)
            if vn is None:
                lines.append(f"  {instr.text()}")
                continue
            leader = ' leader' if vt.leader_of.get(vn) is instr else ''
            lines.append(f"  {instr.text():<40} ; vn={vn}{leader}")
    for vn in vt.candidate_vns():
        lines.append(f"v{vn} = {vt.describe(vn)}: leader %{vt.leader_of[vn].result}, "
                     f"{len(vt.occurrences[vn])} occurrence(s)")
    return '\n'.join(lines) + '\n'


class ReassociatePass(PassBase):
    """Constant folding, identities and commutative operand ordering."""

    name = 'reassociate'

    def _configure(self, optimizations: Iterable[int] = REASSOCIATE_OPTIMIZATIONS, **kwargs) -> None:
        self.optimizations = frozenset(optimizations)

    def run_on_function(self, func: Function) -> PassResult:
        vt = assign_value_numbers(func, optimizations=self.optimizations, reorder_operands=True)
        changes = vt.folded + vt.simplified + vt.reordered
        return PassResult(self.name, func.name, changes > 0,
                          {'folded': vt.folded, 'simplified': vt.simplified,
                           'reordered': vt.reordered}, [])
