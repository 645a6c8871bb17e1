"""
Stack Slot Promotion

Promotes allocas that are only ever used as the pointer of whole-slot loads
and stores into SSA values. Phis are placed at the iterated dominance
frontier of the storing blocks, restricted to blocks where the slot is live
on entry (pruned SSA); loads are then rewritten by a walk over the
dominator tree.
"""

import logging
from typing import Dict, List, Optional, Set, Tuple

from vnlcm.analysis.cfg import CfgInfo, analyze_cfg, iterated_dominance_frontier
from vnlcm.analysis.dataflow import BitVector, DataflowSpec, Direction, solve, union
from vnlcm.ir.core import Const, Function, Instruction, NameAllocator, Operand, Var
from vnlcm.passes.base import PassBase, PassResult


logger = logging.getLogger('vnlcm.passes.mem2reg')


def promotable_allocas(func: Function) -> List[str]:
    """Names of allocas whose address never escapes."""
    allocas = [instr.result for _, instr in func.instructions() if instr.opcode == 'alloca']
    escaping: Set[str] = set()
    for _, instr in func.instructions():
        for position, operand in enumerate(instr.operands):
            if not isinstance(operand, Var):
                continue
            if instr.opcode == 'load' and position == 0:
                continue
            if instr.opcode == 'store' and position == 1:
                continue
            escaping.add(operand.name)
    return [name for name in allocas if name not in escaping]


def _slot_liveness(func: Function, cfg: CfgInfo, slots: List[str]) -> Dict[str, BitVector]:
    """Live-in slots per block: read before any store on some path."""
    index = {name: i for i, name in enumerate(slots)}
    width = len(slots)
    upward: Dict[str, BitVector] = {}
    killed: Dict[str, BitVector] = {}
    for label in cfg.rpo:
        use, kill = set(), set()
        for instr in func.block(label).body:
            if instr.opcode == 'load' and isinstance(instr.operands[0], Var):
                slot = index.get(instr.operands[0].name)
                if slot is not None and slot not in kill:
                    use.add(slot)
            elif instr.opcode == 'store' and isinstance(instr.operands[1], Var):
                slot = index.get(instr.operands[1].name)
                if slot is not None:
                    kill.add(slot)
        upward[label] = BitVector.from_slots(width, use)
        killed[label] = BitVector.from_slots(width, kill)
    empty = BitVector.empty(width)
    spec = DataflowSpec(
        name='slot-liveness',
        direction=Direction.BACKWARD,
        alpha=lambda b: empty,
        beta=lambda s, sol: sol.in_of[s],
        gamma=lambda b, sol: upward[b] | (sol.out_of[b] - killed[b]),
        meet=union,
        bottom=empty,
        top=empty,
    )
    return solve(func, cfg, spec).in_of


def mem2reg_promote(func: Function, diagnostics: Optional[List[str]] = None) -> Function:
    """Promote non-escaping allocas of ``func`` in place.

    A load that no store reaches reads 0 and produces a diagnostic.

    Args:
        func: Function to transform
        diagnostics: Optional list receiving warnings

    Returns:
        The transformed function
    """
    _promote(func, diagnostics)
    return func


def _promote(func: Function, diagnostics: Optional[List[str]]) -> Tuple[int, int]:
    slots = promotable_allocas(func)
    if not slots:
        return 0, 0
    cfg = analyze_cfg(func)
    names = NameAllocator(func)
    live_in = _slot_liveness(func, cfg, slots)
    slot_set = set(slots)

    phi_slot: Dict[int, str] = {}
    phis_added = 0
    for index, slot in enumerate(slots):
        stores = {
            label for label in cfg.rpo
            for instr in func.block(label).body
            if instr.opcode == 'store' and instr.operands[1] == Var(slot)
        }
        for label in sorted(iterated_dominance_frontier(cfg, stores), key=cfg.rpo_index.get):
            if index not in live_in[label]:
                continue
            block = func.block(label)
            phi = Instruction('phi', [Const(0)] * len(cfg.preds[label]),
                              result=names.name(f"{slot}.phi"), labels=list(cfg.preds[label]))
            block.phis.append(phi)
            phi_slot[id(phi)] = slot
            phis_added += 1

    replacements: Dict[str, Operand] = {}
    warned: Set[str] = set()

    def read_default(slot: str, where: str) -> Operand:
        if slot not in warned:
            warned.add(slot)
            message = f"load of never-stored slot '%{slot}' in @{func.name}/{where} reads 0"
            logger.warning(message)
            if diagnostics is not None:
                diagnostics.append(message)
        return Const(0)

    # Iterative dominator-tree walk carrying the current value of every slot.
    initial: Dict[str, Optional[Operand]] = {slot: None for slot in slots}
    stack: List[Tuple[str, Dict[str, Optional[Operand]]]] = [(cfg.entry, initial)]
    while stack:
        label, incoming = stack.pop()
        current = dict(incoming)
        block = func.block(label)
        for phi in block.phis:
            slot = phi_slot.get(id(phi))
            if slot is not None:
                current[slot] = Var(phi.result)
        kept: List[Instruction] = []
        for instr in block.body:
            if instr.opcode == 'alloca' and instr.result in slot_set:
                continue
            if instr.opcode == 'store' and isinstance(instr.operands[1], Var) \
                    and instr.operands[1].name in slot_set:
                current[instr.operands[1].name] = instr.operands[0]
                continue
            if instr.opcode == 'load' and isinstance(instr.operands[0], Var) \
                    and instr.operands[0].name in slot_set:
                slot = instr.operands[0].name
                value = current[slot]
                replacements[instr.result] = value if value is not None else read_default(slot, label)
                continue
            kept.append(instr)
        block.body = kept
        for succ in cfg.succs[label]:
            for phi in func.block(succ).phis:
                slot = phi_slot.get(id(phi))
                if slot is None:
                    continue
                value = current[slot]
                for position, pred in enumerate(phi.labels):
                    if pred == label:
                        phi.operands[position] = value if value is not None else read_default(slot, succ)
        for child in reversed(cfg.children[label]):
            stack.append((child, current))

    # Allocas and accesses in unreachable blocks go away with the slot.
    for label in cfg.unreachable:
        block = func.block(label)
        for instr in block.body:
            if instr.opcode == 'load' and instr.operands[0] in [Var(s) for s in slots]:
                replacements[instr.result] = Const(0)
        block.body = [
            instr for instr in block.body
            if not (instr.opcode == 'alloca' and instr.result in slot_set)
            and not (instr.opcode in ('load', 'store')
                     and instr.operands[-1] in [Var(s) for s in slots])
        ]

    def resolve(operand: Operand) -> Operand:
        seen = set()
        while isinstance(operand, Var) and operand.name in replacements and operand.name not in seen:
            seen.add(operand.name)
            operand = replacements[operand.name]
        return operand

    for _, instr in func.instructions():
        instr.operands = [resolve(o) for o in instr.operands]
    logger.debug(f"@{func.name}: promoted {len(slots)} slot(s), {phis_added} phi(s)")
    return len(slots), phis_added


class Mem2RegPass(PassBase):
    name = 'mem2reg'

    def run_on_function(self, func: Function) -> PassResult:
        diagnostics: List[str] = []
        promoted, phis = _promote(func, diagnostics)
        return PassResult(self.name, func.name, promoted > 0,
                          {'promoted': promoted, 'phis_inserted': phis}, diagnostics)
