"""
CFG Simplification

Cleans up after the other passes, repeating until nothing changes:

- branches on literal conditions or to one target become jumps
- unreachable blocks are removed
- phis with a single incoming value, or all-equal incomings, are replaced
- a block is merged into its unique predecessor when that predecessor has
  no other successor
- jump-only blocks are bypassed when the successor's phis allow it
- dead pure instructions are swept (mark from side effects and terminators)
"""

import logging
from typing import Dict, List, Set, Tuple

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.ir.core import CANDIDATE_OPCODES, Const, Function, Instruction, Operand, Var
from vnlcm.passes.base import PassBase, PassResult


logger = logging.getLogger('vnlcm.passes.simplify_cfg')


def is_removable(instr: Instruction) -> bool:
    """Pure instructions that may be deleted when unused.

    Divisions count only when the divisor is a non-zero literal, so a
    possible trap is never removed.
    """
    if instr.opcode == 'div':
        divisor = instr.operands[1]
        return isinstance(divisor, Const) and divisor.value != 0
    return instr.opcode in CANDIDATE_OPCODES or instr.opcode in ('const', 'phi', 'load', 'alloca')


def _fold_branches(func: Function) -> int:
    folded = 0
    for block in func.blocks:
        term = block.terminator
        if term.opcode != 'br':
            continue
        cond = term.operands[0]
        if term.labels[0] == term.labels[1]:
            target, dropped = term.labels[0], None
        elif isinstance(cond, Const):
            target = term.labels[0] if cond.value != 0 else term.labels[1]
            dropped = term.labels[1] if cond.value != 0 else term.labels[0]
        else:
            continue
        block.terminator = Instruction('jmp', labels=[target])
        if dropped is not None:
            _drop_incoming(func, dropped, block.label)
        folded += 1
    return folded


def _drop_incoming(func: Function, label: str, pred: str) -> None:
    for phi in func.block(label).phis:
        pairs = [(l, v) for l, v in phi.incoming() if l != pred]
        phi.labels = [l for l, _ in pairs]
        phi.operands = [v for _, v in pairs]


def _remove_unreachable(func: Function) -> int:
    cfg = analyze_cfg(func)
    dead = set(cfg.unreachable)
    if not dead:
        return 0
    for label in cfg.rpo:
        for phi in func.block(label).phis:
            pairs = [(l, v) for l, v in phi.incoming() if l not in dead]
            phi.labels = [l for l, _ in pairs]
            phi.operands = [v for _, v in pairs]
    func.blocks = [b for b in func.blocks if b.label not in dead]
    return len(dead)


def _simplify_phis(func: Function) -> int:
    removed = 0
    for block in func.blocks:
        kept = []
        for phi in block.phis:
            values = {v for v in phi.operands if v != Var(phi.result)}
            if len(values) == 1:
                value = next(iter(values))
                func.replace_uses(phi.result, value)
                removed += 1
                continue
            kept.append(phi)
        block.phis = kept
    return removed


def _merge_chains(func: Function) -> int:
    merged = 0
    changed = True
    while changed:
        changed = False
        cfg = analyze_cfg(func)
        for block in func.blocks:
            succs = cfg.succs[block.label]
            if len(succs) != 1:
                continue
            succ = succs[0]
            if succ == block.label or succ == func.entry:
                continue
            if cfg.preds[succ] != [block.label]:
                continue
            target = func.block(succ)
            if target.phis:
                continue
            block.body.extend(target.body)
            block.terminator = target.terminator
            for later in target.successors():
                func.block(later).retarget_incoming(succ, block.label)
            func.remove_block(succ)
            merged += 1
            changed = True
            break
    return merged


def _bypass_forwarders(func: Function) -> int:
    """Retarget predecessors of jump-only blocks straight to the destination."""
    bypassed = 0
    changed = True
    while changed:
        changed = False
        cfg = analyze_cfg(func)
        for block in func.blocks:
            if block.label == func.entry or block.phis or block.body:
                continue
            if block.terminator.opcode != 'jmp':
                continue
            dest = block.terminator.labels[0]
            if dest == block.label:
                continue
            preds = cfg.preds[block.label]
            if not preds:
                continue
            dest_block = func.block(dest)
            dest_preds = set(cfg.preds[dest])
            # A predecessor that already reaches dest would need two incomings.
            if dest_block.phis and any(p in dest_preds for p in preds):
                continue
            for phi in dest_block.phis:
                value = phi.incoming_value(block.label)
                pairs = [(l, v) for l, v in phi.incoming() if l != block.label]
                pairs.extend((p, value) for p in preds)
                phi.labels = [l for l, _ in pairs]
                phi.operands = [v for _, v in pairs]
            for pred in preds:
                func.block(pred).retarget_successor(block.label, dest)
            func.remove_block(block.label)
            bypassed += 1
            changed = True
            break
    return bypassed


def sweep_dead_code(func: Function) -> int:
    """Delete pure instructions and phis whose results are never used; returns the count."""
    defs: Dict[str, Instruction] = {}
    for _, instr in func.instructions():
        if instr.result is not None:
            defs[instr.result] = instr
    live: Set[int] = set()
    worklist: List[Instruction] = []
    for _, instr in func.instructions():
        if instr.result is None or not is_removable(instr):
            live.add(id(instr))
            worklist.append(instr)
    while worklist:
        instr = worklist.pop()
        for name in instr.uses():
            definition = defs.get(name)
            if definition is not None and id(definition) not in live:
                live.add(id(definition))
                worklist.append(definition)
    removed = 0
    for block in func.blocks:
        before = len(block.phis) + len(block.body)
        block.phis = [i for i in block.phis if id(i) in live]
        block.body = [i for i in block.body if id(i) in live]
        removed += before - len(block.phis) - len(block.body)
    return removed


def simplify_cfg(func: Function) -> Function:
    """Simplify ``func`` in place until a fixpoint is reached."""
    _simplify(func)
    return func


def _simplify(func: Function) -> Dict[str, int]:
    totals = {'branches_folded': 0, 'blocks_removed': 0, 'phis_removed': 0,
              'blocks_merged': 0, 'blocks_bypassed': 0, 'dead_removed': 0}
    while True:
        step = {
            'branches_folded': _fold_branches(func),
            'blocks_removed': _remove_unreachable(func),
            'phis_removed': _simplify_phis(func),
            'blocks_merged': _merge_chains(func),
            'blocks_bypassed': _bypass_forwarders(func),
            'dead_removed': sweep_dead_code(func),
        }
        for key, value in step.items():
            totals[key] += value
        if not any(step.values()):
            break
    logger.debug(f"simplifycfg on @{func.name}: {totals}")
    return totals


class SimplifyCfgPass(PassBase):
    name = 'simplifycfg'

    def run_on_function(self, func: Function) -> PassResult:
        totals = _simplify(func)
        return PassResult(self.name, func.name, any(totals.values()), totals, [])
