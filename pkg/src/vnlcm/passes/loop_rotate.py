"""
Loop Rotation

Turns while-shaped loops (exit test in the header) into guarded do-while
loops. The instructions the exit test depends on are duplicated into a guard
in front of the loop and into the latch; the rest of the header moves to the
top of the loop body. A fresh preheader sits between the guard and the loop
body so later passes have a safe place to hoist into.

Before::

    P -> H(test) -> B ... L -> H,  H -> X

After::

    P -> G(test) -> PH -> B ... L(test) -> B,  G -> EX,  L -> EX,  EX -> X

Duplicated values defined in H become phis in B (same names) and, when used
after the loop, phis in EX. Divisions stay in the duplicated part, as do
values read by phis of B or by code after the loop.
"""

import logging
from typing import Dict, List, Optional, Set

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.analysis.loops import Loop, LoopInfo, find_natural_loops
from vnlcm.ir.core import (
    Block, Const, Function, Instruction, NameAllocator, Operand, Var,
)
from vnlcm.passes.base import PassBase, PassResult


logger = logging.getLogger('vnlcm.passes.loop_rotate')

_DUPLICABLE = frozenset(('add', 'sub', 'mul', 'div', 'and', 'or', 'xor', 'cmp', 'const'))

# Bottom-tested (do-while) loops are left alone without a diagnostic.
NOT_TOP_TESTED = "loop is not top-tested"


def _substitute(operand: Operand, mapping: Dict[str, Operand]) -> Operand:
    if isinstance(operand, Var) and operand.name in mapping:
        return mapping[operand.name]
    return operand


def _clone_chain(chain: List[Instruction], mapping: Dict[str, Operand],
                 names: NameAllocator, suffix: str) -> List[Instruction]:
    """Clone header instructions, extending ``mapping`` with the new names."""
    clones = []
    for instr in chain:
        clone = instr.clone(result=names.name(f"{instr.result}.{suffix}"))
        clone.operands = [_substitute(o, mapping) for o in clone.operands]
        mapping[instr.result] = Var(clone.result)
        clones.append(clone)
    return clones


def _exit_test_chain(func: Function, loop: Loop, first: str) -> List[Instruction]:
    """Header body instructions the guard and latch copies must recompute."""
    header = func.block(loop.header)
    local = {instr.result: instr for instr in header.body}
    needed: Set[str] = set(header.terminator.uses())
    needed.update(instr.result for instr in header.body if instr.opcode == 'div')
    for phi in func.block(first).phis:
        needed.update(phi.uses())
    for block in func.blocks:
        if block.label not in loop.body:
            for instr in block.instructions():
                needed.update(instr.uses())
    worklist = [name for name in needed if name in local]
    while worklist:
        for name in local[worklist.pop()].uses():
            if name in local and name not in needed:
                needed.add(name)
                worklist.append(name)
    return [instr for instr in header.body if instr.result in needed]


def _rotation_blocker(func: Function, loop: Loop, cfg) -> Optional[str]:
    """Reason the loop cannot be rotated, or None."""
    header = func.block(loop.header)
    term = header.terminator
    in_loop = [t for t in term.labels if t in loop.body]
    if len(in_loop) != 1 or len(term.labels) != 2:
        return NOT_TOP_TESTED
    if loop.header in loop.latches:
        return NOT_TOP_TESTED
    for instr in header.body:
        if instr.opcode not in _DUPLICABLE:
            return f"header has side-effecting instruction '{instr.text()}'"
    outside = [p for p in cfg.reachable_preds(loop.header) if p not in loop.body]
    if len(outside) != 1:
        return "header has no unique predecessor outside the loop"
    if len(loop.latches) != 1:
        return "loop has several latches"
    latch = next(iter(loop.latches))
    latch_term = func.block(latch).terminator
    if latch_term.opcode != 'jmp':
        return "latch does not end in an unconditional jump"
    first = in_loop[0]
    if cfg.preds[first] != [loop.header]:
        return f"loop entry block '{first}' has other predecessors"
    for label in loop.body:
        for succ in cfg.succs[label]:
            if succ not in loop.body and label != loop.header:
                return f"loop has a second exit edge {label} -> {succ}"
    return None


def _rotate(func: Function, loop: Loop, cfg) -> List[str]:
    """Rotate one loop in place; returns labels of the new blocks."""
    names = NameAllocator(func)
    header = func.block(loop.header)
    term = header.terminator
    pre_label = next(p for p in cfg.reachable_preds(loop.header) if p not in loop.body)
    latch_label = next(iter(loop.latches))
    latch = func.block(latch_label)
    first = next(t for t in term.labels if t in loop.body)
    exit_label = next(t for t in term.labels if t not in loop.body)
    first_block = func.block(first)

    guard_label = names.label(f"{loop.header}.guard")
    ph_label = names.label(f"{loop.header}.ph")
    ex_label = names.label(f"{loop.header}.exit")

    # Values of header-defined names on entry (guard) and on the back edge (latch).
    on_entry: Dict[str, Operand] = {}
    on_latch: Dict[str, Operand] = {}
    for phi in header.phis:
        on_entry[phi.result] = phi.incoming_value(pre_label)
        on_latch[phi.result] = phi.incoming_value(latch_label)
    chain = _exit_test_chain(func, loop, first)
    moved = [instr for instr in header.body if not any(instr is kept for kept in chain)]
    guard_chain = _clone_chain(chain, on_entry, names, 'g')
    latch_chain = _clone_chain(chain, on_latch, names, 'l')

    cond_entry = _substitute(term.operands[0], on_entry)
    cond_latch = _substitute(term.operands[0], on_latch)
    taken_first = term.labels[0] == first

    def branch(cond: Operand, stay: str) -> Instruction:
        targets = [stay, ex_label] if taken_first else [ex_label, stay]
        return Instruction('br', [cond], labels=targets)

    guard = Block(guard_label, body=guard_chain, terminator=branch(cond_entry, ph_label))
    preheader = Block(ph_label, terminator=Instruction('jmp', labels=[first]))

    latch.body.extend(latch_chain)
    latch.terminator = branch(cond_latch, first)

    defined = [phi.result for phi in header.phis] + [i.result for i in chain]
    first_block.body[0:0] = moved

    # Existing single-incoming phis of the loop entry block now merge two edges.
    for phi in first_block.phis:
        value = phi.incoming_value(loop.header)
        phi.labels = [ph_label, latch_label]
        phi.operands = [_substitute(value, on_entry), _substitute(value, on_latch)]
    first_block.phis[0:0] = [
        Instruction('phi', [on_entry[name], on_latch[name]], result=name,
                    labels=[ph_label, latch_label])
        for name in defined
    ]

    # Header values used after the loop flow through phis in the exit block.
    exit_phis: List[Instruction] = []
    outside = [b for b in func.blocks if b.label not in loop.body]
    for name in defined:
        used_outside = any(
            name in instr.uses() for b in outside for instr in b.instructions()
        )
        if not used_outside:
            continue
        merged = names.name(f"{name}.x")
        exit_phis.append(Instruction('phi', [on_entry[name], on_latch[name]], result=merged,
                                     labels=[guard_label, latch_label]))
        for block in outside:
            for instr in block.instructions():
                instr.replace_operand(name, Var(merged))
    exit_block = Block(ex_label, phis=exit_phis, terminator=Instruction('jmp', labels=[exit_label]))
    func.block(exit_label).retarget_incoming(loop.header, ex_label)

    func.block(pre_label).retarget_successor(loop.header, guard_label)
    index = func.labels().index(loop.header)
    func.blocks[index:index + 1] = [guard, preheader]
    func.insert_block_after(latch_label, exit_block)
    return [guard_label, ph_label, ex_label, first]


def rotate_loops(func: Function, loops: Optional[LoopInfo] = None,
                 diagnostics: Optional[List[str]] = None) -> Function:
    """Rotate every eligible while-shaped loop of ``func`` in place.

    Loops are handled one at a time, innermost first, with CFG and loop
    information recomputed after each rotation. Bottom-tested loops are left
    alone; other loops that cannot be rotated produce a diagnostic.

    Args:
        func: Function to transform
        loops: Loop information for the current ``func`` (recomputed if None)
        diagnostics: Optional list receiving skip reasons

    Returns:
        The rotated function
    """
    _rotate_all(func, loops, diagnostics)
    return func


def _rotate_all(func: Function, loops: Optional[LoopInfo],
                diagnostics: Optional[List[str]]) -> int:
    attempted: Set[str] = set()
    rotated = 0
    while True:
        cfg = analyze_cfg(func)
        info = loops if loops is not None else find_natural_loops(func, cfg)
        loops = None
        candidate = None
        for loop in info.innermost_first():
            if loop.header in attempted:
                continue
            attempted.add(loop.header)
            reason = _rotation_blocker(func, loop, cfg)
            if reason is None:
                candidate = loop
                break
            if reason != NOT_TOP_TESTED:
                message = f"loop-rotate skipped loop at '{loop.header}' in @{func.name}: {reason}"
                logger.warning(message)
                if diagnostics is not None:
                    diagnostics.append(message)
        if candidate is None:
            return rotated
        created = _rotate(func, candidate, cfg)
        attempted.update(created)
        rotated += 1
        logger.debug(f"Rotated loop at '{candidate.header}' in @{func.name}")


class LoopRotatePass(PassBase):
    name = 'loop-rotate'

    def run_on_function(self, func: Function) -> PassResult:
        diagnostics: List[str] = []
        rotated = _rotate_all(func, None, diagnostics)
        return PassResult(self.name, func.name, rotated > 0,
                          {'loops_rotated': rotated}, diagnostics)
