"""
Critical Edge Splitting

An edge is critical when its source has several successors and its target
several predecessors. Each such edge gets a fresh block holding only a jump,
giving PRE a place to insert code on that edge alone.
"""

from typing import List, Tuple

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.ir.core import Block, Function, Instruction, NameAllocator
from vnlcm.passes.base import PassBase, PassResult


def critical_edges(func: Function) -> List[Tuple[str, str]]:
    cfg = analyze_cfg(func)
    return [
        (source, target)
        for source in func.labels()
        if len(cfg.succs[source]) > 1
        for target in cfg.succs[source]
        if len(cfg.preds[target]) > 1
    ]


def split_critical_edges(func: Function) -> Tuple[Function, int]:
    """Split every critical edge of ``func`` in place.

    Returns:
        The function and the number of edges split
    """
    names = NameAllocator(func)
    edges = critical_edges(func)
    for source, target in edges:
        label = names.label(f"{source}.{target}")
        split = Block(label=label, terminator=Instruction('jmp', labels=[target]))
        func.block(source).retarget_successor(target, label)
        func.block(target).retarget_incoming(source, label)
        func.insert_block_after(source, split)
    return func, len(edges)


class SplitCriticalEdgesPass(PassBase):
    name = 'split-crit'

    def run_on_function(self, func: Function) -> PassResult:
        _, count = split_critical_edges(func)
        return self._result(func, count > 0, [], edges_split=count)
