"""
Control Flow Graph Analysis

Predecessor/successor maps, reverse post-order, immediate dominators
(Cooper-Harvey-Kennedy iteration) and dominance frontiers.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Set

from vnlcm.ir.core import Function


logger = logging.getLogger('vnlcm.analysis.cfg')


@dataclass
class CfgInfo:
    """Structural facts about one function snapshot.

    ``preds``/``succs`` cover every block; ``rpo``, ``idom`` and ``df`` cover
    reachable blocks only. The entry block is its own immediate dominator.
    """
    entry: str
    preds: Dict[str, List[str]]
    succs: Dict[str, List[str]]
    rpo: List[str]
    idom: Dict[str, str]
    df: Dict[str, Set[str]]
    unreachable: List[str] = field(default_factory=list)
    rpo_index: Dict[str, int] = field(init=False)
    children: Dict[str, List[str]] = field(init=False)

    def __post_init__(self):
        self.rpo_index = {label: i for i, label in enumerate(self.rpo)}
        self.children = {label: [] for label in self.rpo}
        for label in self.rpo[1:]:
            self.children[self.idom[label]].append(label)

    def is_reachable(self, label: str) -> bool:
        return label in self.rpo_index

    def reachable_preds(self, label: str) -> List[str]:
        return [p for p in self.preds.get(label, []) if p in self.rpo_index]

    def dominates(self, a: str, b: str) -> bool:
        """True if ``a`` dominates ``b`` (reflexive)."""
        if a not in self.rpo_index or b not in self.rpo_index:
            return False
        node = b
        while True:
            if node == a:
                return True
            parent = self.idom[node]
            if parent == node:
                return False
            node = parent

    def strictly_dominates(self, a: str, b: str) -> bool:
        return a != b and self.dominates(a, b)

    def exits(self) -> List[str]:
        return [label for label in self.rpo if not self.succs[label]]

    def dom_tree_preorder(self) -> Iterator[str]:
        stack = [self.entry]
        while stack:
            label = stack.pop()
            yield label
            stack.extend(reversed(self.children[label]))


def _reverse_post_order(entry: str, succs: Dict[str, List[str]]) -> List[str]:
    # Successors are pushed last-first so earlier terminator targets come
    # earlier in the resulting order.
    visited = {entry}
    postorder: List[str] = []
    stack = [(entry, iter(reversed(succs[entry])))]
    while stack:
        label, pending = stack[-1]
        for succ in pending:
            if succ not in visited:
                visited.add(succ)
                stack.append((succ, iter(reversed(succs[succ]))))
                break
        else:
            stack.pop()
            postorder.append(label)
    return postorder[::-1]


def _immediate_dominators(rpo: List[str], preds: Dict[str, List[str]]) -> Dict[str, str]:
    index = {label: i for i, label in enumerate(rpo)}
    entry = rpo[0]
    idom: Dict[str, str] = {entry: entry}

    def intersect(a: str, b: str) -> str:
        while a != b:
            while index[a] > index[b]:
                a = idom[a]
            while index[b] > index[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for label in rpo[1:]:
            processed = [p for p in preds[label] if p in idom]
            if not processed:
                continue
            new_idom = processed[0]
            for pred in processed[1:]:
                new_idom = intersect(pred, new_idom)
            if idom.get(label) != new_idom:
                idom[label] = new_idom
                changed = True
    return idom


def _dominance_frontiers(rpo: List[str], preds: Dict[str, List[str]],
                         idom: Dict[str, str]) -> Dict[str, Set[str]]:
    df: Dict[str, Set[str]] = {label: set() for label in rpo}
    for label in rpo:
        reachable = [p for p in preds[label] if p in idom]
        if len(reachable) < 2:
            continue
        for pred in reachable:
            runner = pred
            while runner != idom[label]:
                df[runner].add(label)
                if runner == idom[runner]:
                    break
                runner = idom[runner]
    return df


def analyze_cfg(func: Function, diagnostics: Optional[List[str]] = None) -> CfgInfo:
    """Compute CFG facts for a function.

    Args:
        func: Function to analyze (must have terminators on every block)
        diagnostics: Optional list receiving a warning per unreachable block

    Returns:
        CfgInfo snapshot; stale after any transformation
    """
    labels = func.labels()
    succs: Dict[str, List[str]] = {}
    preds: Dict[str, List[str]] = {label: [] for label in labels}
    for block in func.blocks:
        succs[block.label] = [s for s in block.successors() if s in preds]
    for block in func.blocks:
        for succ in succs[block.label]:
            if block.label not in preds[succ]:
                preds[succ].append(block.label)

    rpo = _reverse_post_order(func.entry, succs)
    idom = _immediate_dominators(rpo, preds)
    df = _dominance_frontiers(rpo, preds, idom)
    reachable = set(rpo)
    unreachable = [label for label in labels if label not in reachable]
    for label in unreachable:
        message = f"unreachable block '{label}' in @{func.name}"
        logger.warning(message)
        if diagnostics is not None:
            diagnostics.append(message)
    return CfgInfo(
        entry=func.entry, preds=preds, succs=succs, rpo=rpo,
        idom=idom, df=df, unreachable=unreachable,
    )


def iterated_dominance_frontier(cfg: CfgInfo, blocks: Set[str]) -> Set[str]:
    """DF+ of a set of blocks (phi placement sites)."""
    result: Set[str] = set()
    worklist = [b for b in blocks if b in cfg.df]
    seen = set(worklist)
    while worklist:
        label = worklist.pop()
        for frontier in cfg.df[label]:
            if frontier not in result:
                result.add(frontier)
                if frontier not in seen:
                    seen.add(frontier)
                    worklist.append(frontier)
    return result


def brute_force_dominators(cfg: CfgInfo) -> Dict[str, Set[str]]:
    """Dom(b) = {b} | intersection of Dom(p) over preds, iterated to a fixpoint.

    Slow reference used to cross-check ``idom``.
    """
    everything = set(cfg.rpo)
    dom = {label: set(everything) for label in cfg.rpo}
    dom[cfg.entry] = {cfg.entry}
    changed = True
    while changed:
        changed = False
        for label in cfg.rpo[1:]:
            preds = cfg.reachable_preds(label)
            new = set(everything)
            for pred in preds:
                new &= dom[pred]
            new |= {label}
            if new != dom[label]:
                dom[label] = new
                changed = True
    return dom
