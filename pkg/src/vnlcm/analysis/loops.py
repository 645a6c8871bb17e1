"""
Natural Loop Detection

Finds natural loops from back edges (edges whose target dominates their
source), merges bodies per header, and records preheaders and nesting depth.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from vnlcm.analysis.cfg import CfgInfo
from vnlcm.ir.core import Function


logger = logging.getLogger('vnlcm.analysis.loops')


@dataclass
class Loop:
    header: str
    body: FrozenSet[str]
    latches: FrozenSet[str]
    preheader: Optional[str] = None
    depth: int = 1

    def contains(self, label: str) -> bool:
        return label in self.body


@dataclass
class LoopInfo:
    loops: List[Loop] = field(default_factory=list)
    loop_depth: Dict[str, int] = field(default_factory=dict)

    def loop_of(self, header: str) -> Optional[Loop]:
        for loop in self.loops:
            if loop.header == header:
                return loop
        return None

    def in_loop(self, label: str) -> bool:
        return self.loop_depth.get(label, 0) > 0

    def innermost_first(self) -> List[Loop]:
        return sorted(self.loops, key=lambda loop: -loop.depth)


def find_natural_loops(func: Function, cfg: CfgInfo,
                       diagnostics: Optional[List[str]] = None) -> LoopInfo:
    """Detect natural loops.

    Retreating edges whose target does not dominate their source make the
    region irreducible; they are reported and contribute no loop.

    Args:
        func: Function the CFG snapshot was computed from
        cfg: Current CfgInfo of ``func``
        diagnostics: Optional list receiving warnings

    Returns:
        LoopInfo with loops ordered by header RPO position
    """
    latches: Dict[str, List[str]] = {}
    for source in cfg.rpo:
        for target in cfg.succs[source]:
            if not cfg.is_reachable(target):
                continue
            if cfg.dominates(target, source):
                latches.setdefault(target, []).append(source)
            elif cfg.rpo_index[target] <= cfg.rpo_index[source]:
                message = (f"irreducible edge {source} -> {target} in @{func.name}; "
                           f"no loop recorded for it")
                logger.warning(message)
                if diagnostics is not None:
                    diagnostics.append(message)

    loops: List[Loop] = []
    for header in sorted(latches, key=lambda label: cfg.rpo_index[label]):
        body = {header}
        worklist = [l for l in latches[header] if l != header]
        body.update(worklist)
        while worklist:
            label = worklist.pop()
            for pred in cfg.reachable_preds(label):
                if pred not in body:
                    body.add(pred)
                    worklist.append(pred)
        outside = [p for p in cfg.reachable_preds(header) if p not in body]
        preheader = None
        if len(outside) == 1 and cfg.succs[outside[0]] == [header]:
            preheader = outside[0]
        loops.append(Loop(header=header, body=frozenset(body),
                          latches=frozenset(latches[header]), preheader=preheader))

    depth = {label: 0 for label in cfg.rpo}
    for loop in loops:
        for label in loop.body:
            depth[label] += 1
    for loop in loops:
        loop.depth = depth[loop.header]
    logger.debug(f"@{func.name}: {len(loops)} natural loop(s)")
    return LoopInfo(loops=loops, loop_depth=depth)
