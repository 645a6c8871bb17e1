"""
Bit-Vector Dataflow Framework

One iterative solver parameterized by the plug-ins alpha, beta, gamma, a meet
operator, a boundary value and an initial value. Forward problems compute

    IN(b)  = alpha(b) | (bottom if b is the entry else MEET_p beta(p))
    OUT(b) = gamma(b)

and backward problems mirror this over successors, with ``bottom`` applied
at blocks without successors. ``beta`` and ``gamma`` are closures over the
evolving Solution, so one spec can refer to its own sets.
"""

import enum
import logging
import operator
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from vnlcm.analysis.cfg import CfgInfo
from vnlcm.errors import DataflowConvergenceError
from vnlcm.ir.core import Function


logger = logging.getLogger('vnlcm.analysis.dataflow')


class BitVector:
    """Fixed-width immutable set of slot indices backed by a numpy bool array."""

    __slots__ = ('bits',)

    def __init__(self, bits: np.ndarray):
        self.bits = np.asarray(bits, dtype=bool)
        self.bits.setflags(write=False)

    @classmethod
    def empty(cls, width: int) -> 'BitVector':
        return cls(np.zeros(width, dtype=bool))

    @classmethod
    def universe(cls, width: int) -> 'BitVector':
        return cls(np.ones(width, dtype=bool))

    @classmethod
    def from_slots(cls, width: int, slots: Iterable[int]) -> 'BitVector':
        bits = np.zeros(width, dtype=bool)
        for slot in slots:
            bits[slot] = True
        return cls(bits)

    @classmethod
    def from_string(cls, text: str) -> 'BitVector':
        return cls(np.array([c == '1' for c in text], dtype=bool))

    @property
    def width(self) -> int:
        return int(self.bits.shape[0])

    def _check(self, other: 'BitVector') -> None:
        if other.width != self.width:
            raise ValueError(f"Bit vector width mismatch: {self.width} != {other.width}")

    def __and__(self, other: 'BitVector') -> 'BitVector':
        self._check(other)
        return BitVector(self.bits & other.bits)

    def __or__(self, other: 'BitVector') -> 'BitVector':
        self._check(other)
        return BitVector(self.bits | other.bits)

    def __sub__(self, other: 'BitVector') -> 'BitVector':
        self._check(other)
        return BitVector(self.bits & ~other.bits)

    def __invert__(self) -> 'BitVector':
        return BitVector(~self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.width == other.width and bool(np.array_equal(self.bits, other.bits))

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None  # type: ignore[assignment]

    def __le__(self, other: 'BitVector') -> bool:
        """Subset test."""
        self._check(other)
        return not bool(np.any(self.bits & ~other.bits))

    def __contains__(self, slot: int) -> bool:
        return bool(self.bits[slot])

    def is_empty(self) -> bool:
        return not bool(self.bits.any())

    def count(self) -> int:
        return int(self.bits.sum())

    def slots(self) -> List[int]:
        return [int(i) for i in np.flatnonzero(self.bits)]

    def to_string(self) -> str:
        return ''.join('1' if b else '0' for b in self.bits)

    def __repr__(self) -> str:
        return f"BitVector('{self.to_string()}')"


intersection = operator.and_
union = operator.or_


class Direction(enum.Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'


@dataclass
class Solution:
    in_of: Dict[str, BitVector] = field(default_factory=dict)
    out_of: Dict[str, BitVector] = field(default_factory=dict)
    visits: int = 0

    def copy(self) -> 'Solution':
        return Solution(dict(self.in_of), dict(self.out_of), self.visits)

    def same_sets(self, other: 'Solution') -> bool:
        return (self.in_of.keys() == other.in_of.keys()
                and all(self.in_of[b] == other.in_of[b] for b in self.in_of)
                and all(self.out_of[b] == other.out_of[b] for b in self.out_of))


@dataclass
class DataflowSpec:
    """Plug-ins for one analysis.

    ``beta(p, sol)`` gives the contribution of a neighbour (predecessor for
    forward, successor for backward) and ``gamma(b, sol)`` the set on the far
    side of the block, computed from the freshly updated near side.
    """
    name: str
    direction: Direction
    alpha: Callable[[str], BitVector]
    beta: Callable[[str, Solution], BitVector]
    gamma: Callable[[str, Solution], BitVector]
    meet: Callable[[BitVector, BitVector], BitVector]
    bottom: BitVector
    top: BitVector

    @property
    def width(self) -> int:
        return self.top.width


def _neighbours(cfg: CfgInfo, label: str, direction: Direction) -> List[str]:
    if direction is Direction.FORWARD:
        return cfg.reachable_preds(label)
    return cfg.succs[label]


def _dependents(cfg: CfgInfo, label: str, direction: Direction) -> List[str]:
    if direction is Direction.FORWARD:
        return cfg.succs[label]
    return cfg.reachable_preds(label)


def _visit(cfg: CfgInfo, spec: DataflowSpec, sol: Solution, label: str) -> bool:
    """Apply the block equations once; return True if IN or OUT changed."""
    forward = spec.direction is Direction.FORWARD
    near, far = (sol.in_of, sol.out_of) if forward else (sol.out_of, sol.in_of)
    neighbours = _neighbours(cfg, label, spec.direction)
    boundary = (label == cfg.entry) if forward else not neighbours
    if boundary or not neighbours:
        confluence = spec.bottom
    else:
        confluence = reduce(spec.meet, (spec.beta(n, sol) for n in neighbours))
    new_near = spec.alpha(label) | confluence
    old_near = near[label]
    near[label] = new_near
    new_far = spec.gamma(label, sol)
    old_far = far[label]
    far[label] = new_far
    return new_near != old_near or new_far != old_far


def _initial(cfg: CfgInfo, spec: DataflowSpec) -> Solution:
    return Solution(
        in_of={label: spec.top for label in cfg.rpo},
        out_of={label: spec.top for label in cfg.rpo},
    )


def visit_limit(cfg: CfgInfo, spec: DataflowSpec) -> int:
    # Each set can lose or gain each bit once; every change re-queues at most
    # two neighbours per edge.
    return len(cfg.rpo) * (4 * max(spec.width, 1) + 1)


def solve(func: Function, cfg: CfgInfo, spec: DataflowSpec,
          order: Optional[Sequence[str]] = None) -> Solution:
    """Worklist solver.

    Args:
        func: Function being analyzed
        cfg: Current CfgInfo for ``func``
        spec: Analysis plug-ins
        order: Initial worklist order (defaults to RPO for forward problems
            and reverse RPO for backward ones)

    Returns:
        Fixpoint reached from ``top``

    Raises:
        DataflowConvergenceError: If the visit limit is exceeded
    """
    sol = _initial(cfg, spec)
    if order is None:
        order = cfg.rpo if spec.direction is Direction.FORWARD else cfg.rpo[::-1]
    worklist = deque(label for label in order if cfg.is_reachable(label))
    queued = set(worklist)
    limit = visit_limit(cfg, spec)
    while worklist:
        label = worklist.popleft()
        queued.discard(label)
        sol.visits += 1
        if sol.visits > limit:
            raise DataflowConvergenceError(
                f"{spec.name} on @{func.name} did not converge after {limit} block visits"
            )
        if _visit(cfg, spec, sol, label):
            for dependent in _dependents(cfg, label, spec.direction):
                if dependent not in queued:
                    worklist.append(dependent)
                    queued.add(dependent)
    logger.debug(f"{spec.name} on @{func.name}: {sol.visits} visits, width {spec.width}")
    return sol


def solve_round_robin(func: Function, cfg: CfgInfo, spec: DataflowSpec) -> Solution:
    """Chaotic iteration from ``top``: sweep all blocks until nothing changes.

    Reference solver used to cross-check ``solve``.
    """
    sol = _initial(cfg, spec)
    limit = visit_limit(cfg, spec) * max(len(cfg.rpo), 1)
    changed = True
    while changed:
        changed = False
        for label in cfg.rpo:
            sol.visits += 1
            if _visit(cfg, spec, sol, label):
                changed = True
        if sol.visits > limit:
            raise DataflowConvergenceError(
                f"{spec.name} on @{func.name} did not converge under round-robin iteration"
            )
    return sol


def is_fixpoint(cfg: CfgInfo, spec: DataflowSpec, sol: Solution) -> bool:
    """True if one more application of every block equation changes nothing."""
    trial = sol.copy()
    changed = False
    for label in cfg.rpo:
        changed |= _visit(cfg, spec, trial, label)
    return not changed and trial.same_sets(sol)
