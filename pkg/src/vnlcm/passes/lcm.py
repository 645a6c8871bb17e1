"""
Lazy Code Motion

Partial redundancy elimination over value numbers. The pass

1. splits critical edges and drops unused pure instructions,
2. numbers values and removes same-block duplicates (local CSE),
3. gives a bit-vector slot to every value number worth moving,
4. computes block-local properties and solves the lazy code motion
   equations (down-safety, up-safety, earliest, delayability, latest,
   isolation, insert/replace), and
5. rewrites the function: each transformed value number gets a stack slot,
   insertion points compute and store into it, replaced occurrences load
   from it. A later mem2reg turns the slots back into SSA values.

Per-block sets use the names ANTLOC, TRANSP, XCOMP (local) and
ANTIN/ANTOUT, AVAILIN/AVAILOUT, EARLIN/EARLOUT, DELAYIN/DELAYOUT,
LATESTIN/LATESTOUT, ISOIN/ISOOUT, INSERTIN/INSERTOUT, REPLACEIN/REPLACEOUT.
"""

import enum
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Dict, List, Optional, Tuple

from vnlcm.analysis.cfg import CfgInfo, analyze_cfg
from vnlcm.analysis.dataflow import (
    BitVector, DataflowSpec, Direction, Solution, intersection, is_fixpoint, solve,
    solve_round_robin,
)
from vnlcm.analysis.loops import LoopInfo, find_natural_loops
from vnlcm.errors import DataflowCheckError, PreSafetyError
from vnlcm.ir.core import Block, Const, Function, Instruction, NameAllocator, Var
from vnlcm.passes.base import PassBase, PassResult
from vnlcm.passes.critical_edges import split_critical_edges
from vnlcm.passes.simplify_cfg import sweep_dead_code
from vnlcm.passes.value_numbering import ValueTable, assign_value_numbers


logger = logging.getLogger('vnlcm.passes.lcm')

LOCAL_SETS = ('ANTLOC', 'TRANSP', 'XCOMP')
GLOBAL_SETS = (
    'ANTIN', 'ANTOUT', 'AVAILIN', 'AVAILOUT', 'EARLIN', 'EARLOUT',
    'DELAYIN', 'DELAYOUT', 'LATESTIN', 'LATESTOUT', 'ISOIN', 'ISOOUT',
    'INSERTIN', 'INSERTOUT', 'REPLACEIN', 'REPLACEOUT',
)
ALL_SETS = LOCAL_SETS + GLOBAL_SETS


class Position(enum.Enum):
    ENTRY = 'entry-after-phis'
    EXIT = 'before-terminator'


@dataclass
class SlotMap:
    slot_of: Dict[int, int] = field(default_factory=dict)
    vn_of_slot: List[int] = field(default_factory=list)

    @property
    def width(self) -> int:
        return len(self.vn_of_slot)


@dataclass
class LocalProperties:
    transp: Dict[str, BitVector]
    antloc: Dict[str, BitVector]
    xcomp: Dict[str, BitVector]
    width: int
    barrier: Dict[str, bool] = field(default_factory=dict)


@dataclass
class LcmSets:
    """All per-block vectors plus the specs and solutions that produced them."""
    width: int
    vectors: Dict[str, Dict[str, BitVector]]
    specs: Dict[str, DataflowSpec] = field(default_factory=dict)
    solutions: Dict[str, Solution] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Dict[str, BitVector]:
        return self.vectors[name]


@dataclass
class Insertion:
    block: str
    position: Position
    vn: int
    provider: Optional[Instruction]
    fused: bool = False


@dataclass
class Replacement:
    instruction: Instruction
    vn: int
    slot: str


@dataclass
class PreReport:
    function: str
    max_vn: int = 0
    width: int = 0
    insertions: List[Insertion] = field(default_factory=list)
    replacements: List[Replacement] = field(default_factory=list)
    skipped_vns: List[int] = field(default_factory=list)
    lcse_removed: int = 0
    edges_split: int = 0
    dead_removed: int = 0

    @property
    def width_ratio(self) -> float:
        return self.width / self.max_vn if self.max_vn else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'function': self.function,
            'max_vn': self.max_vn,
            'width': self.width,
            'width_ratio': self.width_ratio,
            'insertions': [
                {
                    'block': ins.block,
                    'position': ins.position.value,
                    'vn': ins.vn,
                    'provider': ins.provider.text() if ins.provider is not None else None,
                    'fused': ins.fused,
                }
                for ins in self.insertions
            ],
            'replacements': [
                {'instruction': rep.instruction.text(), 'vn': rep.vn, 'slot': rep.slot}
                for rep in self.replacements
            ],
            'skipped_vns': list(self.skipped_vns),
            'lcse_removed': self.lcse_removed,
            'edges_split': self.edges_split,
            'dead_removed': self.dead_removed,
        }


# ---------------------------------------------------------------------------
# Local CSE and slot allocation
# ---------------------------------------------------------------------------

def local_cse(func: Function, vt: ValueTable) -> Tuple[Function, int]:
    """Keep only the first occurrence of each value number within a block.

    Later same-block occurrences are deleted and their uses rewired to the
    first one; the value table's occurrence lists are updated.
    """
    removed = 0
    for vn, occurrences in vt.occurrences.items():
        first_in: Dict[str, Instruction] = {}
        kept: List[Instruction] = []
        for instr in occurrences:
            label = vt.block_of[instr]
            first = first_in.get(label)
            if first is None:
                first_in[label] = instr
                kept.append(instr)
                continue
            func.replace_uses(instr.result, Var(first.result))
            func.block(label).body.remove(instr)
            del vt.block_of[instr]
            removed += 1
        vt.occurrences[vn] = kept
    vt.refresh_leaders()
    if removed:
        logger.debug(f"@{func.name}: local CSE removed {removed} instruction(s)")
    return func, removed


def may_trap(instr: Instruction, vt: ValueTable) -> bool:
    """True for a division whose divisor is not known to be a non-zero literal."""
    if instr.opcode != 'div':
        return False
    divisor = vt.vn(instr.operands[1])
    return vt.constant_of.get(divisor, 0) == 0


def allocate_slots(vt: ValueTable, loops: LoopInfo) -> SlotMap:
    """Slot every value number with two or more occurrences, or one inside a loop.

    Possibly trapping divisions never get a slot.
    """
    sm = SlotMap()
    for vn in vt.candidate_vns():
        occurrences = vt.occurrences[vn]
        if may_trap(vt.leader_of[vn], vt):
            continue
        if len(occurrences) >= 2 or loops.in_loop(vt.block_of[occurrences[0]]):
            sm.slot_of[vn] = len(sm.vn_of_slot)
            sm.vn_of_slot.append(vn)
    return sm


# ---------------------------------------------------------------------------
# Local properties and the LCM equations
# ---------------------------------------------------------------------------

def compute_local_properties(func: Function, vt: ValueTable, sm: SlotMap,
                             cfg: Optional[CfgInfo] = None) -> LocalProperties:
    """TRANSP, ANTLOC and XCOMP per block.

    A block is not transparent for a value number when it defines an operand
    of the leader expression (phis included); parameters and literals are
    never modified.

    A division that may trap ends every path through its block for
    anticipability: such a block is a barrier, and occurrences after the
    division are not upward exposed, so they count as XCOMP.
    """
    cfg = cfg or analyze_cfg(func)
    width = sm.width
    def_block: Dict[str, str] = {}
    trap_index: Dict[str, int] = {}
    for label in cfg.rpo:
        block = func.block(label)
        for instr in block.instructions():
            if instr.result is not None:
                def_block[instr.result] = label
        for index, instr in enumerate(block.body):
            if may_trap(instr, vt):
                trap_index[label] = index
                break

    transp = {label: [True] * width for label in cfg.rpo}
    exposed = {label: [False] * width for label in cfg.rpo}
    evaluated = {label: [False] * width for label in cfg.rpo}
    for slot, vn in enumerate(sm.vn_of_slot):
        for operand in vt.leader_of[vn].operands:
            if isinstance(operand, Var) and operand.name in def_block:
                transp[def_block[operand.name]][slot] = False
        for instr in vt.occurrences[vn]:
            label = vt.block_of[instr]
            evaluated[label][slot] = True
            if label not in trap_index or _body_index(func.block(label), instr) < trap_index[label]:
                exposed[label][slot] = True

    def vector(bits: List[bool]) -> BitVector:
        return BitVector.from_slots(width, (i for i, bit in enumerate(bits) if bit))

    props = LocalProperties({}, {}, {}, width)
    for label in cfg.rpo:
        t, x, e = vector(transp[label]), vector(exposed[label]), vector(evaluated[label])
        props.transp[label] = t
        props.antloc[label] = x & t
        props.xcomp[label] = e - (x & t)
        props.barrier[label] = label in trap_index
    return props


def _body_index(block: Block, instr: Instruction) -> int:
    return next(i for i, existing in enumerate(block.body) if existing is instr)


def run_lcm_analyses(func: Function, cfg: CfgInfo, local: LocalProperties) -> LcmSets:
    """Solve the lazy code motion equations for every block."""
    width = local.width
    universe = BitVector.universe(width)
    empty = BitVector.empty(width)
    transp, antloc, xcomp = local.transp, local.antloc, local.xcomp
    sets = LcmSets(width=width, vectors={'TRANSP': transp, 'ANTLOC': antloc, 'XCOMP': xcomp})
    # Nothing is anticipated across a division that may trap.
    passable = {b: empty if local.barrier.get(b) else t for b, t in transp.items()}

    # Down-safety
    ant_spec = DataflowSpec(
        name='down-safety', direction=Direction.BACKWARD,
        alpha=lambda b: xcomp[b],
        beta=lambda s, sol: sol.in_of[s],
        gamma=lambda b, sol: (passable[b] & sol.out_of[b]) | antloc[b],
        meet=intersection, bottom=empty, top=universe,
    )
    ant = solve(func, cfg, ant_spec)
    antin, antout = ant.in_of, ant.out_of

    # Up-safety
    avail_spec = DataflowSpec(
        name='up-safety', direction=Direction.FORWARD,
        alpha=lambda b: empty,
        beta=lambda p, sol: xcomp[p] | sol.out_of[p],
        gamma=lambda b, sol: (antloc[b] | sol.in_of[b]) & transp[b],
        meet=intersection, bottom=empty, top=universe,
    )
    avail = solve(func, cfg, avail_spec)
    availout = avail.out_of

    # Earliest
    earlin: Dict[str, BitVector] = {}
    earlout: Dict[str, BitVector] = {}
    for label in cfg.rpo:
        blocked = reduce(
            intersection,
            (~(availout[p] | antout[p]) for p in cfg.reachable_preds(label)),
            universe,
        )
        earlin[label] = antin[label] & blocked
        earlout[label] = antout[label] - passable[label]

    # Delayability
    delay_spec = DataflowSpec(
        name='delayability', direction=Direction.FORWARD,
        alpha=lambda b: earlin[b],
        beta=lambda p, sol: sol.out_of[p] - xcomp[p],
        gamma=lambda b, sol: (sol.in_of[b] - antloc[b]) | earlout[b],
        meet=intersection, bottom=empty, top=universe,
    )
    delay = solve(func, cfg, delay_spec)
    delayin, delayout = delay.in_of, delay.out_of

    # Latest
    latestin: Dict[str, BitVector] = {}
    latestout: Dict[str, BitVector] = {}
    for label in cfg.rpo:
        latestin[label] = delayin[label] & antloc[label]
        not_delayed = reduce(
            lambda acc, s: acc | ~delayin[s], cfg.succs[label], empty,
        )
        latestout[label] = delayout[label] & (xcomp[label] | not_delayed)

    # Isolation
    iso_spec = DataflowSpec(
        name='isolation', direction=Direction.BACKWARD,
        alpha=lambda b: empty,
        beta=lambda s, sol: (sol.in_of[s] - antloc[s]) | earlin[s],
        gamma=lambda b, sol: earlout[b] | sol.out_of[b],
        meet=intersection, bottom=universe, top=universe,
    )
    iso = solve(func, cfg, iso_spec)
    isoin, isoout = iso.in_of, iso.out_of

    insertin, insertout, replacein, replaceout = {}, {}, {}, {}
    for label in cfg.rpo:
        insertin[label] = latestin[label] - isoin[label]
        insertout[label] = latestout[label] - isoout[label]
        replacein[label] = antloc[label] - (latestin[label] & isoin[label])
        replaceout[label] = xcomp[label] - (latestout[label] & isoout[label])

    sets.vectors.update({
        'ANTIN': antin, 'ANTOUT': antout,
        'AVAILIN': avail.in_of, 'AVAILOUT': availout,
        'EARLIN': earlin, 'EARLOUT': earlout,
        'DELAYIN': delayin, 'DELAYOUT': delayout,
        'LATESTIN': latestin, 'LATESTOUT': latestout,
        'ISOIN': isoin, 'ISOOUT': isoout,
        'INSERTIN': insertin, 'INSERTOUT': insertout,
        'REPLACEIN': replacein, 'REPLACEOUT': replaceout,
    })
    sets.specs = {
        'down-safety': ant_spec, 'up-safety': avail_spec,
        'delayability': delay_spec, 'isolation': iso_spec,
    }
    sets.solutions = {
        'down-safety': ant, 'up-safety': avail,
        'delayability': delay, 'isolation': iso,
    }
    return sets


def check_inclusions(sets: LcmSets) -> List[str]:
    """Violations of the structural inclusions between the LCM sets."""
    rules = [
        ('EARLIN', 'ANTIN'), ('LATESTIN', 'DELAYIN'), ('LATESTOUT', 'DELAYOUT'),
        ('INSERTIN', 'LATESTIN'), ('INSERTOUT', 'LATESTOUT'),
        ('REPLACEIN', 'ANTLOC'), ('REPLACEOUT', 'XCOMP'), ('DELAYIN', 'ANTIN'),
    ]
    problems = []
    for label in sets['ANTLOC']:
        for sub, sup in rules:
            if not sets[sub][label] <= sets[sup][label]:
                problems.append(f"{label}: {sub} not within {sup}")
        if not (sets['ANTLOC'][label] & sets['XCOMP'][label]).is_empty():
            problems.append(f"{label}: ANTLOC and XCOMP overlap")
    return problems


def format_lcm_sets(sets: LcmSets, sm: SlotMap, cfg: CfgInfo,
                    names: Tuple[str, ...] = ALL_SETS) -> str:
    """Text dump of the requested sets per block, slots shown as VNs."""
    lines = ["slots: " + ', '.join(f"{i}=v{vn}" for i, vn in enumerate(sm.vn_of_slot))]
    for label in cfg.rpo:
        lines.append(f"{label}:")
        for name in names:
            members = ', '.join(f"v{sm.vn_of_slot[s]}" for s in sets[name][label].slots())
            lines.append(f"  {name:<10} {{{members}}}")
    return '\n'.join(lines) + '\n'


# ---------------------------------------------------------------------------
# Insert / replace
# ---------------------------------------------------------------------------

def _definition_sites(func: Function) -> Dict[str, Tuple[str, bool]]:
    sites: Dict[str, Tuple[str, bool]] = {}
    for block in func.blocks:
        for phi in block.phis:
            sites[phi.result] = (block.label, True)
        for instr in block.body:
            if instr.result is not None:
                sites[instr.result] = (block.label, False)
    return sites


def find_provider(vn: int, insert_block: str, insert_pos: Position, func: Function,
                  vt: ValueTable, cfg: CfgInfo,
                  sites: Optional[Dict[str, Tuple[str, bool]]] = None) -> Optional[Instruction]:
    """First occurrence of ``vn`` whose operands are all available at the point.

    An operand is available when it is a literal or parameter, or when its
    definition strictly dominates the insertion block; a definition in the
    insertion block itself counts if it is a phi, or for insertion before the
    terminator.
    """
    sites = sites if sites is not None else _definition_sites(func)
    params = set(func.params)

    def available(operand) -> bool:
        if isinstance(operand, Const) or operand.name in params:
            return True
        site = sites.get(operand.name)
        if site is None:
            return False
        label, is_phi = site
        if label == insert_block:
            return is_phi or insert_pos is Position.EXIT
        return cfg.strictly_dominates(label, insert_block)

    for instr in vt.occurrences.get(vn, []):
        if all(available(o) for o in instr.operands):
            return instr
    return None


@dataclass
class _Plan:
    vn: int
    insertions: List[Insertion] = field(default_factory=list)
    replaced: List[Instruction] = field(default_factory=list)


def _plan_value(vn: int, slot: int, func: Function, sets: LcmSets, vt: ValueTable,
                cfg: CfgInfo, sites) -> Optional[_Plan]:
    plan = _Plan(vn)
    occurrence_in = {vt.block_of[instr]: instr for instr in vt.occurrences[vn]}
    for label in cfg.rpo:
        own = occurrence_in.get(label)
        for position, name in ((Position.ENTRY, 'INSERTIN'), (Position.EXIT, 'INSERTOUT')):
            if slot not in sets[name][label]:
                continue
            if own is not None and position is Position.EXIT and slot in sets['REPLACEIN'][label]:
                # The slot already holds the value loaded at the occurrence.
                continue
            if own is not None:
                plan.insertions.append(Insertion(label, position, vn, own, fused=True))
                continue
            provider = find_provider(vn, label, position, func, vt, cfg, sites)
            if provider is None:
                return None
            plan.insertions.append(Insertion(label, position, vn, provider))
        if own is None or any(ins.fused and ins.provider is own for ins in plan.insertions):
            continue
        if slot in sets['REPLACEIN'][label] or slot in sets['REPLACEOUT'][label]:
            plan.replaced.append(own)
    return plan


def _check_store_coverage(func: Function, slots: List[str]) -> None:
    """Every load from a PRE slot must be preceded by a store on every path."""
    if not slots:
        return
    cfg = analyze_cfg(func)
    index = {name: i for i, name in enumerate(slots)}
    width = len(slots)

    def stored_in(label: str) -> BitVector:
        return BitVector.from_slots(width, {
            index[i.operands[1].name] for i in func.block(label).body
            if i.opcode == 'store' and isinstance(i.operands[1], Var) and i.operands[1].name in index
        })

    gen = {label: stored_in(label) for label in cfg.rpo}
    empty = BitVector.empty(width)
    spec = DataflowSpec(
        name='store-coverage', direction=Direction.FORWARD,
        alpha=lambda b: empty,
        beta=lambda p, sol: sol.out_of[p],
        gamma=lambda b, sol: gen[b] | sol.in_of[b],
        meet=intersection, bottom=empty, top=BitVector.universe(width),
    )
    coverage = solve(func, cfg, spec)
    for label in cfg.rpo:
        stored = set(coverage.in_of[label].slots())
        for instr in func.block(label).body:
            if instr.opcode == 'store' and isinstance(instr.operands[1], Var) \
                    and instr.operands[1].name in index:
                stored.add(index[instr.operands[1].name])
            elif instr.opcode == 'load' and isinstance(instr.operands[0], Var) \
                    and instr.operands[0].name in index:
                if index[instr.operands[0].name] not in stored:
                    raise PreSafetyError(
                        f"load '{instr.text()}' in @{func.name}/{label} "
                        f"is not covered by a store on every path"
                    )


def apply_insert_replace(func: Function, sets: LcmSets, vt: ValueTable, sm: SlotMap,
                         cfg: Optional[CfgInfo] = None,
                         diagnostics: Optional[List[str]] = None) -> Tuple[Function, PreReport]:
    """Rewrite ``func`` according to the INSERT and REPLACE sets.

    Every value number is planned against the unmodified function first; a
    value number whose insertion point has no legal provider is skipped
    entirely. Each transformed value number gets an alloca in the entry
    block. Insertion points store a computed value into it, every remaining
    occurrence stores its own result, and replaced occurrences become loads
    of the same name.

    Raises:
        PreSafetyError: If some introduced load is not reached by a store
    """
    cfg = cfg or analyze_cfg(func)
    report = PreReport(function=func.name, max_vn=vt.max_vn, width=sm.width)
    sites = _definition_sites(func)
    plans: List[_Plan] = []
    for slot, vn in enumerate(sm.vn_of_slot):
        plan = _plan_value(vn, slot, func, sets, vt, cfg, sites)
        if plan is None:
            report.skipped_vns.append(vn)
            message = f"no provider for v{vn} ({vt.describe(vn)}) in @{func.name}; PRE skipped for it"
            logger.warning(message)
            if diagnostics is not None:
                diagnostics.append(message)
            continue
        if not plan.replaced:
            # Nothing would ever load the slot.
            continue
        plans.append(plan)

    names = NameAllocator(func)
    allocas: List[Instruction] = []
    slot_names: List[str] = []
    for plan in plans:
        slot_name = names.name(f"pre.v{plan.vn}")
        slot_names.append(slot_name)
        allocas.append(Instruction('alloca', result=slot_name))
        pointer = Var(slot_name)

        for ins in plan.insertions:
            report.insertions.append(ins)
            if ins.fused:
                continue
            block = func.block(ins.block)
            clone = ins.provider.clone(result=names.name(f"pre.v{plan.vn}.{ins.block}"))
            store = Instruction('store', [Var(clone.result), pointer])
            if ins.position is Position.ENTRY:
                block.body[0:0] = [clone, store]
            else:
                block.body.extend([clone, store])

        replaced = set(map(id, plan.replaced))
        for instr in vt.occurrences[plan.vn]:
            block = func.block(vt.block_of[instr])
            index = _body_index(block, instr)
            if id(instr) in replaced:
                block.body[index] = Instruction('load', [pointer], result=instr.result)
                report.replacements.append(Replacement(instr, plan.vn, slot_name))
            else:
                block.body.insert(index + 1, Instruction('store', [Var(instr.result), pointer]))

    entry = func.block(func.entry)
    entry.body[0:0] = allocas
    _check_store_coverage(func, slot_names)
    logger.info(
        f"PRE on @{func.name}: width {sm.width}/{vt.max_vn}, "
        f"{len(report.insertions)} insertion(s), {len(report.replacements)} replacement(s), "
        f"{len(report.skipped_vns)} skipped"
    )
    return func, report


@dataclass
class LcmAnalysis:
    """Everything computed for a function before it is rewritten."""
    cfg: CfgInfo
    loops: LoopInfo
    values: ValueTable
    slots: SlotMap
    sets: LcmSets
    lcse_removed: int = 0
    edges_split: int = 0
    dead_removed: int = 0


def analyze_function(func: Function, diagnostics: Optional[List[str]] = None) -> LcmAnalysis:
    """Split critical edges, drop dead code, number values, run local CSE
    and solve the sets.

    ``func`` is modified by the first three steps only. Unused pure
    instructions are removed before numbering so they never act as
    occurrences.
    """
    _, edges = split_critical_edges(func)
    dead = sweep_dead_code(func)
    cfg = analyze_cfg(func, diagnostics)
    loops = find_natural_loops(func, cfg, diagnostics)
    vt = assign_value_numbers(func, cfg)
    _, removed = local_cse(func, vt)
    sm = allocate_slots(vt, loops)
    local = compute_local_properties(func, vt, sm, cfg)
    sets = run_lcm_analyses(func, cfg, local)
    return LcmAnalysis(cfg, loops, vt, sm, sets, removed, edges, dead)


def verify_analysis(func: Function, analysis: LcmAnalysis) -> List[str]:
    """Cross-check every solved analysis of ``func``.

    Each solution must equal the round-robin solution and the solution from
    the reversed initial worklist, must be a fixpoint, and the sets must
    satisfy ``check_inclusions``.
    """
    cfg, sets = analysis.cfg, analysis.sets
    problems = []
    for name, spec in sets.specs.items():
        sol = sets.solutions[name]
        default = cfg.rpo if spec.direction is Direction.FORWARD else cfg.rpo[::-1]
        if not solve_round_robin(func, cfg, spec).same_sets(sol):
            problems.append(f"{name}: worklist and round-robin solutions differ")
        if not solve(func, cfg, spec, order=list(reversed(default))).same_sets(sol):
            problems.append(f"{name}: solution depends on worklist order")
        if not is_fixpoint(cfg, spec, sol):
            problems.append(f"{name}: solution is not a fixpoint")
    problems.extend(check_inclusions(sets))
    return problems


def pre_pass(func: Function, diagnostics: Optional[List[str]] = None,
             check: bool = False) -> Tuple[Function, PreReport]:
    """Run the whole PRE pipeline on one function, in place.

    With ``check`` the solved sets go through ``verify_analysis`` first.

    Raises:
        DataflowCheckError: If ``check`` is set and verification fails
        PreSafetyError: If the rewrite leaves a load without a store
    """
    analysis = analyze_function(func, diagnostics)
    if check:
        problems = verify_analysis(func, analysis)
        if problems:
            raise DataflowCheckError(func.name, problems)
    func, report = apply_insert_replace(func, analysis.sets, analysis.values,
                                        analysis.slots, analysis.cfg, diagnostics)
    report.lcse_removed = analysis.lcse_removed
    report.edges_split = analysis.edges_split
    report.dead_removed = analysis.dead_removed
    return func, report


class LcmPass(PassBase):
    name = 'lcm'

    def _configure(self, check: bool = False, **kwargs) -> None:
        self.check = check

    def run_on_function(self, func: Function) -> PassResult:
        diagnostics: List[str] = []
        _, report = pre_pass(func, diagnostics, check=self.check)
        counters = {
            'edges_split': report.edges_split,
            'dead_removed': report.dead_removed,
            'lcse_removed': report.lcse_removed,
            'insertions': len(report.insertions),
            'replacements': len(report.replacements),
            'skipped': len(report.skipped_vns),
            'width': report.width,
            'max_vn': report.max_vn,
        }
        changed = bool(report.edges_split or report.dead_removed or report.lcse_removed or report.replacements
                       or any(not ins.fused for ins in report.insertions))
        return PassResult(self.name, func.name, changed, counters, diagnostics, report)
