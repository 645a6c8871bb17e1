#!/usr/bin/env python3
"""
Unit tests for the normalizing passes: critical edge splitting, loop
rotation, stack slot promotion and CFG simplification.
"""

import copy

import pytest

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.corpus import load_program
from vnlcm.errors import UnknownPassError
from vnlcm.interp import execute, fit_arguments
from vnlcm.ir import Module, parse_function, validate_function
from vnlcm.passes import (
    AVAILABLE_PASSES, PIPELINE_PRESETS, LoopRotatePass, Mem2RegPass, SimplifyCfgPass,
    SplitCriticalEdgesPass, get_pass, mem2reg_promote, rotate_loops, simplify_cfg,
    split_critical_edges,
)
from vnlcm.passes.critical_edges import critical_edges
from vnlcm.passes.mem2reg import promotable_allocas


def _same_behavior(before, after, cases):
    """Run both functions on every (args, tape) case and compare behavior."""
    for args, tape in cases:
        args = fit_arguments(args, len(before.params))
        ref = execute(Module([before]), before.name, args, tape)
        out = execute(Module([after]), after.name, args, tape)
        assert ref.behavior == out.behavior, (args, tape)


def _opcodes(func):
    return [instr.opcode for _, instr in func.instructions()]


def test_registry():
    """Test the pass registry and presets."""
    assert set(AVAILABLE_PASSES) == {'mem2reg', 'loop-rotate', 'split-crit', 'reassociate', 'lcm', 'simplifycfg'}
    assert PIPELINE_PRESETS['base'] == ['mem2reg', 'loop-rotate', 'reassociate', 'mem2reg', 'simplifycfg']
    assert PIPELINE_PRESETS['lcm-pre'] == ['mem2reg', 'loop-rotate', 'reassociate', 'lcm', 'mem2reg', 'simplifycfg']
    assert get_pass('mem2reg') is Mem2RegPass
    with pytest.raises(UnknownPassError, match="not available"):
        get_pass('gvn-pre')
    with pytest.raises(ValueError):
        get_pass('licm')


# ---------------------------------------------------------------------------
# Critical edges
# ---------------------------------------------------------------------------

def test_split_triangle():
    """Test that the entry->join edge of a triangle gets its own block."""
    func = load_program('triangle').function('triangle')
    assert critical_edges(func) == [('entry', 'join')]
    original = copy.deepcopy(func)

    _, count = split_critical_edges(func)
    assert count == 1
    assert 'entry.join' in func.labels()
    assert func.block('entry').terminator.labels == ['then', 'entry.join']
    assert func.block('entry.join').terminator.labels == ['join']
    assert critical_edges(func) == []
    assert validate_function(func) == []
    _same_behavior(original, func, [([1, 2], [1]), ([1, 2], [0])])


def test_split_renames_phi_incoming():
    """Test that phis in the target follow the new edge label."""
    func = load_program('f2b_post_loop').function('f2b')
    result = SplitCriticalEdgesPass().run_on_function(func)
    assert result.counters == {'edges_split': 0}
    assert not result.changed

    rotated = load_program('f2b_post_loop').function('f2b')
    rotate_loops(rotated)
    _, count = split_critical_edges(rotated)
    assert count == 3
    assert validate_function(rotated) == []
    for block in rotated.blocks:
        for phi in block.phis:
            assert set(phi.labels) == set(analyze_cfg(rotated).preds[block.label])


# ---------------------------------------------------------------------------
# Loop rotation
# ---------------------------------------------------------------------------

def test_rotate_while_loop():
    """Test the guard / preheader / exit structure of a rotated while loop."""
    func = load_program('f2_while').function('f2')
    original = copy.deepcopy(func)
    result = LoopRotatePass().run_on_function(func)

    assert result.changed
    assert result.counters == {'loops_rotated': 1}
    assert result.diagnostics == []
    labels = func.labels()
    assert 'head' not in labels
    assert {'head.guard', 'head.ph', 'head.exit'} <= set(labels)
    assert func.block('head.guard').terminator.labels == ['head.ph', 'head.exit']
    assert func.block('head.ph').terminator.labels == ['body']
    assert func.block('body').terminator.opcode == 'br'
    # %s is used after the loop, %c and %i are not
    exit_phis = [phi.result for phi in func.block('head.exit').phis]
    assert exit_phis == ['s.x']
    assert validate_function(func) == []
    _same_behavior(original, func, [([2, 3, n], []) for n in (0, 1, 2, 7)])


def test_rotated_preheader_only_on_entry():
    """Test that the preheader runs only when the loop runs at least once."""
    func = load_program('f2_while').function('f2')
    rotate_loops(func)
    cfg = analyze_cfg(func)
    assert cfg.preds['head.ph'] == ['head.guard']
    assert cfg.dominates('head.ph', 'body')
    assert not cfg.dominates('head.ph', 'exit')


def test_rotate_nested_and_tape_loops():
    """Test rotation of nested loops and of a loop whose entry block is its latch."""
    for program, name in (('nested_loops', 'nested'), ('opaque_loop', 'tape_loop'),
                          ('loop_branch', 'loop_branch'), ('zero_trip_for', 'zero_trip')):
        func = load_program(program).function(name)
        original = copy.deepcopy(func)
        diagnostics = []
        rotate_loops(func, diagnostics=diagnostics)
        assert diagnostics == []
        assert validate_function(func) == [], program
        cases = [([3, 5, n], [1, 1, 0, 1, 1]) for n in (0, 1, 4)] + [([-2, 6, 2], [1, 0])]
        _same_behavior(original, func, cases)


def test_rotation_copies_only_the_exit_test():
    """Test that header code the test does not need moves into the loop instead of being copied."""
    func = parse_function("""
func @wide(%a, %b, %n) {
entry:
  jmp head
head:
  %i = phi [entry: 0, body: %i1]
  %s = phi [entry: 0, body: %s1]
  %w = mul %a, %b
  %k = add %i, 2
  %c = cmp lt %k, %n
  %z = xor %s, %a
  br %c, body, exit
body:
  %t = add %w, %i
  %s1 = add %s, %t
  %i1 = add %i, 1
  jmp head
exit:
  ret %z
}
""")
    original = copy.deepcopy(func)
    rotate_loops(func)

    guard = func.block('head.guard')
    assert [(instr.opcode, instr.result) for instr in guard.body] == [
        ('add', 'k.g'), ('cmp', 'c.g'), ('xor', 'z.g'),
    ]
    body = func.block('body')
    assert body.body[0].text() == '%w = mul %a, %b'
    assert [phi.result for phi in body.phis] == ['i', 's', 'k', 'c', 'z']
    assert _opcodes(func).count('mul') == 1
    assert [phi.result for phi in func.block('head.exit').phis] == ['z.x']
    assert validate_function(func) == []
    _same_behavior(original, func, [([2, 3, n], []) for n in (0, 1, 3, 5)])


def test_do_while_is_left_alone():
    """Test that a bottom-tested loop is skipped without a diagnostic."""
    func = load_program('do_while').function('do_while')
    original = copy.deepcopy(func)
    result = LoopRotatePass().run_on_function(func)
    assert not result.changed
    assert result.diagnostics == []
    assert func.structurally_equal(original)


def test_second_exit_blocks_rotation():
    """Test that a loop with a second exit is reported and left unchanged."""
    func = load_program('loop_break').function('loop_break')
    original = copy.deepcopy(func)
    result = LoopRotatePass().run_on_function(func)
    assert not result.changed
    assert len(result.diagnostics) == 1
    assert "second exit edge body -> exit2" in result.diagnostics[0]
    assert func.structurally_equal(original)


def test_side_effect_in_header_blocks_rotation():
    """Test that a header with a print is not duplicated."""
    func = parse_function("""
func @noisy(%n) {
entry:
  jmp head
head:
  %i = phi [entry: 0, body: %i1]
  print %i
  %c = cmp lt %i, %n
  br %c, body, exit
body:
  %i1 = add %i, 1
  jmp head
exit:
  ret %i
}
""")
    diagnostics = []
    rotate_loops(func, diagnostics=diagnostics)
    assert len(diagnostics) == 1
    assert "side-effecting instruction 'print %i'" in diagnostics[0]
    assert 'head' in func.labels()


# ---------------------------------------------------------------------------
# mem2reg
# ---------------------------------------------------------------------------

def test_promote_counter_loop():
    """Test promotion of a load/store loop into phis at the header."""
    func = load_program('mem2reg_counter').function('counter')
    original = copy.deepcopy(func)
    result = Mem2RegPass().run_on_function(func)

    assert result.counters == {'promoted': 2, 'phis_inserted': 2}
    assert not {'alloca', 'load', 'store'} & set(_opcodes(func))
    assert len(func.block('head').phis) == 2
    assert validate_function(func) == []
    _same_behavior(original, func, [([2, 3, n], []) for n in (0, 1, 5)])


def test_promote_diamond():
    """Test that two stores on the arms meet in one phi."""
    func = load_program('mem2reg_diamond').function('mdiamond')
    original = copy.deepcopy(func)
    mem2reg_promote(func)
    join = func.block('join')
    assert len(join.phis) == 1
    assert sorted(join.phis[0].labels) == ['left', 'right']
    assert validate_function(func) == []
    _same_behavior(original, func, [([4, 9], [1]), ([4, 9], [0])])


def test_pruned_phi_placement():
    """Test that no phi is placed where the slot is dead."""
    func = parse_function("""
func @pruned(%a) {
entry:
  %s = alloca
  %t = opaque
  br %t, left, right
left:
  store %a, %s
  %v = load %s
  print %v
  jmp join
right:
  store 7, %s
  jmp join
join:
  ret 0
}
""")
    result = Mem2RegPass().run_on_function(func)
    assert result.counters == {'promoted': 1, 'phis_inserted': 0}
    assert func.block('join').phis == []
    assert func.block('left').body[-1].operands[0].name == 'a'


def test_escaping_alloca_is_kept():
    """Test that an alloca whose address is stored is not promoted."""
    func = load_program('escaping_alloca').function('escape')
    assert promotable_allocas(func) == ['q']
    original = copy.deepcopy(func)
    mem2reg_promote(func)
    assert _opcodes(func).count('alloca') == 1
    assert 'load' in _opcodes(func)
    _same_behavior(original, func, [([5, 6], [])])


def test_load_before_store_reads_zero():
    """Test the diagnostic for a load no store reaches."""
    func = parse_function("func @z() {\nentry:\n  %s = alloca\n  %v = load %s\n  ret %v\n}\n")
    diagnostics = []
    mem2reg_promote(func, diagnostics)
    assert len(diagnostics) == 1
    assert "never-stored slot '%s'" in diagnostics[0]
    assert execute(Module([func]), 'z', []).behavior.returned == 0


# ---------------------------------------------------------------------------
# simplifycfg
# ---------------------------------------------------------------------------

def test_simplify_folds_and_merges():
    """Test folding of a literal branch, unreachable removal, merging and DCE."""
    func = parse_function("""
func @s(%a) {
entry:
  br 1, yes, no
yes:
  %x = add %a, 1
  jmp out
no:
  %y = sub %a, 1
  jmp out
out:
  %p = phi [yes: %x, no: %y]
  %dead = mul %a, 7
  ret %p
}
""")
    result = SimplifyCfgPass().run_on_function(func)
    assert result.changed
    assert result.counters['branches_folded'] == 1
    assert result.counters['dead_removed'] >= 1
    assert len(func.blocks) == 1
    assert _opcodes(func) == ['add', 'ret']
    assert validate_function(func) == []
    assert execute(Module([func]), 's', [41]).behavior.returned == 42


def test_simplify_keeps_possible_traps():
    """Test that an unused division by a variable survives dead-code removal."""
    func = parse_function("""
func @d(%a, %b) {
entry:
  %q = div %a, %b
  %r = div %a, 4
  ret %a
}
""")
    simplify_cfg(func)
    assert [i.text() for i in func.block('entry').body] == ['%q = div %a, %b']


def test_simplify_same_target_branch_and_phis():
    """Test branches with identical targets and single-incoming phis."""
    func = parse_function("""
func @same(%a) {
entry:
  br %a, next, next
next:
  %p = phi [entry: %a]
  %x = add %p, 1
  ret %x
}
""")
    simplify_cfg(func)
    assert len(func.blocks) == 1
    assert func.block('entry').body[0].text() == '%x = add %a, 1'


def test_simplify_is_idempotent():
    """Test that a second run finds nothing to do."""
    func = load_program('f5_extended').function('f5')
    rotate_loops(func)
    simplify_cfg(func)
    again = SimplifyCfgPass().run_on_function(func)
    assert not again.changed
