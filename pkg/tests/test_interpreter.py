#!/usr/bin/env python3
"""
Unit tests for the interpreter and the differential tester.
"""

import copy
import logging

import pytest

from vnlcm.corpus import load_program
from vnlcm.errors import InterpreterError
from vnlcm.interp import differential, execute, fit_arguments
from vnlcm.ir import Module, parse_module
from vnlcm.ir.core import INT64_MIN
from vnlcm.passes import pre_pass


@pytest.fixture
def f1_module():
    return load_program('f1_diamond')


def test_execute_diamond(f1_module):
    """Test prints, return value, step count and per-opcode counts."""
    profile = execute(f1_module, 'f1', [2, 3], [1])
    assert profile.behavior.status == 'returned'
    assert profile.behavior.prints == (5,)
    assert profile.behavior.returned == 5
    assert profile.steps == 9
    assert profile.op_counts['add'] == 2
    assert profile.op_counts['phi'] == 1
    assert profile.candidate_total == 3


def test_exhausted_tape_reads_zero(f1_module):
    """Test that opaque yields 0 once the tape runs out."""
    profile = execute(f1_module, 'f1', [2, 3])
    assert profile.behavior.prints == (4,)
    assert profile.op_counts['mul'] == 1


def test_summary(f1_module):
    """Test the summary dictionary used for reports."""
    summary = execute(f1_module, 'f1', [2, 3], [0]).summary()
    assert summary['status'] == 'returned'
    assert summary['return'] == 5
    assert summary['prints'] == [4]
    assert summary['candidate_total'] == 3
    assert list(summary['op_counts']) == sorted(summary['op_counts'])


def test_division_by_zero_traps():
    """Test that the run stops at the trapping division."""
    module = parse_module("func @d(%a, %b) {\nentry:\n  print %a\n  %q = div %a, %b\n"
                          "  print %q\n  ret %q\n}\n")
    profile = execute(module, 'd', [7, 0])
    assert profile.behavior.status == 'trapped-div0'
    assert profile.behavior.prints == (7,)
    assert profile.behavior.returned is None
    assert profile.steps == 2
    assert execute(module, 'd', [7, 2]).behavior.prints == (7, 3)


def test_fuel_exhaustion():
    """Test that a long loop stops when the budget is spent."""
    module = load_program('f2_while')
    profile = execute(module, 'f2', [1, 2, 1000], fuel=50)
    assert profile.behavior.status == 'fuel-exhausted'
    assert profile.behavior.returned is None
    assert profile.steps == 50

    done = execute(module, 'f2', [1, 2, 10])
    assert done.behavior.returned == 30


def test_alloca_load_store():
    """Test fresh addresses and that unwritten memory reads 0."""
    module = parse_module("""
func @mem() {
entry:
  %p = alloca
  %q = alloca
  print %p
  print %q
  store 7, %q
  %v = load %q
  %w = load %p
  print %v
  print %w
  ret 0
}
""")
    assert execute(module, 'mem', []).behavior.prints == (4096, 4104, 7, 0)


def test_phis_read_values_simultaneously():
    """Test that phis on one edge all see the values from before the edge."""
    module = parse_module("""
func @swap(%n) {
entry:
  jmp head
head:
  %x = phi [entry: 1, head: %y]
  %y = phi [entry: 2, head: %x]
  %i = phi [entry: 0, head: %i1]
  %i1 = add %i, 1
  %c = cmp lt %i1, %n
  br %c, head, out
out:
  print %x
  ret %y
}
""")
    behavior = execute(module, 'swap', [2]).behavior
    assert behavior.prints == (2,)
    assert behavior.returned == 1


def test_wrapping_program():
    """Test i64 wrap-around end to end."""
    behavior = execute(load_program('wrap_arith'), 'wrap', [1], [1]).behavior
    assert behavior.prints == (INT64_MIN, 4611686018427387904, INT64_MIN)
    assert behavior.returned == INT64_MIN


def test_trace_hook(f1_module):
    """Test that every defined value is reported, phis included."""
    seen = []
    execute(f1_module, 'f1', [2, 3], [1], trace=lambda instr, value: seen.append((instr.result, value)))
    assert seen == [('t', 1), ('c', 1), ('x1', 5), ('m', 5), ('y', 5)]


@pytest.mark.parametrize("name, args, message", [
    ('nope', [1, 2], "Unknown function '@nope'"),
    ('f1', [1], "expects 2 argument"),
])
def test_execute_errors(f1_module, name, args, message):
    """Test that bad calls are rejected before running."""
    with pytest.raises(InterpreterError, match=message):
        execute(f1_module, name, args)


def test_undefined_name():
    """Test that reading a never-defined name is an error."""
    module = parse_module("func @u() {\nentry:\n  ret %zz\n}\n")
    with pytest.raises(InterpreterError, match="undefined '%zz'"):
        execute(module, 'u', [])


def test_fit_arguments():
    """Test truncation and zero padding of argument lists."""
    assert fit_arguments([1, 2, 3], 2) == [1, 2]
    assert fit_arguments([5], 3) == [5, 0, 0]
    assert fit_arguments([], 0) == []


# ---------------------------------------------------------------------------
# Differential testing
# ---------------------------------------------------------------------------

CASES = [([2, 3], [1]), ([2, 3], [0]), ([-4, 9], [1]), ([0, 0], [])]


def test_differential_after_pre(f1_module):
    """Test that PRE keeps behavior and never adds work."""
    after = copy.deepcopy(f1_module)
    pre_pass(after.function('f1'))
    verdict = differential(f1_module, after, 'f1', CASES)
    assert verdict.passed
    assert verdict.never_worse
    assert verdict.counts[0] == (3, 2)
    assert verdict.counts[1] == (3, 3)
    assert verdict.to_dict()['passed'] is True
    assert verdict.to_dict()['cases'][0]['candidates'] == [3, 2]


def test_differential_catches_a_miscompile(f1_module, caplog):
    """Test the negative control: an add turned into a sub is reported."""
    broken = copy.deepcopy(f1_module)
    join = broken.function('f1').block('join')
    join.body[1].opcode = 'sub'
    with caplog.at_level(logging.WARNING, logger='vnlcm.interp.differential'):
        verdict = differential(f1_module, broken, 'f1', CASES)
    assert not verdict.passed
    assert len(verdict.mismatches()) == 3
    assert verdict.to_dict()['passed'] is False
    assert any('behavior' in record.getMessage() for record in caplog.records)


def test_differential_fits_arguments():
    """Test that one case table serves any arity, in case order."""
    module = load_program('f2_while')
    cases = [([1, 2], []), ([1, 2, 3, 4], [])]
    verdict = differential(module, module, 'f2', cases)
    assert [case.args for case in verdict.cases] == [[1, 2, 0], [1, 2, 3]]
    assert [case.after.returned for case in verdict.cases] == [0, 9]


def test_differential_jobs_keep_order(f1_module):
    """Test that worker threads do not reorder results."""
    serial = differential(f1_module, f1_module, 'f1', CASES)
    threaded = differential(f1_module, f1_module, 'f1', CASES, jobs=3)
    assert [c.args for c in threaded.cases] == [c.args for c in serial.cases]
    assert threaded.counts == serial.counts
