#!/usr/bin/env python3
"""
Unit tests for value numbering, its simplifications and the reassociate pass.
"""


import pytest

from vnlcm.corpus import load_program
from vnlcm.ir import Const, Var, parse_function, validate_function
from vnlcm.passes import ReassociatePass, assign_value_numbers
from vnlcm.passes.lcm import local_cse
from vnlcm.passes.value_numbering import ALL_OPTIMIZATIONS, format_value_table


def _vn(vt, name):
    return vt.vn_of[Var(name)]


def _prints(func):
    return [i.operands[0] for _, i in func.instructions() if i.opcode == 'print']


def test_diamond_numbering():
    """Test parameters first, literals on first sight and a shared number for a + b."""
    func = load_program('f1_diamond').function('f1')
    vt = assign_value_numbers(func)

    assert _vn(vt, 'a') == 1
    assert _vn(vt, 'b') == 2
    assert _vn(vt, 't') == 3
    assert vt.vn_of[Const(0)] == 4
    assert _vn(vt, 'c') == 5
    assert _vn(vt, 'x1') == _vn(vt, 'y') == 6
    assert vt.constant_of[7] == 2
    assert _vn(vt, 'z') == 8
    assert _vn(vt, 'm') == 9
    assert vt.max_vn == 9
    assert [i.result for i in vt.occurrences[6]] == ['x1', 'y']
    assert vt.leader_of[6].result == 'x1'
    assert vt.block_of[vt.occurrences[6][1]] == 'join'
    assert vt.candidate_vns() == [5, 6, 8]


def test_commutative_operands_share_a_number():
    """Test that b + a and a * b / b * a are recognized as equal."""
    func = load_program('f4_commutative').function('f4')
    vt = assign_value_numbers(func)
    assert _vn(vt, 'p') == _vn(vt, 'q')

    full = load_program('full_redundancy').function('full')
    vt = assign_value_numbers(full)
    assert len({_vn(vt, name) for name in ('x', 'y', 'z', 'w')}) == 1
    assert len(vt.occurrences[_vn(vt, 'x')]) == 4


def test_non_commutative_operands_differ():
    """Test that a - b and b - a get different numbers."""
    func = parse_function("func @f(%a, %b) {\nentry:\n  %x = sub %a, %b\n  %y = sub %b, %a\n"
                          "  %z = cmp lt %a, %b\n  %w = cmp lt %b, %a\n  print %x\n  print %y\n"
                          "  print %z\n  ret %w\n}\n")
    vt = assign_value_numbers(func)
    assert _vn(vt, 'x') != _vn(vt, 'y')
    assert _vn(vt, 'z') != _vn(vt, 'w')


def test_same_operand_simplification():
    """Test that comparisons and logic of a value with itself are forced."""
    func = load_program('vn_opt1').function('vn_opt1')
    assign_value_numbers(func)
    assert _prints(func) == [Const(1), Const(0), Var('l'), Var('g'), Var('x'), Var('x'), Var('z')]
    assert validate_function(func) == []


def test_same_operand_simplification_disabled():
    """Test that without that optimization nothing is removed."""
    func = load_program('vn_opt1').function('vn_opt1')
    before = len(func.block('entry').body)
    vt = assign_value_numbers(func, optimizations={2, 3, 4})
    assert len(func.block('entry').body) == before
    assert _vn(vt, 'e') != _vn(vt, 'n')


def test_constant_folding():
    """Test folding through const instructions and chains of literals."""
    func = load_program('vn_opt2').function('vn_opt2')
    vt = assign_value_numbers(func)
    assert [i.text() for i in func.block('entry').body] == ['%s = add %a, 40', 'print 1']
    assert vt.constant_of[_vn(vt, 'r')] == 40
    assert vt.folded >= 5


def test_algebraic_identities():
    """Test identities; and with -1 is left alone."""
    func = load_program('vn_opt3').function('vn_opt3')
    vt = assign_value_numbers(func)
    assert [i.text() for i in func.block('entry').body] == [
        '%n = and %a, -1', '%v = add %a, %b', 'print %v',
    ]
    assert func.block('entry').terminator.text() == 'ret %n'
    assert _vn(vt, 'x') == _vn(vt, 'a')
    assert vt.constant_of[_vn(vt, 'm')] == 0


def test_division_by_zero_literal_is_not_folded():
    """Test that folding leaves a trapping division in place."""
    func = parse_function("func @f() {\nentry:\n  %q = div 1, 0\n  ret %q\n}\n")
    assign_value_numbers(func)
    assert func.block('entry').body[0].text() == '%q = div 1, 0'


def test_phi_with_equal_incomings():
    """Test that a phi over one value number takes that number."""
    func = load_program('phi_same').function('phi_same')
    vt = assign_value_numbers(func)
    assert _vn(vt, 'p') == _vn(vt, 'q') == _vn(vt, 'x')

    func = load_program('phi_same').function('phi_same')
    vt = assign_value_numbers(func, optimizations=ALL_OPTIMIZATIONS - {4})
    assert _vn(vt, 'p') != _vn(vt, 'x')
    assert _vn(vt, 'q') == _vn(vt, 'x')


def test_back_edge_operand_gets_fresh_number():
    """Test that loop-carried phis are never merged with their entry value."""
    func = load_program('f2_while').function('f2')
    vt = assign_value_numbers(func)
    assert _vn(vt, 'i') != vt.vn_of[Const(0)]
    assert _vn(vt, 'i') != _vn(vt, 's')


def test_local_cse():
    """Test that a same-block duplicate is removed and its uses rewired."""
    func = load_program('f3_lcse').function('f3')
    vt = assign_value_numbers(func)
    _, removed = local_cse(func, vt)
    assert removed == 1
    assert [i.text() for i in func.block('entry').body] == ['%u = add %a, %b', '%w = mul %u, %u']
    assert [i.result for i in vt.occurrences[_vn(vt, 'u')]] == ['u']


def test_format_value_table():
    """Test the value number dump."""
    func = load_program('f1_diamond').function('f1')
    text = format_value_table(func, assign_value_numbers(func))
    lines = text.splitlines()
    assert lines[0] == "value numbers for @f1 (max_vn=9)"
    assert "v6 = add v1, v2: leader %x1, 2 occurrence(s)" in lines
    assert "v5 = cmp ne v3, 0: leader %c, 1 occurrence(s)" in lines
    assert any(line.strip().startswith('%x1 = add %a, %b') and line.endswith('; vn=6 leader')
               for line in lines)
    assert any(line.strip().startswith('%y = add %a, %b') and line.endswith('; vn=6')
               for line in lines)


def test_reassociate_pass():
    """Test operand ordering by value number."""
    func = load_program('f4_commutative').function('f4')
    result = ReassociatePass().run_on_function(func)
    assert result.changed
    assert result.counters == {'folded': 0, 'simplified': 0, 'reordered': 1}
    assert func.block('join').body[0].text() == '%q = add %a, %b'


@pytest.mark.parametrize("program, name", [
    ('isolated', 'isolated'), ('f2_while', 'f2'),
])
def test_reassociate_leaves_canonical_code_alone(program, name):
    """Test programs with nothing to fold or reorder."""
    func = load_program(program).function(name)
    result = ReassociatePass().run_on_function(func)
    assert not result.changed
