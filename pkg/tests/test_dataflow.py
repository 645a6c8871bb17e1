#!/usr/bin/env python3
"""
Unit tests for the bit-vector dataflow framework.
"""


import pytest
from hypothesis import given, strategies as st

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.analysis.dataflow import (
    BitVector, DataflowSpec, Direction, intersection, is_fixpoint, solve,
    solve_round_robin, union,
)
from vnlcm.corpus import load_program
from vnlcm.errors import DataflowConvergenceError


WIDTH = 6


def bitvectors(width=WIDTH):
    return st.lists(st.booleans(), min_size=width, max_size=width).map(
        lambda bits: BitVector.from_slots(width, [i for i, bit in enumerate(bits) if bit])
    )


@given(bitvectors(), bitvectors(), bitvectors())
def test_bitvector_algebra(x, y, z):
    """Test the set identities the LCM equations rely on."""
    assert (x & y) <= x
    assert x <= (x | y)
    assert (x - y) == (x & ~y)
    assert ~(x | y) == (~x & ~y)
    assert (x & (y | z)) == ((x & y) | (x & z))
    assert (x - y).count() + (x & y).count() == x.count()
    assert BitVector.from_string(x.to_string()) == x


def test_bitvector_basics():
    """Test construction, membership and width checks."""
    v = BitVector.from_slots(4, [0, 2])
    assert v.to_string() == '1010'
    assert v.slots() == [0, 2]
    assert 2 in v and 1 not in v
    assert BitVector.empty(4).is_empty()
    assert BitVector.universe(4).count() == 4
    assert repr(v) == "BitVector('1010')"
    with pytest.raises(ValueError, match="width mismatch"):
        v & BitVector.empty(3)


def _gen_kill_problem(func, direction, meet):
    """Reaching-style problem: a bit per block, generated there, killed by the next block."""
    cfg = analyze_cfg(func)
    width = len(cfg.rpo)
    gen = {label: BitVector.from_slots(width, [i]) for i, label in enumerate(cfg.rpo)}
    kill = {label: BitVector.from_slots(width, [(i + 1) % width]) for i, label in enumerate(cfg.rpo)}
    empty = BitVector.empty(width)
    top = empty if meet is union else BitVector.universe(width)
    spec = DataflowSpec(
        name='gen-kill',
        direction=direction,
        alpha=lambda b: empty,
        beta=lambda n, sol: sol.out_of[n] if direction is Direction.FORWARD else sol.in_of[n],
        gamma=lambda b, sol: gen[b] | ((sol.in_of[b] if direction is Direction.FORWARD
                                         else sol.out_of[b]) - kill[b]),
        meet=meet,
        bottom=empty,
        top=top,
    )
    return cfg, spec


@pytest.mark.parametrize("program, name", [
    ('f1_diamond', 'f1'), ('f2_while', 'f2'), ('nested_loops', 'nested'),
    ('loop_branch', 'loop_branch'), ('do_while', 'do_while'),
])
@pytest.mark.parametrize("direction", [Direction.FORWARD, Direction.BACKWARD])
@pytest.mark.parametrize("meet", [union, intersection])
def test_worklist_matches_round_robin(program, name, direction, meet):
    """Test solver agreement with chaotic iteration and across worklist orders."""
    func = load_program(program).function(name)
    cfg, spec = _gen_kill_problem(func, direction, meet)
    reference = solve_round_robin(func, cfg, spec)
    forward = solve(func, cfg, spec, order=cfg.rpo)
    backward = solve(func, cfg, spec, order=cfg.rpo[::-1])
    assert forward.same_sets(reference)
    assert backward.same_sets(reference)
    assert is_fixpoint(cfg, spec, forward)


def test_forward_union_values():
    """Test an exact solution on the diamond."""
    func = load_program('f1_diamond').function('f1')
    cfg, spec = _gen_kill_problem(func, Direction.FORWARD, union)
    sol = solve(func, cfg, spec)
    # rpo: entry=0, bbT=1, bbF=2, join=3; block i kills bit i+1
    assert sol.out_of['entry'].slots() == [0]
    assert sol.out_of['bbT'].slots() == [0, 1]
    assert sol.out_of['bbF'].slots() == [0, 2]
    assert sol.in_of['join'].slots() == [0, 1, 2]
    assert sol.out_of['join'].slots() == [1, 2, 3]


def test_is_fixpoint_detects_stale_solution():
    """Test that a tampered solution is not a fixpoint."""
    func = load_program('f1_diamond').function('f1')
    cfg, spec = _gen_kill_problem(func, Direction.FORWARD, union)
    sol = solve(func, cfg, spec)
    sol.out_of['entry'] = BitVector.empty(spec.width)
    assert not is_fixpoint(cfg, spec, sol)


def test_non_monotone_problem_raises():
    """Test that an oscillating problem hits the visit limit."""
    func = load_program('f2_while').function('f2')
    cfg = analyze_cfg(func)
    empty = BitVector.empty(1)
    spec = DataflowSpec(
        name='flip-flop', direction=Direction.FORWARD,
        alpha=lambda b: empty,
        beta=lambda p, sol: sol.out_of[p],
        gamma=lambda b, sol: ~sol.out_of[b],
        meet=union, bottom=empty, top=empty,
    )
    with pytest.raises(DataflowConvergenceError, match="did not converge"):
        solve(func, cfg, spec)
    with pytest.raises(DataflowConvergenceError):
        solve_round_robin(func, cfg, spec)
