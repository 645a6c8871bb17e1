#!/usr/bin/env python3
"""
Unit tests for CFG analysis and natural loop detection.
"""


import networkx
import pytest

from vnlcm.analysis.cfg import analyze_cfg, brute_force_dominators, iterated_dominance_frontier
from vnlcm.analysis.loops import find_natural_loops
from vnlcm.corpus import load_corpus, load_program
from vnlcm.ir import parse_function


def _digraph(cfg):
    graph = networkx.DiGraph()
    graph.add_nodes_from(cfg.rpo)
    for label in cfg.rpo:
        for succ in cfg.succs[label]:
            graph.add_edge(label, succ)
    return graph


@pytest.fixture
def f1():
    return load_program('f1_diamond').function('f1')


def test_diamond_facts(f1):
    """Test preds, succs, RPO, dominators and frontiers of the diamond."""
    cfg = analyze_cfg(f1)
    assert cfg.rpo == ['entry', 'bbT', 'bbF', 'join']
    assert cfg.succs['entry'] == ['bbT', 'bbF']
    assert cfg.preds['join'] == ['bbT', 'bbF']
    assert cfg.idom == {'entry': 'entry', 'bbT': 'entry', 'bbF': 'entry', 'join': 'entry'}
    assert cfg.df['bbT'] == {'join'}
    assert cfg.df['bbF'] == {'join'}
    assert cfg.df['entry'] == set()
    assert cfg.dominates('entry', 'join')
    assert not cfg.dominates('bbT', 'join')
    assert not cfg.strictly_dominates('join', 'join')
    assert cfg.exits() == ['join']
    assert list(cfg.dom_tree_preorder())[0] == 'entry'


def test_iterated_frontier_of_loop():
    """Test DF+ of a loop body reaches the header."""
    func = load_program('f2_while').function('f2')
    cfg = analyze_cfg(func)
    assert iterated_dominance_frontier(cfg, {'body'}) == {'head'}
    assert iterated_dominance_frontier(cfg, {'entry'}) == set()


@pytest.mark.parametrize("name", sorted(load_corpus()))
def test_dominators_match_oracles(name):
    """Test CHK dominators against networkx and the brute-force fixpoint."""
    for func in load_corpus()[name].functions:
        cfg = analyze_cfg(func)
        expected = networkx.immediate_dominators(_digraph(cfg), cfg.entry)
        for label in cfg.rpo[1:]:
            assert cfg.idom[label] == expected[label]

        dom = brute_force_dominators(cfg)
        for a in cfg.rpo:
            for b in cfg.rpo:
                assert cfg.dominates(a, b) == (a in dom[b])


def test_unreachable_block_is_reported():
    """Test that unreachable blocks are excluded from RPO and diagnosed."""
    func = parse_function("func @u() {\nentry:\n  ret 0\ndead:\n  jmp entry2\nentry2:\n  ret 1\n}\n")
    diagnostics = []
    cfg = analyze_cfg(func, diagnostics)
    assert cfg.rpo == ['entry']
    assert cfg.unreachable == ['dead', 'entry2']
    assert not cfg.is_reachable('dead')
    assert len(diagnostics) == 2
    assert "unreachable block 'dead'" in diagnostics[0]


def test_while_loop():
    """Test the loop of the while-shaped example."""
    func = load_program('f2_while').function('f2')
    info = find_natural_loops(func, analyze_cfg(func))
    assert len(info.loops) == 1
    loop = info.loops[0]
    assert loop.header == 'head'
    assert loop.body == frozenset({'head', 'body'})
    assert loop.latches == frozenset({'body'})
    assert loop.preheader == 'entry'
    assert info.in_loop('body')
    assert not info.in_loop('exit')


def test_nested_loops_depth():
    """Test nesting depth and innermost-first ordering."""
    func = load_program('nested_loops').function('nested')
    info = find_natural_loops(func, analyze_cfg(func))
    assert [loop.header for loop in info.loops] == ['outer', 'inner']
    assert info.loop_of('inner').depth == 2
    assert info.loop_of('outer').depth == 1
    assert info.innermost_first()[0].header == 'inner'
    assert info.loop_depth['ibody'] == 2
    assert info.loop_depth['olatch'] == 1
    assert info.loop_of('inner').body == frozenset({'inner', 'ibody'})


def test_self_loop():
    """Test that a single-block loop is its own latch."""
    func = load_program('do_while').function('do_while')
    info = find_natural_loops(func, analyze_cfg(func))
    assert len(info.loops) == 1
    assert info.loops[0].body == frozenset({'loop'})
    assert info.loops[0].latches == frozenset({'loop'})


def test_irreducible_region():
    """Test that a cycle with two entries produces a diagnostic and no loop."""
    func = parse_function("""
func @irr(%a) {
entry:
  br %a, x, y
x:
  br %a, y, out
y:
  jmp x
out:
  ret 0
}
""")
    diagnostics = []
    info = find_natural_loops(func, analyze_cfg(func), diagnostics)
    assert info.loops == []
    assert len(diagnostics) == 1
    assert "irreducible edge" in diagnostics[0]
