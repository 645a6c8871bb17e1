"""
DOT Export

Renders function CFGs in Graphviz dot format, optionally annotating each
block with LCM sets. The graph is modelled with networkx first so callers
(and tests) can inspect it without parsing dot text.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import networkx

from vnlcm.analysis.cfg import analyze_cfg
from vnlcm.ir.core import Function, Module


logger = logging.getLogger('vnlcm.utils.dot')

# Block label -> extra lines shown under the instructions
Annotations = Dict[str, List[str]]


def cfg_graph(func: Function, annotations: Optional[Annotations] = None) -> networkx.DiGraph:
    """CFG of ``func`` as a DiGraph with ``label`` attributes on nodes.

    Conditional edges carry ``label`` 'T' or 'F'; unreachable blocks are
    drawn dashed.
    """
    cfg = analyze_cfg(func)
    graph = networkx.DiGraph(name=func.name)
    for block in func.blocks:
        lines = [f"{block.label}:"] + [f"  {instr.text()}" for instr in block.instructions()]
        if annotations and block.label in annotations:
            lines.append('')
            lines.extend(annotations[block.label])
        attrs = {'label': '\\l'.join(_escape(line) for line in lines) + '\\l'}
        if not cfg.is_reachable(block.label):
            attrs['style'] = 'dashed'
        graph.add_node(block.label, **attrs)
    for block in func.blocks:
        term = block.terminator
        if term.opcode == 'br' and term.labels[0] != term.labels[1]:
            graph.add_edge(block.label, term.labels[0], label='T')
            graph.add_edge(block.label, term.labels[1], label='F')
        else:
            for succ in block.successors():
                graph.add_edge(block.label, succ)
    return graph


def _escape(text: str) -> str:
    return text.replace('\\', '\\\\').replace('"', '\\"')


def _quote(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def _attrs(attrs: Dict[str, str]) -> str:
    if not attrs:
        return ''
    return ' [' + ', '.join(f'{key}="{value}"' for key, value in sorted(attrs.items())) + ']'


def graph_to_dot(graph: networkx.DiGraph) -> str:
    """Serialize a graph built by ``cfg_graph``."""
    lines = [f"digraph {_quote(graph.graph.get('name', 'cfg'))} {{"]
    lines.append('  rankdir=TB;')
    lines.append('  node [shape=box, fontname="Courier New", fontsize=10];')
    lines.append('  edge [fontname="Courier New", fontsize=9];')
    for node, attrs in graph.nodes(data=True):
        lines.append(f"  {_quote(node)}{_attrs(attrs)};")
    for src, dst, attrs in graph.edges(data=True):
        lines.append(f"  {_quote(src)} -> {_quote(dst)}{_attrs(attrs)};")
    lines.append('}')
    return '\n'.join(lines) + '\n'


def cfg_to_dot(func: Function, annotations: Optional[Annotations] = None) -> str:
    return graph_to_dot(cfg_graph(func, annotations))


def write_cfg_dots(module: Module, directory: Union[str, Path],
                   annotations: Optional[Dict[str, Annotations]] = None,
                   functions: Optional[Iterable[str]] = None) -> List[Path]:
    """Write one ``<function>.dot`` file per function.

    Args:
        module: Module to render
        directory: Output directory (created if missing)
        annotations: Function name -> block annotations
        functions: Restrict to these function names

    Returns:
        Paths written, in module order
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    wanted = set(functions) if functions is not None else None
    written = []
    for func in module.functions:
        if wanted is not None and func.name not in wanted:
            continue
        path = directory / f"{func.name}.dot"
        path.write_text(cfg_to_dot(func, (annotations or {}).get(func.name)))
        written.append(path)
        logger.debug(f"wrote {path}")
    return written


def lcm_annotations(sets, slots, names: Sequence[str]) -> Annotations:
    """Block annotations listing the members of ``names`` as value numbers."""
    result: Annotations = {}
    for label in sets['ANTLOC']:
        lines = []
        for name in names:
            members = ', '.join(f"v{slots.vn_of_slot[s]}" for s in sets[name][label].slots())
            lines.append(f"{name} = {{{members}}}")
        result[label] = lines
    return result
