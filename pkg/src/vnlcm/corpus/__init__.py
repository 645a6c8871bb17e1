"""
Program Corpus

Small IR programs shipped with the package, each built around one kind of
redundancy or control-flow shape, plus a table of argument/tape cases to
run them on.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import yaml

from vnlcm.ir.core import Module
from vnlcm.ir.parser import load_module

CORPUS_DIR = Path(__file__).resolve().parent
CASES_FILE = CORPUS_DIR / 'cases.yaml'

Case = Tuple[List[int], List[int]]


def corpus_files() -> List[Path]:
    return sorted(CORPUS_DIR.glob('*.ir'))


def load_corpus() -> Dict[str, Module]:
    """Program name (file stem) to parsed module, sorted by name."""
    return {path.stem: load_module(path) for path in corpus_files()}


def load_program(name: str) -> Module:
    path = CORPUS_DIR / f"{name}.ir"
    if not path.exists():
        raise FileNotFoundError(f"No corpus program named '{name}'")
    return load_module(path)


def load_cases(path: Union[str, Path]) -> List[Case]:
    """Read a case table.

    The file holds a ``cases`` list whose entries have optional ``args`` and
    ``tape`` integer lists.
    """
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}
    cases = []
    for i, entry in enumerate(data.get('cases', [])):
        entry = entry or {}
        args = entry.get('args', []) or []
        tape = entry.get('tape', []) or []
        if not all(isinstance(v, int) for v in list(args) + list(tape)):
            raise ValueError(f"{path}: case {i} has non-integer values")
        cases.append((list(args), list(tape)))
    return cases


def corpus_cases(path: Optional[Union[str, Path]] = None) -> List[Case]:
    """Cases from ``path``, or the shipped table."""
    return load_cases(path or CASES_FILE)
