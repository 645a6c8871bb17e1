"""
IR Validation

Structural and SSA checks. ``validate`` never raises; it returns a list of
human-readable diagnostics, empty when the module is well formed.
"""

import logging
from typing import Dict, List, Set, Tuple

from vnlcm.ir.core import Function, Module, Var


logger = logging.getLogger('vnlcm.ir.validate')


def _structural(func: Function, diags: List[str]) -> bool:
    """Checks that do not need a CFG. Returns False if CFG analysis is unsafe."""
    ok = True
    where = f"@{func.name}"
    if not func.blocks:
        diags.append(f"{where}: function has no blocks")
        return False
    labels: Set[str] = set()
    for block in func.blocks:
        if block.label in labels:
            diags.append(f"{where}: duplicate block label '{block.label}'")
            ok = False
        labels.add(block.label)
    for block in func.blocks:
        loc = f"{where}/{block.label}"
        if block.terminator is None or not block.terminator.is_terminator:
            diags.append(f"no terminator in {loc}")
            ok = False
        for phi in block.phis:
            if not phi.is_phi:
                diags.append(f"{loc}: non-phi '{phi.text()}' in phi section")
        for instr in block.body:
            if instr.is_phi:
                diags.append(f"{loc}: phi '{instr.text()}' after non-phi instruction")
            elif instr.is_terminator:
                diags.append(f"{loc}: terminator '{instr.text()}' in block body")
                ok = False
        for instr in block.instructions():
            for label in instr.labels:
                if label not in labels:
                    diags.append(f"{loc}: unknown label '{label}' in '{instr.text()}'")
                    ok = False
    return ok


def validate_function(func: Function) -> List[str]:
    """Validate a single function.

    Checks block structure, label references, unique SSA definitions, phi
    incoming labels against predecessors, and that every use is dominated by
    its definition.
    """
    from vnlcm.analysis.cfg import analyze_cfg

    diags: List[str] = []
    if not _structural(func, diags):
        return diags
    where = f"@{func.name}"

    defs: Dict[str, Tuple[str, int]] = {}
    for param in func.params:
        if param in defs:
            diags.append(f"{where}: duplicate parameter '%{param}'")
        defs[param] = ('', -1)
    for block in func.blocks:
        for index, instr in enumerate(block.instructions()):
            if instr.result is None:
                continue
            if instr.result in defs:
                diags.append(f"{where}/{block.label}: duplicate definition of '%{instr.result}'")
            defs[instr.result] = (block.label, index)

    cfg = analyze_cfg(func)
    if cfg.preds[func.entry]:
        diags.append(f"{where}: entry block '{func.entry}' has predecessors")

    for block in func.blocks:
        loc = f"{where}/{block.label}"
        preds = set(cfg.preds[block.label])
        for phi in block.phis:
            incoming = phi.labels
            if len(set(incoming)) != len(incoming):
                diags.append(f"{loc}: phi '%{phi.result}' has duplicate incoming labels")
            if set(incoming) != preds:
                diags.append(
                    f"{loc}: phi '%{phi.result}' incoming {sorted(set(incoming))} "
                    f"does not match predecessors {sorted(preds)}"
                )
        if not cfg.is_reachable(block.label):
            continue
        for index, instr in enumerate(block.instructions()):
            for position, operand in enumerate(instr.operands):
                if not isinstance(operand, Var):
                    continue
                name = operand.name
                site = defs.get(name)
                if site is None:
                    diags.append(f"{loc}: use of undefined '%{name}' in '{instr.text()}'")
                    continue
                def_block, def_index = site
                if def_block == '':
                    continue
                if instr.is_phi:
                    # The definition must dominate the end of the incoming block.
                    pred = instr.labels[position]
                    if cfg.is_reachable(pred) and not cfg.dominates(def_block, pred):
                        diags.append(
                            f"dominance violation at {loc}: '%{name}' does not reach "
                            f"phi '%{instr.result}' along edge from '{pred}'"
                        )
                    continue
                if def_block == block.label:
                    if def_index >= index:
                        diags.append(f"dominance violation at {loc}: '%{name}' used before its definition")
                elif not cfg.is_reachable(def_block) or not cfg.dominates(def_block, block.label):
                    diags.append(
                        f"dominance violation at {loc}: definition of '%{name}' in "
                        f"'{def_block}' does not dominate use in '{instr.text()}'"
                    )
    return diags


def validate(module: Module) -> List[str]:
    """Validate every function of a module.

    Args:
        module: Module to check

    Returns:
        Diagnostics; empty iff the module is well formed
    """
    diags: List[str] = []
    names: Set[str] = set()
    for func in module.functions:
        if func.name in names:
            diags.append(f"duplicate function '@{func.name}'")
        names.add(func.name)
        diags.extend(validate_function(func))
    for diag in diags:
        logger.debug(diag)
    return diags
