"""
Optimization Passes

Function-level passes addressable by name, and the pipeline presets built
from them.
"""

from vnlcm.errors import UnknownPassError
from vnlcm.passes.base import PassBase, PassResult
from vnlcm.passes.critical_edges import SplitCriticalEdgesPass, split_critical_edges
from vnlcm.passes.lcm import LcmPass, PreReport, pre_pass
from vnlcm.passes.loop_rotate import LoopRotatePass, rotate_loops
from vnlcm.passes.mem2reg import Mem2RegPass, mem2reg_promote
from vnlcm.passes.simplify_cfg import SimplifyCfgPass, simplify_cfg
from vnlcm.passes.value_numbering import ReassociatePass, assign_value_numbers

# Dictionary of available passes
AVAILABLE_PASSES = {
    'mem2reg': Mem2RegPass,
    'loop-rotate': LoopRotatePass,
    'split-crit': SplitCriticalEdgesPass,
    'reassociate': ReassociatePass,
    'lcm': LcmPass,
    'simplifycfg': SimplifyCfgPass,
}

PIPELINE_PRESETS = {
    'base': ['mem2reg', 'loop-rotate', 'reassociate', 'mem2reg', 'simplifycfg'],
    'lcm-pre': ['mem2reg', 'loop-rotate', 'reassociate', 'lcm', 'mem2reg', 'simplifycfg'],
}


def get_pass(name):
    """Get a pass class by name.

    Args:
        name (str): Name of the pass to get

    Returns:
        PassBase: The pass class

    Raises:
        UnknownPassError: If the pass is not available
    """
    if name not in AVAILABLE_PASSES:
        raise UnknownPassError(f"Pass '{name}' not available")
    return AVAILABLE_PASSES[name]
