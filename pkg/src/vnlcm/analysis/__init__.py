"""
Analyses

CFG facts, natural loops and the bit-vector dataflow framework.
"""

from vnlcm.analysis.cfg import CfgInfo, analyze_cfg
from vnlcm.analysis.loops import Loop, LoopInfo, find_natural_loops
from vnlcm.analysis.dataflow import (
    BitVector, DataflowSpec, Direction, Solution, is_fixpoint, solve, solve_round_robin,
)
