"""
Differential Testing

Runs two versions of a module on the same cases and compares observable
behavior and dynamic candidate-operation counts.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from vnlcm.interp.interpreter import DEFAULT_FUEL, Behavior, execute
from vnlcm.ir.core import Module


logger = logging.getLogger('vnlcm.interp.differential')

Case = Tuple[Sequence[int], Sequence[int]]


@dataclass
class CaseResult:
    args: List[int]
    tape: List[int]
    before: Behavior
    after: Behavior
    candidates_before: int
    candidates_after: int

    @property
    def equal(self) -> bool:
        return self.before == self.after


@dataclass
class DiffVerdict:
    function: str
    cases: List[CaseResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(case.equal for case in self.cases)

    @property
    def counts(self) -> List[Tuple[int, int]]:
        return [(c.candidates_before, c.candidates_after) for c in self.cases]

    @property
    def never_worse(self) -> bool:
        return all(after <= before for before, after in self.counts)

    def mismatches(self) -> List[CaseResult]:
        return [case for case in self.cases if not case.equal]

    def to_dict(self) -> Dict[str, object]:
        return {
            'function': self.function,
            'passed': self.passed,
            'cases': [
                {
                    'args': case.args,
                    'tape': case.tape,
                    'equal': case.equal,
                    'candidates': [case.candidates_before, case.candidates_after],
                }
                for case in self.cases
            ],
        }


def fit_arguments(args: Sequence[int], arity: int) -> List[int]:
    """Truncate or zero-pad ``args`` to ``arity`` values."""
    values = list(args)[:arity]
    return values + [0] * (arity - len(values))


def differential(before: Module, after: Module, func_name: str, cases: Sequence[Case],
                 fuel: int = DEFAULT_FUEL, jobs: int = 1) -> DiffVerdict:
    """Compare ``@func_name`` in two modules over ``cases``.

    Arguments are fitted to the function's arity, so one case table serves
    functions with different parameter counts.

    Args:
        before: Reference module
        after: Transformed module
        func_name: Function to run
        cases: (args, tape) pairs
        fuel: Step budget per run
        jobs: Worker threads

    Returns:
        Verdict with one entry per case, in case order
    """
    arity = len(before.function(func_name).params)

    def run_case(case: Case) -> CaseResult:
        args, tape = case
        fitted = fit_arguments(args, arity)
        ref = execute(before, func_name, fitted, tape, fuel)
        out = execute(after, func_name, fitted, tape, fuel)
        return CaseResult(fitted, list(tape), ref.behavior, out.behavior,
                          ref.candidate_total, out.candidate_total)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_case, cases))
    else:
        results = [run_case(case) for case in cases]
    verdict = DiffVerdict(func_name, results)
    for case in verdict.mismatches():
        logger.warning(
            f"@{func_name} args={case.args} tape={case.tape}: "
            f"behavior {case.before} != {case.after}"
        )
    return verdict
