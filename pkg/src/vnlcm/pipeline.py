"""
Optimization Pipeline

Runs ordered pass lists over modules, validating the IR after every pass,
and provides the comparison and statistics drivers used by the CLI.
"""

import copy
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from vnlcm.errors import IRValidationError, OptimizerError, UnknownPassError
from vnlcm.interp.differential import Case, DiffVerdict, differential
from vnlcm.ir.core import Function, Module
from vnlcm.ir.parser import load_module
from vnlcm.ir.validate import validate_function
from vnlcm.passes import AVAILABLE_PASSES, PIPELINE_PRESETS, PassResult, get_pass
from vnlcm.passes.lcm import LcmAnalysis, PreReport, analyze_function
from vnlcm.utils.config import ConfigDict, get_default_config
from vnlcm.utils.logging import PipelineLogger
from vnlcm.utils.statistics import report_row, summarize_rows


logger = logging.getLogger('vnlcm.pipeline')

PassSpec = Union[str, Sequence[str], None]


def resolve_passes(passes: PassSpec, presets: Optional[Mapping[str, Sequence[str]]] = None) -> List[str]:
    """Turn a preset name, a comma-separated list or a list into pass names.

    Args:
        passes: 'lcm-pre', 'mem2reg,simplifycfg', ['mem2reg'], '' or None
        presets: Named pipelines (defaults to the built-in presets)

    Returns:
        Pass names in order

    Raises:
        UnknownPassError: If a name is neither a preset nor a registered pass
    """
    presets = PIPELINE_PRESETS if presets is None else presets
    if passes is None:
        return []
    if isinstance(passes, str):
        if passes in presets:
            return list(presets[passes])
        names = [name.strip() for name in passes.split(',') if name.strip()]
    else:
        names = list(passes)
    for name in names:
        if name not in AVAILABLE_PASSES:
            raise UnknownPassError(f"Pass '{name}' not available")
    return names


@dataclass
class PipelineRun:
    """Result of running a pipeline over a module."""
    module: Module
    passes: List[str]
    results: List[PassResult] = field(default_factory=list)

    @property
    def reports(self) -> List[PreReport]:
        return [r.report for r in self.results if isinstance(r.report, PreReport)]

    @property
    def diagnostics(self) -> List[str]:
        return [d for r in self.results for d in r.diagnostics]

    def counters(self) -> Dict[str, Dict[str, int]]:
        """Counters summed per pass name over all functions."""
        totals: Dict[str, Dict[str, int]] = {}
        for result in self.results:
            bucket = totals.setdefault(result.name, {})
            for key, value in result.counters.items():
                bucket[key] = bucket.get(key, 0) + value
        return totals

    def to_dict(self) -> Dict[str, Any]:
        return {
            'passes': list(self.passes),
            'results': [r.to_dict() for r in self.results],
            'reports': [r.to_dict() for r in self.reports],
            'counters': self.counters(),
        }


class OptimizationPipeline:
    """An ordered list of passes plus the settings to run them with."""

    def __init__(self, passes: PassSpec, config: Optional[ConfigDict] = None,
                 run_logger: Optional[PipelineLogger] = None):
        """Initialize the pipeline.

        Args:
            passes: Preset name, comma-separated names or a list of names
            config: Configuration dictionary (if None, default config is used)
            run_logger: Structured event sink
        """
        self.config = config if config is not None else get_default_config()
        self.pass_names = resolve_passes(passes, self.config.get('pipelines') or PIPELINE_PRESETS)
        optimizer = self.config.get('optimizer', {})
        self.jobs = max(1, int(optimizer.get('jobs', 1)))
        self.validate = bool(optimizer.get('validate_after_each_pass', True))
        self.check = bool(optimizer.get('check_dataflow', False))
        self.run_logger = run_logger

    def _make_pass(self, name: str):
        options = {'check': self.check} if name == 'lcm' else {}
        return get_pass(name)(**options)

    def run_function(self, func: Function) -> List[PassResult]:
        """Apply every pass to ``func`` in place.

        Raises:
            IRValidationError: If a pass leaves ``func`` invalid
        """
        if self.validate:
            problems = validate_function(func)
            if problems:
                raise IRValidationError(problems)
        results = []
        for name in self.pass_names:
            if self.run_logger:
                self.run_logger.pass_start(name, func.name)
            result = self._make_pass(name).run_on_function(func)
            results.append(result)
            if self.run_logger:
                self.run_logger.pass_result(result)
            if self.validate:
                problems = validate_function(func)
                if problems:
                    if self.run_logger:
                        self.run_logger.validation_error(name, func.name, problems)
                    raise IRValidationError(problems, pass_name=name)
        return results

    def run(self, module: Module) -> PipelineRun:
        """Optimize every function of ``module`` in place.

        Functions are independent, so with ``jobs > 1`` they run on a thread
        pool; results stay in module order.
        """
        if self.jobs > 1 and len(module.functions) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                per_function = list(pool.map(self.run_function, module.functions))
        else:
            per_function = [self.run_function(func) for func in module.functions]
        run = PipelineRun(module, list(self.pass_names), [r for rs in per_function for r in rs])
        if self.run_logger:
            for report in run.reports:
                self.run_logger.log_metric('width_ratio', report.width_ratio, report.function)
                self.run_logger.log_metric('insertions', len(report.insertions), report.function)
                self.run_logger.log_metric('replacements', len(report.replacements), report.function)
        logger.info(f"pipeline [{','.join(self.pass_names)}] ran on {len(module.functions)} function(s)")
        return run


def optimize(module: Module, passes: PassSpec, config: Optional[ConfigDict] = None,
             run_logger: Optional[PipelineLogger] = None) -> PipelineRun:
    """Optimize a deep copy of ``module``; the input is left untouched."""
    return OptimizationPipeline(passes, config, run_logger).run(copy.deepcopy(module))


def run_pipeline(input_path: Union[str, Path], passes: PassSpec,
                 config: Optional[ConfigDict] = None,
                 run_logger: Optional[PipelineLogger] = None) -> PipelineRun:
    """Parse an IR file and run ``passes`` over it."""
    return OptimizationPipeline(passes, config, run_logger).run(load_module(input_path))


def pipeline_pair(config: Optional[ConfigDict] = None,
                  before: Optional[str] = None, after: Optional[str] = None) -> Tuple[str, str]:
    """Pipeline names to compare, from arguments or the ``diff`` section."""
    config = config if config is not None else get_default_config()
    section = config.get('diff', {})
    return before or section.get('before', 'base'), after or section.get('after', 'lcm-pre')


def compare_pipelines(module: Module, cases: Sequence[Case],
                      before: PassSpec = 'base', after: PassSpec = 'lcm-pre',
                      config: Optional[ConfigDict] = None,
                      functions: Optional[Sequence[str]] = None) -> List[DiffVerdict]:
    """Optimize ``module`` with two pipelines and diff every function.

    Args:
        module: Module to optimize (not modified)
        cases: (args, tape) pairs; arguments are fitted to each arity
        before: Reference pipeline
        after: Pipeline under test
        config: Configuration dictionary
        functions: Restrict to these functions

    Returns:
        One verdict per function, in module order
    """
    config = config if config is not None else get_default_config()
    fuel = int(config.get('interpreter', {}).get('fuel', 10_000_000))
    jobs = max(1, int(config.get('optimizer', {}).get('jobs', 1)))
    reference = optimize(module, before, config).module
    candidate = optimize(module, after, config).module
    names = list(functions) if functions is not None else [f.name for f in module.functions]
    return [differential(reference, candidate, name, cases, fuel, jobs) for name in names]


def collect_stats(modules: Sequence[Module], passes: PassSpec = 'lcm-pre',
                  config: Optional[ConfigDict] = None) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """Run ``passes`` (which must include lcm) and gather per-function rows.

    Returns:
        (rows, summary) as understood by ``format_statistics_report``

    Raises:
        OptimizerError: If the pipeline does not run lcm
    """
    config = config if config is not None else get_default_config()
    if 'lcm' not in resolve_passes(passes, config.get('pipelines') or PIPELINE_PRESETS):
        raise OptimizerError("stats needs a pipeline that includes the lcm pass")
    rows: List[Dict[str, Any]] = []
    for module in modules:
        run = optimize(module, passes, config)
        rows.extend(report_row(report) for report in run.reports)
    return rows, summarize_rows(rows)


def analysis_snapshot(module: Module, passes: PassSpec = 'lcm-pre',
                      config: Optional[ConfigDict] = None) -> Dict[str, Tuple[Function, LcmAnalysis]]:
    """The LCM analysis each function sees inside ``passes``.

    The passes before the first ``lcm`` run on a copy of ``module``; every
    function is then analyzed (critical edges split, values numbered, sets
    solved) without being rewritten. A pipeline without ``lcm`` is analyzed
    at its end.

    Returns:
        Function name to (analyzed function, analysis), in module order
    """
    config = config if config is not None else get_default_config()
    names = resolve_passes(passes, config.get('pipelines') or PIPELINE_PRESETS)
    prefix = names[:names.index('lcm')] if 'lcm' in names else names
    prepared = optimize(module, prefix, config).module
    snapshot: Dict[str, Tuple[Function, LcmAnalysis]] = {}
    for func in prepared.functions:
        snapshot[func.name] = (func, analyze_function(func))
    return snapshot
