"""
Command-line interface for the vnlcm optimizer.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from vnlcm.corpus import corpus_cases, corpus_files
from vnlcm.errors import OptimizerError
from vnlcm.interp.interpreter import execute
from vnlcm.ir.core import Module
from vnlcm.ir.parser import load_module
from vnlcm.ir.printer import print_module
from vnlcm.passes.lcm import ALL_SETS, format_lcm_sets
from vnlcm.passes.value_numbering import format_value_table
from vnlcm.pipeline import (
    OptimizationPipeline, analysis_snapshot, collect_stats, compare_pipelines,
    optimize, pipeline_pair,
)
from vnlcm.utils.config import (
    get_config_schema, get_default_config, load_config_from_args, save_config,
    validate_config,
)
from vnlcm.utils.dot import lcm_annotations, write_cfg_dots
from vnlcm.utils.logging import PipelineLogger, configure_logging
from vnlcm.utils.statistics import format_statistics_report


def _int_list(text: str) -> List[int]:
    """Parse '2,3,-1' into integers; '' gives an empty list."""
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _set_names(text: str) -> List[str]:
    names = [name.strip().upper() for name in text.split(',') if name.strip()]
    unknown = [name for name in names if name not in ALL_SETS]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown set(s) {', '.join(unknown)}; choose from {', '.join(ALL_SETS)}"
        )
    return names


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Args:
        argv: Arguments (defaults to sys.argv[1:])

    Returns:
        Parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog='vnlcm',
        description="Value-number driven lazy code motion optimizer",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )

    parser.add_argument(
        '-c', '--config',
        help="Path to configuration file",
        type=str
    )

    parser.add_argument(
        '-v', '--verbose',
        help="Increase output verbosity",
        action='store_true'
    )

    parser.add_argument(
        '--log-format',
        help="Log record format",
        choices=['text', 'json'],
        type=str
    )

    parser.add_argument(
        '--log-dir',
        help="Directory for log files and run summaries",
        type=str
    )

    subparsers = parser.add_subparsers(
        title='commands',
        dest='command',
        help='Command to run'
    )

    # Optimize command
    opt_parser = subparsers.add_parser('opt', help='Run a pass pipeline over an IR file')
    opt_parser.add_argument('input', help="IR file", type=str)
    opt_parser.add_argument(
        '-p', '--passes',
        help="Pipeline name or comma-separated pass list",
        type=str,
        default='lcm-pre'
    )
    opt_parser.add_argument('-o', '--output', help="Write the optimized IR here", type=str)
    opt_parser.add_argument('--dump-vn', help="Print value numbers at the lcm point", action='store_true')
    opt_parser.add_argument(
        '--dump-sets',
        help="Print LCM sets at the lcm point (comma-separated names, or 'all')",
        type=str,
        nargs='?',
        const='all'
    )
    opt_parser.add_argument('--check', help="Cross-check dataflow solutions", action='store_true')
    opt_parser.add_argument('--report-json', help="Write pass results and PRE reports as JSON", type=str)
    opt_parser.add_argument('--dot', help="Write annotated CFGs into this directory", type=str)
    opt_parser.add_argument(
        '--dot-sets',
        help="LCM sets shown in --dot output",
        type=_set_names,
        default=['INSERTIN', 'INSERTOUT', 'REPLACEIN', 'REPLACEOUT']
    )
    opt_parser.add_argument('-j', '--jobs', help="Worker threads", type=int)

    # Run command
    run_parser = subparsers.add_parser('run', help='Interpret a function')
    run_parser.add_argument('input', help="IR file", type=str)
    run_parser.add_argument('-f', '--function', help="Function to run (default: the first)", type=str)
    run_parser.add_argument('--args', help="Comma-separated arguments", type=_int_list, default=[])
    run_parser.add_argument('--tape', help="Comma-separated opaque inputs", type=_int_list, default=[])
    run_parser.add_argument('--fuel', help="Instruction budget", type=int)
    run_parser.add_argument('-p', '--passes', help="Optimize with this pipeline first", type=str, default='')
    run_parser.add_argument('--kv', help="Print key=value lines", action='store_true')

    # Differential command
    diff_parser = subparsers.add_parser('diff', help='Compare two pipelines by execution')
    diff_parser.add_argument('inputs', help="IR files", type=str, nargs='*')
    diff_parser.add_argument('--corpus', help="Use the shipped corpus", action='store_true')
    diff_parser.add_argument('--before', help="Reference pipeline", type=str)
    diff_parser.add_argument('--after', help="Pipeline under test", type=str)
    diff_parser.add_argument('--cases', help="YAML case table (default: the shipped one)", type=str)
    diff_parser.add_argument('--fuel', help="Instruction budget per run", type=int)
    diff_parser.add_argument('-j', '--jobs', help="Worker threads", type=int)

    # Statistics command
    stats_parser = subparsers.add_parser('stats', help='Bit-vector width statistics')
    stats_parser.add_argument('inputs', help="IR files", type=str, nargs='*')
    stats_parser.add_argument('--corpus', help="Use the shipped corpus", action='store_true')
    stats_parser.add_argument('-p', '--passes', help="Pipeline (must include lcm)", type=str, default='lcm-pre')
    stats_parser.add_argument('--summary-only', help="Omit per-function lines", action='store_true')

    # DOT command
    dot_parser = subparsers.add_parser('dot', help='Write annotated CFGs in dot format')
    dot_parser.add_argument('input', help="IR file", type=str)
    dot_parser.add_argument('-o', '--output', help="Output directory", type=str, default='.')
    dot_parser.add_argument('-p', '--passes', help="Pipeline to analyze at", type=str, default='lcm-pre')
    dot_parser.add_argument(
        '--sets',
        help="LCM sets to show",
        type=_set_names,
        default=['INSERTIN', 'INSERTOUT', 'REPLACEIN', 'REPLACEOUT']
    )

    # Generate config command
    config_parser = subparsers.add_parser('config', help='Generate default configuration file')
    config_parser.add_argument('-o', '--output', help="Output file path", type=str, required=True)
    config_parser.add_argument(
        '--format',
        help="Output format",
        choices=['json', 'yaml'],
        default='json'
    )

    return parser.parse_args(argv)


def load_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Build and validate the configuration for ``args``.

    Exits with status 1 on an unreadable or invalid configuration.
    """
    try:
        config = load_config_from_args(args)
    except (OSError, ValueError) as e:
        print(f"Error loading configuration: {e}", file=sys.stderr)
        sys.exit(1)

    errors = validate_config(config, get_config_schema())
    if errors:
        print("Configuration validation errors:", file=sys.stderr)
        for error in errors:
            print(f"  - {error}", file=sys.stderr)
        sys.exit(1)

    return config


def _inputs(args: argparse.Namespace) -> Dict[str, Module]:
    paths = [Path(p) for p in getattr(args, 'inputs', [])]
    if getattr(args, 'corpus', False):
        paths.extend(corpus_files())
    if not paths:
        raise OptimizerError("no input files (give paths or --corpus)")
    return {str(path): load_module(path) for path in paths}


def run_opt(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    module = load_module(args.input)
    run_logger = PipelineLogger(Path(args.input).stem, config['general'].get('log_dir'))
    run_logger.set_configuration(config)

    if args.dump_vn or args.dump_sets:
        names = ALL_SETS if args.dump_sets in (None, 'all') else tuple(_set_names(args.dump_sets))
        for func, analysis in analysis_snapshot(module, args.passes, config).values():
            if args.dump_vn:
                print(format_value_table(func, analysis.values), end='')
            if args.dump_sets:
                print(f"sets for @{func.name}")
                print(format_lcm_sets(analysis.sets, analysis.slots, analysis.cfg, names), end='')

    if args.dot:
        snapshot = analysis_snapshot(module, args.passes, config)
        annotations = {
            name: lcm_annotations(analysis.sets, analysis.slots, args.dot_sets)
            for name, (_, analysis) in snapshot.items()
        }
        analyzed = Module([func for func, _ in snapshot.values()])
        for path in write_cfg_dots(analyzed, args.dot, annotations):
            print(f"wrote {path}", file=sys.stderr)

    run = OptimizationPipeline(args.passes, config, run_logger).run(module)
    text = print_module(run.module)
    if args.output:
        Path(args.output).write_text(text)
    else:
        print(text, end='')

    if args.report_json:
        with open(args.report_json, 'w') as f:
            json.dump(run.to_dict(), f, indent=2)

    run_logger.finish()
    return 0


def run_interpreter(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    module = load_module(args.input)
    if args.passes:
        module = optimize(module, args.passes, config).module
    name = args.function or module.functions[0].name
    fuel = args.fuel or int(config['interpreter']['fuel'])
    profile = execute(module, name, args.args, args.tape, fuel)
    behavior = profile.behavior

    if args.kv:
        print(f"function=@{name}")
        print(f"status={behavior.status}")
        print(f"return={'' if behavior.returned is None else behavior.returned}")
        print(f"prints={','.join(str(v) for v in behavior.prints)}")
        print(f"steps={profile.steps}")
        print(f"candidate_total={profile.candidate_total}")
        for opcode, count in sorted(profile.op_counts.items()):
            print(f"op.{opcode}={count}")
    else:
        print(f"@{name}: {behavior.status}" +
              (f", returned {behavior.returned}" if behavior.returned is not None else ''))
        for value in behavior.prints:
            print(f"print {value}")
        counts = ', '.join(f"{op}={n}" for op, n in sorted(profile.op_counts.items()))
        print(f"{profile.steps} steps, {profile.candidate_total} candidate ops ({counts})")
    return 0


def run_diff(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    modules = _inputs(args)
    cases = corpus_cases(args.cases)
    before, after = pipeline_pair(config, args.before, args.after)
    failed = 0
    for source, module in modules.items():
        for verdict in compare_pipelines(module, cases, before, after, config):
            total_before = sum(b for b, _ in verdict.counts)
            total_after = sum(a for _, a in verdict.counts)
            print(f"input={source} function=@{verdict.function} passed={str(verdict.passed).lower()} "
                  f"cases={len(verdict.cases)} never_worse={str(verdict.never_worse).lower()} "
                  f"candidates_before={total_before} candidates_after={total_after}")
            for case in verdict.mismatches():
                print(f"  mismatch args={case.args} tape={case.tape}: {before} {case.before} vs {after} {case.after}")
            if not verdict.passed:
                failed += 1
    print(f"pipelines={before},{after} failed={failed}")
    return 1 if failed else 0


def run_stats(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    modules = _inputs(args)
    rows, summary = collect_stats(list(modules.values()), args.passes, config)
    print(format_statistics_report(rows, summary, detailed=not args.summary_only), end='')
    return 0


def run_dot(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    snapshot = analysis_snapshot(load_module(args.input), args.passes, config)
    annotations = {
        name: lcm_annotations(analysis.sets, analysis.slots, args.sets)
        for name, (_, analysis) in snapshot.items()
    }
    analyzed = Module([func for func, _ in snapshot.values()])
    for path in write_cfg_dots(analyzed, args.output, annotations):
        print(f"wrote {path}")
    return 0


def generate_config(args: argparse.Namespace) -> None:
    """Generate default configuration file."""
    config = get_default_config()

    try:
        save_config(config, args.output, args.format)
        print(f"Default configuration saved to {args.output}")
    except Exception as e:
        print(f"Error saving configuration: {e}", file=sys.stderr)
        sys.exit(1)


COMMANDS = {
    'opt': run_opt,
    'run': run_interpreter,
    'diff': run_diff,
    'stats': run_stats,
    'dot': run_dot,
}


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point."""
    args = parse_args(argv)

    if args.command is None:
        print("No command specified", file=sys.stderr)
        print("Use --help for command usage", file=sys.stderr)
        sys.exit(1)

    if args.command == 'config':
        generate_config(args)
        return

    config = load_config(args)
    configure_logging(config)

    try:
        status = COMMANDS[args.command](args, config)
    except (OptimizerError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)

    if status:
        sys.exit(status)


if __name__ == '__main__':
    main()
