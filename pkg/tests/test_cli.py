#!/usr/bin/env python3
"""
Tests for the command-line interface.
"""

import json

import pytest
import yaml

from vnlcm.__main__ import main, parse_args
from vnlcm.corpus import CORPUS_DIR


F1 = str(CORPUS_DIR / 'f1_diamond.ir')


def _kv(text):
    return dict(line.split('=', 1) for line in text.splitlines() if '=' in line)


def test_parse_args_defaults():
    """Test subcommand defaults."""
    args = parse_args(['opt', F1])
    assert args.command == 'opt'
    assert args.passes == 'lcm-pre'
    assert args.dump_sets is None
    assert args.dot_sets == ['INSERTIN', 'INSERTOUT', 'REPLACEIN', 'REPLACEOUT']

    args = parse_args(['run', F1, '--args=-2,3', '--tape', '1,0'])
    assert args.args == [-2, 3]
    assert args.tape == [1, 0]


def test_no_command(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 1
    assert "No command specified" in capsys.readouterr().err


def test_opt_prints_ir(capsys, tmp_path):
    """Test that opt prints the optimized module and writes the JSON report."""
    report = tmp_path / 'report.json'
    main(['opt', F1, '--report-json', str(report)])
    out = capsys.readouterr().out
    assert out.startswith('func @f1(%a, %b) {')
    assert 'pre.v6' in out
    assert 'alloca' not in out

    data = json.loads(report.read_text())
    assert data['reports'][0]['function'] == 'f1'
    assert data['counters']['lcm']['replacements'] == 1


def test_opt_output_file(capsys, tmp_path):
    """Test -o and an explicit pass list."""
    target = tmp_path / 'out.ir'
    main(['opt', F1, '-p', 'split-crit', '-o', str(target)])
    assert capsys.readouterr().out == ''
    assert target.read_text().startswith('func @f1')


def test_opt_dumps(capsys):
    """Test the value number and set dumps."""
    main(['opt', F1, '--dump-vn', '--dump-sets'])
    out = capsys.readouterr().out
    assert "value numbers for @f1 (max_vn=9)" in out
    assert "sets for @f1" in out
    assert "slots: 0=v6" in out
    assert "  ANTLOC" in out and "  REPLACEOUT" in out

    main(['opt', F1, '--dump-sets=insertin,replacein'])
    out = capsys.readouterr().out
    assert "  INSERTIN   {v6}" in out
    assert "ANTLOC" not in out


def test_opt_check(capsys):
    """Test that --check runs the cross-checks without complaint."""
    main(['opt', str(CORPUS_DIR / 'f5_extended.ir'), '--check'])
    assert 'func @f5' in capsys.readouterr().out


def test_run_kv(capsys):
    """Test key=value output of the interpreter."""
    main(['run', F1, '--args=2,3', '--tape=1', '--kv'])
    values = _kv(capsys.readouterr().out)
    assert values['function'] == '@f1'
    assert values['status'] == 'returned'
    assert values['return'] == '5'
    assert values['prints'] == '5'
    assert values['op.add'] == '2'
    assert values['candidate_total'] == '3'

    main(['run', F1, '--args=2,3', '--tape=1', '--kv', '-p', 'lcm-pre'])
    assert _kv(capsys.readouterr().out)['op.add'] == '1'


def test_run_text(capsys):
    main(['run', F1, '--args=2,3'])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == '@f1: returned, returned 5'
    assert 'print 4' in out


def test_run_arity_error(capsys):
    """Test that a wrong argument count is an error, not a guess."""
    with pytest.raises(SystemExit) as excinfo:
        main(['run', F1, '--args=2'])
    assert excinfo.value.code == 1
    assert "Error: @f1 expects 2 argument(s), got 1" in capsys.readouterr().err


def test_parse_error_exit(capsys, tmp_path):
    """Test that malformed IR is reported with its location."""
    bad = tmp_path / 'bad.ir'
    bad.write_text("func @f() {\nentry:\n  %x = frob 1, 2\n  ret %x\n}\n")
    with pytest.raises(SystemExit) as excinfo:
        main(['opt', str(bad)])
    assert excinfo.value.code == 1
    assert "Error: ParseError at line 3, column 8" in capsys.readouterr().err


def test_diff_file(capsys):
    """Test the differential command on one file."""
    main(['diff', F1])
    lines = capsys.readouterr().out.splitlines()
    assert 'function=@f1 passed=true' in lines[0]
    assert 'never_worse=true' in lines[0]
    assert lines[-1] == 'pipelines=base,lcm-pre failed=0'


def test_diff_corpus(capsys):
    """Test the whole shipped corpus under the shipped cases."""
    main(['diff', '--corpus'])
    out = capsys.readouterr().out
    assert 'passed=false' not in out
    assert out.splitlines()[-1].endswith('failed=0')


def test_diff_needs_inputs(capsys):
    with pytest.raises(SystemExit):
        main(['diff'])
    assert "Error: no input files" in capsys.readouterr().err


def test_diff_custom_cases(capsys, tmp_path):
    """Test a user-supplied case table."""
    cases = tmp_path / 'cases.yaml'
    cases.write_text(yaml.safe_dump({'cases': [{'args': [1, 2], 'tape': [1]}, {'args': [4]}]}))
    main(['diff', F1, '--cases', str(cases)])
    assert 'cases=2' in capsys.readouterr().out


def test_stats(capsys):
    """Test the per-function statistics line and the summary."""
    main(['stats', F1])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ("function=@f1 max_vn=9 width=1 width_ratio=0.1111 insertions=1 "
                        "replacements=1 lcse_removed=0 skipped_vns=0")
    assert lines[1].startswith('functions=1 avg_width_ratio=0.1111')

    main(['stats', '--corpus', '--summary-only'])
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    assert _kv(lines[0].replace(' ', '\n'))['total_skipped_vns'] != '0'


def test_dot(capsys, tmp_path):
    """Test that dot files carry the chosen sets."""
    main(['dot', F1, '-o', str(tmp_path), '--sets', 'insertin,replacein'])
    assert 'f1.dot' in capsys.readouterr().out
    text = (tmp_path / 'f1.dot').read_text()
    assert text.startswith('digraph "f1" {')
    assert 'INSERTIN = {v6}' in text
    assert 'REPLACEIN = {v6}' in text
    assert 'INSERTOUT' not in text


def test_dot_rejects_unknown_set(capsys):
    with pytest.raises(SystemExit):
        main(['dot', F1, '--sets', 'EARLIEST'])
    assert 'unknown set(s) EARLIEST' in capsys.readouterr().err


def test_config_roundtrip(capsys, tmp_path):
    """Test writing the default configuration and running with it."""
    path = tmp_path / 'vnlcm.yaml'
    main(['config', '-o', str(path), '--format', 'yaml'])
    assert 'Default configuration saved' in capsys.readouterr().out
    assert yaml.safe_load(path.read_text())['optimizer']['jobs'] == 1

    main(['-c', str(path), 'run', F1, '--args=2,3', '--kv'])
    assert _kv(capsys.readouterr().out)['return'] == '5'


def test_invalid_config(capsys, tmp_path):
    """Test that a bad configuration value stops the command."""
    path = tmp_path / 'bad.yaml'
    path.write_text(yaml.safe_dump({'optimizer': {'jobs': 0}}))
    with pytest.raises(SystemExit) as excinfo:
        main(['-c', str(path), 'run', F1, '--args=2,3'])
    assert excinfo.value.code == 1
    err = capsys.readouterr().err
    assert "Configuration validation errors" in err
    assert "optimizer.jobs" in err


def test_log_dir(capsys, tmp_path):
    """Test that opt leaves a JSON run summary and a log file."""
    main(['--log-dir', str(tmp_path), '--log-format', 'json', 'opt', F1])
    capsys.readouterr()
    summaries = list(tmp_path.glob('f1_*.json'))
    assert len(summaries) == 1
    summary = json.loads(summaries[0].read_text())
    assert summary['metadata']['run_name'] == 'f1'
    assert any(event['event_type'] == 'pass_result' for event in summary['events'])
    assert (tmp_path / 'vnlcm.log').exists()
