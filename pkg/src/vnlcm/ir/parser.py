"""
IR Parser

Parses the textual SSA IR into a Module. Errors carry the line and column of
the offending token.
"""

import re
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from vnlcm.errors import ParseError
from vnlcm.ir.core import (
    BINARY_OPCODES, CMP_CONDITIONS, INT64_MAX, INT64_MIN,
    Block, Const, Function, Instruction, Module, Operand, Var,
)


logger = logging.getLogger('vnlcm.ir.parser')

_TOKEN_RE = re.compile(r"""
    (?P<newline>\n)
  | (?P<space>[ \t\r]+)
  | (?P<comment>//[^\n]*)
  | (?P<local>%[A-Za-z0-9_.]+)
  | (?P<global>@[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>[(){}\[\],:=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """Split IR text into tokens, dropping whitespace and comments."""
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind not in ('space', 'comment'):
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        # instruction -> token where it started, for post-parse diagnostics
        self.where: Dict[int, Token] = {}

    # -- token helpers -------------------------------------------------
    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != 'eof':
            self.pos += 1
        return token

    def error(self, reason: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.peek()
        return ParseError(reason, token.line, token.column)

    def expect_punct(self, char: str) -> Token:
        token = self.peek()
        if token.kind != 'punct' or token.text != char:
            found = token.text or 'end of input'
            raise self.error(f"expected '{char}', found '{found}'")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            found = token.text or 'end of input'
            raise self.error(f"expected {what}, found '{found}'")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        token = self.peek()
        if token.kind != 'ident' or token.text != word:
            found = token.text or 'end of input'
            raise self.error(f"expected '{word}', found '{found}'")
        return self.advance()

    def at_punct(self, char: str) -> bool:
        token = self.peek()
        return token.kind == 'punct' and token.text == char

    # -- grammar -------------------------------------------------------
    def parse_module(self) -> Module:
        module = Module()
        seen: Set[str] = set()
        if self.peek().kind == 'eof':
            raise self.error("expected 'func', found end of input")
        while self.peek().kind != 'eof':
            start = self.peek()
            func = self.parse_function()
            if func.name in seen:
                raise self.error(f"duplicate function '@{func.name}'", start)
            seen.add(func.name)
            module.functions.append(func)
        return module

    def parse_function(self) -> Function:
        self.expect_keyword('func')
        name = self.expect_kind('global', 'function name')
        func = Function(name=name.text[1:])
        self.expect_punct('(')
        if not self.at_punct(')'):
            while True:
                func.params.append(self.expect_kind('local', 'parameter').text[1:])
                if not self.at_punct(','):
                    break
                self.advance()
        self.expect_punct(')')
        self.expect_punct('{')
        labels: Dict[str, Token] = {}
        while not self.at_punct('}'):
            start = self.peek()
            block = self.parse_block()
            if block.label in labels:
                raise self.error(f"duplicate block label '{block.label}'", start)
            labels[block.label] = start
            func.blocks.append(block)
        if not func.blocks:
            raise self.error(f"function '@{func.name}' has no blocks")
        self.expect_punct('}')
        self.check_function(func)
        return func

    def parse_block(self) -> Block:
        label = self.expect_kind('ident', 'block label')
        self.expect_punct(':')
        block = Block(label=label.text)
        while True:
            token = self.peek()
            if token.kind == 'punct' and token.text == '}':
                raise self.error(f"block '{block.label}' has no terminator")
            if token.kind == 'eof':
                raise self.error(f"block '{block.label}' has no terminator")
            if token.kind == 'ident' and self.peek(1).kind == 'punct' and self.peek(1).text == ':':
                raise self.error(f"block '{block.label}' has no terminator")
            if token.kind == 'local':
                instr = self.parse_assignment()
                self.where[id(instr)] = token
                if instr.is_phi:
                    if block.body:
                        raise self.error("phi after non-phi instruction", token)
                    block.phis.append(instr)
                else:
                    block.body.append(instr)
                continue
            if token.kind != 'ident':
                raise self.error(f"expected instruction, found '{token.text}'")
            word = token.text
            if word in ('store', 'print'):
                instr = self.parse_statement()
                self.where[id(instr)] = token
                block.body.append(instr)
                continue
            if word in ('jmp', 'br', 'ret'):
                block.terminator = self.parse_terminator()
                self.where[id(block.terminator)] = token
                return block
            raise self.error(f"unknown instruction '{word}'")

    def parse_operand(self) -> Operand:
        token = self.peek()
        if token.kind == 'local':
            self.advance()
            return Var(token.text[1:])
        if token.kind == 'int':
            self.advance()
            value = int(token.text)
            if value < INT64_MIN or value > INT64_MAX:
                raise self.error(f"integer literal {token.text} out of i64 range", token)
            return Const(value)
        found = token.text or 'end of input'
        raise self.error(f"expected operand, found '{found}'")

    def parse_assignment(self) -> Instruction:
        result = self.advance().text[1:]
        self.expect_punct('=')
        opcode_token = self.expect_kind('ident', 'opcode')
        op = opcode_token.text
        if op in BINARY_OPCODES:
            lhs = self.parse_operand()
            self.expect_punct(',')
            rhs = self.parse_operand()
            return Instruction(op, [lhs, rhs], result=result)
        if op == 'cmp':
            cond = self.expect_kind('ident', 'comparison condition')
            if cond.text not in CMP_CONDITIONS:
                raise self.error(f"unknown comparison condition '{cond.text}'", cond)
            lhs = self.parse_operand()
            self.expect_punct(',')
            rhs = self.parse_operand()
            return Instruction('cmp', [lhs, rhs], result=result, cond=cond.text)
        if op == 'const':
            value = self.parse_operand()
            if not isinstance(value, Const):
                raise self.error("const expects an integer literal")
            return Instruction('const', [value], result=result)
        if op in ('opaque', 'alloca'):
            return Instruction(op, [], result=result)
        if op == 'load':
            return Instruction('load', [self.parse_operand()], result=result)
        if op == 'phi':
            self.expect_punct('[')
            labels: List[str] = []
            values: List[Operand] = []
            while True:
                labels.append(self.expect_kind('ident', 'incoming label').text)
                self.expect_punct(':')
                values.append(self.parse_operand())
                if not self.at_punct(','):
                    break
                self.advance()
            self.expect_punct(']')
            return Instruction('phi', values, result=result, labels=labels)
        raise self.error(f"unknown opcode '{op}'", opcode_token)

    def parse_statement(self) -> Instruction:
        op = self.advance().text
        if op == 'store':
            value = self.parse_operand()
            self.expect_punct(',')
            pointer = self.parse_operand()
            return Instruction('store', [value, pointer])
        return Instruction('print', [self.parse_operand()])

    def parse_terminator(self) -> Instruction:
        op = self.advance().text
        if op == 'jmp':
            return Instruction('jmp', [], labels=[self.expect_kind('ident', 'label').text])
        if op == 'br':
            cond = self.parse_operand()
            self.expect_punct(',')
            if_true = self.expect_kind('ident', 'label').text
            self.expect_punct(',')
            if_false = self.expect_kind('ident', 'label').text
            return Instruction('br', [cond], labels=[if_true, if_false])
        return Instruction('ret', [self.parse_operand()])

    # -- structural checks ---------------------------------------------
    def check_function(self, func: Function) -> None:
        defined: Set[str] = set()
        for param in func.params:
            if param in defined:
                raise self.error(f"duplicate parameter '%{param}' in '@{func.name}'")
            defined.add(param)
        labels = set(func.labels())
        for block in func.blocks:
            for instr in block.instructions():
                token = self.where.get(id(instr))
                if instr.result is not None:
                    if instr.result in defined:
                        raise self.error(f"duplicate definition of '%{instr.result}'", token)
                    defined.add(instr.result)
                for label in instr.labels:
                    if label not in labels:
                        raise self.error(f"unknown label '{label}'", token)


def parse_module(text: str) -> Module:
    """Parse IR text into a Module.

    Args:
        text: Module source

    Returns:
        Parsed module

    Raises:
        ParseError: On syntax errors, duplicate SSA definitions or unknown labels
    """
    module = _Parser(text).parse_module()
    logger.debug(f"Parsed {len(module.functions)} function(s)")
    return module


def parse_function(text: str) -> Function:
    """Parse text holding exactly one function."""
    module = parse_module(text)
    if len(module.functions) != 1:
        raise ParseError(f"expected one function, found {len(module.functions)}", 1, 1)
    return module.functions[0]


def load_module(path: str) -> Module:
    """Read and parse an IR file."""
    with open(path, 'r', encoding='utf-8') as f:
        return parse_module(f.read())
