"""Text format for rule bases.

One rule per line, keywords case-insensitive::

    # comment
    IF priority IS high AND exec_time IS small THEN new_priority IS high
"""

from __future__ import annotations

import re
from typing import Sequence

from .fuzzy import (
    FuzzyConfigError,
    FuzzyRule,
    LinguisticVariable,
    RuleBase,
    default_variables,
)

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\S")
_KEYWORDS = {"if", "is", "and", "then"}


class RuleParseError(FuzzyConfigError):
    def __init__(self, message: str, line: int, column: int, token: str | None = None):
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}")


def _tokens(line: str):
    code = line.split("#", 1)[0]
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(code)]


def _parse_line(toks, lineno, variables, output_name, inputs):
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(toks):
            col = toks[-1][1] + len(toks[-1][0]) if toks else 1
            raise RuleParseError(f"expected {what}, found end of line", lineno, col)
        tok, col = toks[pos]
        pos += 1
        return tok, col

    def keyword(kw):
        tok, col = take(kw.upper())
        if tok.lower() != kw:
            raise RuleParseError(f"expected {kw.upper()}, found {tok!r}", lineno, col, tok)

    def ident(what):
        tok, col = take(what)
        if not (tok[0].isalpha() or tok[0] == "_") or tok.lower() in _KEYWORDS:
            raise RuleParseError(f"expected {what}, found {tok!r}", lineno, col, tok)
        return tok, col

    def clause():
        var, vcol = ident("variable name")
        keyword("is")
        term, tcol = ident("term name")
        if var not in variables:
            raise RuleParseError(f"unknown variable {var!r}", lineno, vcol, var)
        if term not in variables[var].term_names:
            raise RuleParseError(
                f"unknown term {term!r} for variable {var!r}", lineno, tcol, term
            )
        return (var, term), vcol

    keyword("if")
    antecedents = []
    while True:
        (var, term), vcol = clause()
        if var not in inputs:
            raise RuleParseError(f"{var!r} is not an input variable", lineno, vcol, var)
        if any(v == var for v, _ in antecedents):
            raise RuleParseError(f"variable {var!r} repeated in antecedent", lineno, vcol, var)
        antecedents.append((var, term))
        tok, col = take("AND or THEN")
        if tok.lower() == "and":
            continue
        if tok.lower() == "then":
            break
        raise RuleParseError(f"expected AND or THEN, found {tok!r}", lineno, col, tok)
    consequent, ccol = clause()
    if consequent[0] != output_name:
        raise RuleParseError(
            f"consequent must be on {output_name!r}, not {consequent[0]!r}", lineno, ccol, consequent[0]
        )
    if pos < len(toks):
        tok, col = toks[pos]
        raise RuleParseError(f"unexpected {tok!r} after rule", lineno, col, tok)
    return FuzzyRule(tuple(antecedents), consequent)


def parse_rulebase(
    text: str,
    inputs: Sequence[LinguisticVariable] | None = None,
    output: LinguisticVariable | None = None,
) -> RuleBase:
    """Parse rule text against the given variables (defaults when omitted)."""
    if inputs is None or output is None:
        pp, et, npv = default_variables()
        inputs = (pp, et) if inputs is None else inputs
        output = npv if output is None else output
    variables = {v.name: v for v in (*inputs, output)}
    input_names = tuple(v.name for v in inputs)

    rules: list[FuzzyRule] = []
    seen: dict[tuple, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        rule = _parse_line(toks, lineno, variables, output.name, input_names)
        key = tuple(sorted(rule.antecedents))
        if key in seen:
            raise RuleParseError(
                f"duplicate antecedent combination (first defined on line {seen[key]})",
                lineno,
                toks[0][1],
            )
        seen[key] = lineno
        rules.append(rule)
    return RuleBase(tuple(rules), input_names, output.name)


def render_rulebase(rulebase: RuleBase) -> str:
    return "".join(f"{rule}\n" for rule in rulebase.rules)
