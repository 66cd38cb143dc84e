"""
data/equations.py

Reaction equation grammar for model files.

    equation := side arrow side
    side     := "0" | term ("+" term)*
    term     := [coefficient] species
    arrow    := "->" | "<->"

Coefficients are nonnegative integers, decimals or p/q rationals, read
exactly. Species identifiers start with a letter or underscore.

This module MUST:
- Report the column of the first offending character on syntax errors
- Keep first-appearance species order (reactant side first)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import pyparsing as pp

from errors import ModelSyntaxError, ModelValidationError
from linalg.rational import as_fraction

# ============================================================
# GRAMMAR
# ============================================================

_COEFFICIENT = pp.Regex(r"\d+/\d+|\d+(?:\.\d+)?|\.\d+")("coefficient")
_SPECIES = pp.Word(pp.alphas + "_", pp.alphanums + "_")("species")
_TERM = pp.Group(pp.Optional(_COEFFICIENT) + _SPECIES)
_ZERO = pp.Regex(r"0(?![\w./])")
_SIDE = pp.Group(_ZERO.copy().set_parse_action(lambda: []) | pp.DelimitedList(_TERM, delim="+"))
_ARROW = (pp.Literal("<->") | pp.Literal("->"))("arrow")
EQUATION = _SIDE("reactant") + _ARROW + _SIDE("product") + pp.StringEnd()

_NEGATIVE = re.compile(r"(^|[+>]|<->)\s*-\s*[\d.]")


@dataclass(frozen=True)
class Equation:
    reactant: dict[str, Fraction]
    product: dict[str, Fraction]
    reversible: bool
    species: tuple[str, ...]


def _side(tokens) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for term in tokens:
        coefficient = as_fraction(term.get("coefficient", "1"))
        name = term["species"]
        out[name] = out.get(name, Fraction(0)) + coefficient
    return out


def parse_equation(text: str, *, line: Optional[int] = None) -> Equation:
    """
    Parse one equation string. ModelSyntaxError carries `line` (the
    caller's position in the surrounding document) and the 1-based column
    inside the equation.
    """
    negative = _NEGATIVE.search(text)
    if negative:
        column = negative.start() + negative.group(0).rindex("-") + 1
        raise ModelValidationError(f"negative coefficient in equation {text!r} at column {column}")
    try:
        parsed = EQUATION.parse_string(text, parse_all=True)
    except pp.ParseException as exc:
        raise ModelSyntaxError(f"cannot parse equation {text!r}: {exc.msg}", line, exc.col) from None

    reactant = _side(parsed["reactant"])
    product = _side(parsed["product"])
    order: list[str] = []
    for side in (reactant, product):
        for name in side:
            if name not in order:
                order.append(name)
    return Equation(reactant, product, parsed["arrow"] == "<->", tuple(order))
