"""Tiny arithmetic expression language for curvature functions.

Grammar: the variable ``x``, numeric literals, the constants ``pi`` and
``e``, ``+ - * / ^`` (``**`` also accepted), parentheses, and the
functions ``sin cos sinh cosh exp log sqrt``. Expressions are parsed with
:mod:`ast` and only whitelisted nodes are compiled; nothing is passed to
``eval``.
"""
from __future__ import annotations

import ast
import math
import operator
from typing import Callable

import numpy as np

from .errors import ParseError

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "sinh": np.sinh, "cosh": np.cosh,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLE = "x"

_BINARY = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _compile(node) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(node, ast.Expression):
        return _compile(node.body)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        value = float(node.value)
        return lambda x: value
    if isinstance(node, ast.Name):
        if node.id == VARIABLE:
            return lambda x: x
        if node.id in CONSTANTS:
            value = CONSTANTS[node.id]
            return lambda x: value
        raise ParseError(f"unknown name {node.id!r} (the variable is {VARIABLE!r})")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        op, left, right = _BINARY[type(node.op)], _compile(node.left), _compile(node.right)
        return lambda x: op(left(x), right(x))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        op, operand = _UNARY[type(node.op)], _compile(node.operand)
        return lambda x: op(operand(x))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ParseError(f"unsupported function in expression: {ast.unparse(node.func)}")
        if len(node.args) != 1 or node.keywords:
            raise ParseError(f"{node.func.id} takes exactly one argument")
        fn, arg = FUNCTIONS[node.func.id], _compile(node.args[0])
        return lambda x: fn(arg(x))
    raise ParseError(f"unsupported syntax in expression: {ast.unparse(node)!r}")


def parse_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile ``text`` into a vectorised function of ``x``.

    >>> f = parse_expression("1/x + 2^x")
    >>> float(f(np.array(1.0)))
    3.0
    """
    source = text.strip().replace("^", "**")
    if not source:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse expression {text!r}: {exc.msg}") from None
    body = _compile(tree)

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = body(x)
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()

    f.__doc__ = f"z(x) = {text}"
    return f
