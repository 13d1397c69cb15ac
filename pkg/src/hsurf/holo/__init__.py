"""Holomorphic expressions: parsing, printing, jets and contour antiderivatives."""

from .ast import (
    Add, Const, Cos, Cosh, Div, Exp, Expr, Func, Log, Mul, Neg, Pow, Sin, Sinh, Sqrt, Sub, Var,
    fold_constants, format_expr, parse_expr, substitute,
)
from .jet import Jet2, eval_composed_derivative, eval_jet, eval_values, evaluate, lenient
from .quadrature import antiderivative, integrate_segments

__all__ = [
    "Add", "Const", "Cos", "Cosh", "Div", "Exp", "Expr", "Func", "Log", "Mul", "Neg", "Pow",
    "Sin", "Sinh", "Sqrt", "Sub", "Var", "Jet2", "antiderivative", "eval_composed_derivative",
    "eval_jet", "eval_values", "evaluate", "fold_constants", "format_expr", "integrate_segments",
    "lenient", "parse_expr", "substitute",
]
