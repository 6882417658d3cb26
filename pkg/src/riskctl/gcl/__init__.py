"""Probabilistic guarded-command subset: parser, analysis, state space."""

from .syntax import (Binary, BoolLit, Branch, Command, ConstDecl, Expr,
                     FloatLit, FormulaDecl, GclProgram, IntLit, LabelDecl,
                     ModuleDecl, Name, RewardDecl, RewardEntry, Ternary,
                     Unary, VarDecl, expr_text, parse_program)
from .semantics import analyze, build_state_space, eval_expr, parse_gcl

__all__ = [
    "Binary", "BoolLit", "Branch", "Command", "ConstDecl", "Expr",
    "FloatLit", "FormulaDecl", "GclProgram", "IntLit", "LabelDecl",
    "ModuleDecl", "Name", "RewardDecl", "RewardEntry", "Ternary", "Unary",
    "VarDecl", "expr_text", "parse_program", "analyze", "build_state_space",
    "eval_expr", "parse_gcl",
]
