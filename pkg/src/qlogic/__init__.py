"""Propositional quantum logic on subspaces of C^n."""

from .formula import (
    And, Bot, Not, Or, Top, Var, TOP, BOT,
    parse, to_text, nnf, freshen, restrict, variables,
    mk_P, mk_alpha, mk_alpha_chain, mk_gamma, mk_beta, mk_separator,
)
from .subspace import Subspace, Tolerance
from .valuation import Environment, evaluate, check_restriction_lemma
from .dbar import estimate_dbar, check_tautology, separate

__version__ = "0.1.0"

__all__ = [
    "And", "Bot", "Not", "Or", "Top", "Var", "TOP", "BOT",
    "parse", "to_text", "nnf", "freshen", "restrict", "variables",
    "mk_P", "mk_alpha", "mk_alpha_chain", "mk_gamma", "mk_beta", "mk_separator",
    "Subspace", "Tolerance", "Environment", "evaluate", "check_restriction_lemma",
    "estimate_dbar", "check_tautology", "separate",
]
