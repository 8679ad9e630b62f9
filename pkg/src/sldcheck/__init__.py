"""Exact model checking for Strategy Logic with discounting on finite concurrent games."""
from .core import *  # noqa: F401,F403
from .evaluation import Evaluator, check_threshold, eval_until, eval_until_discounted, evaluate
from .textio import (
    ModelFile,
    ParseError,
    Report,
    parse_assignment,
    parse_discount,
    parse_formula,
    parse_model,
    render_formula,
    render_model,
)

__version__ = "0.1.0"
