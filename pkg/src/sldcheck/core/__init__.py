"""Shared domain types: discount functions, game structures, formulas."""
from .discount import (
    DiscountError,
    DiscountFn,
    Exponential,
    Hyperbolic,
    Scaled,
    Shifted,
    TableThenTail,
    crossing_index,
    discount_value,
    shift_discount,
)
from .formula import (
    FALSE,
    TRUE,
    Atom,
    Bind,
    Bottom,
    Exists,
    Formula,
    Next,
    Not,
    Or,
    Top,
    Until,
    UntilD,
    always,
    always_d,
    big_and,
    bind_group,
    eventually,
    eventually_d,
    forall,
    free_names,
    implies,
    is_ltld,
    is_sentence,
    land,
    subformulas,
)
from .game import (
    Assignment,
    Cgs,
    LassoPlay,
    Strategy,
    UnboundName,
    outcome,
    step,
    validate_cgs,
)
