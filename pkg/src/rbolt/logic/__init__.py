"""Formula syntax, parsing and reference semantics."""

from .ast import *  # noqa: F401,F403
from .ast import RESERVED_DONE, Formula, FluentConfig, atoms_of, fluent_config
from .parser import (
    FormulaError,
    FormulaSyntaxError,
    UndeclaredFluentError,
    parse,
    parse_ldlf,
    parse_ltlf,
    to_text,
)
from .semantics import eval_prop, eval_trace, eval_traces_batch
from .translate import ltlf_to_ldlf
