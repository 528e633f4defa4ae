"""DFA compilation, minimization and structural queries."""

from .compile import DEFAULT_STATE_CAP, MAX_FLUENTS, ResourceError, compile_to_dfa, nnf
from .dfa import INF, Dfa, UnknownStateError, canonical, minimize, product_equivalent
from .dot import export_dot
