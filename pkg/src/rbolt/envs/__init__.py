"""Desk-scale simulators with disjoint agent features and bolt fluents."""

from .base import (
    ConfigError,
    EnvError,
    EnvStep,
    Environment,
    EpisodeFinished,
    FieldView,
    InvalidAction,
    TraceLogger,
)
from .breakout import Breakout, left_to_right_formula
from .chain import Chain
from .cocktail import CocktailParty, desk_cocktail, service_formulas
from .sapientino import Sapientino, desk_sapientino, distinct_cells_formula, ordered_visits_formula

KINDS = {
    "sapientino": Sapientino,
    "breakout": Breakout,
    "cocktail": CocktailParty,
    "chain": Chain,
}


def make_env(kind: str, **params) -> Environment:
    try:
        cls = KINDS[kind]
    except KeyError:
        raise ConfigError(f"unknown environment kind {kind!r}") from None
    try:
        return cls(**params)
    except TypeError as e:
        raise ConfigError(f"bad parameters for {kind}: {e}") from None
