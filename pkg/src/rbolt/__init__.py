"""Restraining bolts: temporal-logic specifications for tabular RL agents."""

__version__ = "0.1.0"
