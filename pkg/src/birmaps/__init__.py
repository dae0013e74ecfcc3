"""Exact algebra for bounded-degree rational maps between varieties."""

__version__ = "0.1.0"

from .polyring import GF, GREVLEX, LEX, QQ, Polynomial, Ring, block_order, fmt, parse
from .groebner import Budget, BudgetExceeded, Ideal, reduced_groebner_basis
from .varieties import RationalMap, Variety
from .verdict import Answer, Verdict

__all__ = [
    "__version__",
    "GF",
    "GREVLEX",
    "LEX",
    "QQ",
    "Polynomial",
    "Ring",
    "block_order",
    "fmt",
    "parse",
    "Budget",
    "BudgetExceeded",
    "Ideal",
    "reduced_groebner_basis",
    "RationalMap",
    "Variety",
    "Answer",
    "Verdict",
]
