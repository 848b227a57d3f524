"""Exact computations with finitely presented functors and pp formulas over Z, Z/n and F_p."""

from .errors import ConsistencyError, DomainError, InputError, PpcalcError, UnsupportedRingError
from .linalg import Matrix, Ring, snf
from .fpmod import FpModule, ModuleMorphism
from .fpfun import FpFunctor, NatTrans
from .pp import PpFormula, PpPair
from .dsl import format_pp, parse_module, parse_pp

__all__ = [
    "ConsistencyError", "DomainError", "InputError", "PpcalcError", "UnsupportedRingError",
    "Matrix", "Ring", "snf", "FpModule", "ModuleMorphism", "FpFunctor", "NatTrans",
    "PpFormula", "PpPair", "format_pp", "parse_module", "parse_pp",
]
