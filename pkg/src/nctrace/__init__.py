"""Zeta-regularised residue traces for an abstract pseudodifferential calculus.

The calculus is generated by an algebra ``B`` and powers of ``|D|``; trace
models evaluate words meromorphically. The bundled model is the circle with
``|D| = sqrt(1 + n^2)`` on ``l^2(Z)``.
"""

from .circle import BandedOp, CircleModel, InsufficientDepth, e, realize
from .jetring import Backend, Jet, LaurentJet, binom_jet, gamma_ratio_jet, residue
from .ncalg import AlgebraBoundError, BElement, Generator, algebra_config, delta, family
from .symbols import (
    AffineOrder,
    InsufficientTruncation,
    Symbol,
    log_difference,
    perturbed_power,
    sym_mul,
)
from .zetatrace import (
    CheckReport,
    ModelContractViolation,
    OrderInDimensionSpectrum,
    canonical_trace,
    commutator_discrepancy_check,
    residue_theorem_check,
    tau,
    tr_mer,
    weight_discrepancy_check,
)

__version__ = "0.1.0"

__all__ = [
    "AffineOrder",
    "AlgebraBoundError",
    "Backend",
    "BandedOp",
    "BElement",
    "CheckReport",
    "CircleModel",
    "Generator",
    "InsufficientDepth",
    "InsufficientTruncation",
    "Jet",
    "LaurentJet",
    "ModelContractViolation",
    "OrderInDimensionSpectrum",
    "Symbol",
    "algebra_config",
    "binom_jet",
    "canonical_trace",
    "commutator_discrepancy_check",
    "delta",
    "e",
    "family",
    "gamma_ratio_jet",
    "log_difference",
    "perturbed_power",
    "realize",
    "residue",
    "residue_theorem_check",
    "sym_mul",
    "tau",
    "tr_mer",
    "weight_discrepancy_check",
]
