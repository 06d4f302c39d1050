"""Truncated Toeplitz-operator spectral triples on Bergman spaces of the unit ball."""
from .multiindex import BasisEnumeration, degree_multiplicity, enumerate_basis
from .bases import (
    ABS2_SYMBOL,
    R_SYMBOL,
    UNWEIGHTED,
    HermiteBasis,
    QuadratureError,
    RadialSymbol,
    RadialWeight,
    bergman_constant,
    fock_constant,
    quadrature_radial,
)
from .operators import (
    EnumerationMismatch,
    HeisenbergElement,
    TruncatedOperator,
    commutator,
    heisenberg_rep,
    operator_norm,
    radial_eigenvalues,
    toeplitz_derivative,
    toeplitz_monomial,
    toeplitz_radial,
)
from .clifford import CliffordRep, dirac_bergman, gamma_matrices
from .segal_bargmann import SBTransform, UnderResolved
from .spectral import (
    NonHermitianError,
    SpectrumStream,
    dixmier_log_average,
    spectrum_of,
    weyl_fit,
)
from .triples import (
    DoubledTriple,
    SweepReport,
    TripleSpec,
    UnitarityError,
    build_doubled,
    commutator_boundedness,
    compact_resolvent_check,
    polar_unitary,
    regularity_check,
)
from .berezin import BerezinTower, expansion_check, sup_norm_limit
from .symbols import GtoSymbol, NonEllipticError, parametrix

__version__ = "0.1.0"

__all__ = [
    "BasisEnumeration",
    "degree_multiplicity",
    "enumerate_basis",
    "ABS2_SYMBOL",
    "R_SYMBOL",
    "UNWEIGHTED",
    "HermiteBasis",
    "QuadratureError",
    "RadialSymbol",
    "RadialWeight",
    "bergman_constant",
    "fock_constant",
    "quadrature_radial",
    "EnumerationMismatch",
    "HeisenbergElement",
    "TruncatedOperator",
    "commutator",
    "heisenberg_rep",
    "operator_norm",
    "radial_eigenvalues",
    "toeplitz_derivative",
    "toeplitz_monomial",
    "toeplitz_radial",
    "CliffordRep",
    "dirac_bergman",
    "gamma_matrices",
    "SBTransform",
    "UnderResolved",
    "NonHermitianError",
    "SpectrumStream",
    "dixmier_log_average",
    "spectrum_of",
    "weyl_fit",
    "DoubledTriple",
    "SweepReport",
    "TripleSpec",
    "UnitarityError",
    "build_doubled",
    "commutator_boundedness",
    "compact_resolvent_check",
    "polar_unitary",
    "regularity_check",
    "BerezinTower",
    "expansion_check",
    "sup_norm_limit",
    "GtoSymbol",
    "NonEllipticError",
    "parametrix",
]
