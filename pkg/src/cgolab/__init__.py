"""Spectral-grid laboratory for complex geometrical optics solutions."""
from .cgo import (
    Conductivity,
    ContractionError,
    ConvergenceError,
    EllipticityError,
    apply_delta_zeta,
    apply_inverse_delta_zeta,
    schrodinger_potential,
    solve_cgo,
)
from .phase import GridSymbol, PhaseVector, lp_projection, q_projection, symbol_p
from .recovery import (
    alessandrini_gap,
    gradient_identity_check,
    make_conductivity,
    make_zeta_pair,
    parse_conductivity,
    recover_fourier,
    select_parameters,
)
from .spaces import x_norm
from .spectral import Field, PeriodicGrid, SpectralField, forward_transform, inverse_transform, make_grid

__version__ = "0.1.0"

__all__ = [
    "Conductivity",
    "ContractionError",
    "ConvergenceError",
    "EllipticityError",
    "apply_delta_zeta",
    "apply_inverse_delta_zeta",
    "schrodinger_potential",
    "solve_cgo",
    "GridSymbol",
    "PhaseVector",
    "lp_projection",
    "q_projection",
    "symbol_p",
    "alessandrini_gap",
    "gradient_identity_check",
    "make_conductivity",
    "make_zeta_pair",
    "parse_conductivity",
    "recover_fourier",
    "select_parameters",
    "x_norm",
    "Field",
    "PeriodicGrid",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "make_grid",
]
