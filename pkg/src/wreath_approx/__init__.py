"""Constructive metric approximations of unrestricted wreath products and their certificates."""

from .amenable import FolnerSet, IntegerLattice, IntegerLine, FiniteTable, boundary_ratio, build_sigma, folner_for
from .certify import Certificate, check_bounds, measure_defect, measure_freeness, measure_orthogonality, measure_trace
from .groups import (
    GeneralLinearPrime,
    SymmetricGroup,
    TableContext,
    TableGroup,
    UnitaryGroup,
    hs_distance,
    normalized_trace,
    perm_hamming,
    rank_distance,
    validate_table_group,
)
from .lift import UWPElement, UnrestrictedWreath, build_phi, build_phi_hyperlinear, shift_theta, support_window, uwp_mul
from .pipelines import run_coamenable, run_lift
from .wreath import WreathContext, WreathElement, wreath_inv, wreath_mul, wreath_tilde_distance

__version__ = "0.1.0"
