"""Exact and numerical checks for the b-divisor of theta_{1,1}^8 on E(N)."""
from .surface import (Level, base_model, index_gamma, cusp_count, genus, arithmetic_genus,
                      jacobi_divisor, toric_seed_model)
from .lattice import (QDivisor, intersect, blow_up, recursion_self_intersection,
                      lattice_self_intersection, bdv_limit, curve_pairing, convergence_table,
                      toric_self_intersection)
from .numbers import coprime_tornheim, tornheim_222, hurwitz_class_number, zeta_even
from .jacobi import ModularPoint, GroupElement, theta11, check_invariance, dim_cusp, vanishing_order
from .analysis import (f_nm, pullback_identity_residual, wedge_vanishing_residual, residue_integral,
                       residue_consistency, psi_sing, psi_can, delta_sing_membership,
                       toric_volume_check)
from .report import Report

__version__ = "0.1.0"
