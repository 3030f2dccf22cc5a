"""Capped-precision models of p-adic period rings.

The pieces, from the ground up:

* padic        -- Q_p and unramified extensions at capped precision
* linalg       -- generic matrices, char polys, p-adic root finding
* series       -- truncated power series, Newton polygons, formal groups
* cyclotomic   -- the tower Q_p(zeta_{p^m}) with the character action
* bdr          -- K_m[[t]]/t^N with its twisted Galois action and the
                  Sen operator extraction
* uadj         -- the adjoined-variable ring B{{u}} over any coefficient
                  ring carrying an action and a connection
* phimod       -- (phi, nabla)-modules over truncated E<<x>>: kernels,
                  normal forms, flags
* refine       -- filtered phi-modules, refinements, the x-lattice model
* cli          -- command line driver
"""

from .bdr import (BdRElement, SenData, analytic_level, bdr_decompose,
                  bdr_galois_act, bdr_nabla, sen_operator, theta)
from .cyclotomic import CycloElement, chi_action, embed_level
from .errors import ParseError, PreconditionError, PrecisionError
from .padic import (INF, PadicElement, exact, frobenius, padic, padic_arith,
                    padic_exp, padic_log, teichmuller, valuation)
from .phimod import (NormalForm, Obstruction, PhiModuleX, base_change,
                     classify_stable_ideal, full_flag, gamma_from_nabla,
                     kernel_phi_minus_alpha, nabla_from_gamma, normal_form,
                     phi_twist, rank1_character, saturate_eigenvector,
                     solve_phi_minus_alpha, subst_scale)
from .refine import (FilteredPhiModule, Refinement, XLattice, dtri_lattice,
                     enumerate_refinements, fil_k, flag_is_stable,
                     induced_weights, ordering_of_flag, parameter,
                     sen_polynomial)
from .series import (NewtonPolygon, TruncSeries, anticyclo_kernel,
                     is_global_unit, lubin_tate_exp, lubin_tate_log,
                     newton_polygon)
from .uadj import (CoefficientOps, UAdjElement, bdr_coefficient_ops,
                   bdr_uadj_invariants, gamma_n_analytic_test, uadj_act,
                   uadj_is_invariant, uadj_nabla_total, uadj_nabla_u,
                   uadj_project0, uadj_section)

__all__ = [
    "BdRElement", "CoefficientOps", "CycloElement", "FilteredPhiModule",
    "INF", "NewtonPolygon", "NormalForm", "Obstruction", "PadicElement",
    "ParseError", "PhiModuleX", "PreconditionError", "PrecisionError",
    "Refinement", "SenData", "TruncSeries", "UAdjElement", "XLattice",
    "analytic_level", "anticyclo_kernel", "base_change",
    "bdr_coefficient_ops", "bdr_decompose", "bdr_galois_act", "bdr_nabla",
    "bdr_uadj_invariants", "chi_action", "classify_stable_ideal",
    "dtri_lattice", "embed_level", "enumerate_refinements", "exact",
    "fil_k", "flag_is_stable", "frobenius", "full_flag",
    "gamma_from_nabla", "gamma_n_analytic_test", "induced_weights",
    "is_global_unit", "kernel_phi_minus_alpha", "lubin_tate_exp",
    "lubin_tate_log", "nabla_from_gamma", "newton_polygon", "normal_form",
    "ordering_of_flag", "padic", "padic_arith", "padic_exp", "padic_log",
    "parameter", "phi_twist", "rank1_character", "saturate_eigenvector",
    "sen_operator", "sen_polynomial", "solve_phi_minus_alpha",
    "subst_scale", "teichmuller", "theta", "uadj_act",
    "uadj_is_invariant", "uadj_nabla_total", "uadj_nabla_u",
    "uadj_project0", "uadj_section", "valuation",
]
