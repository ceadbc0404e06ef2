"""Certify, falsify and measure expansivity of finitely generated group actions."""
from __future__ import annotations

__version__ = "0.1.0"

from .actions import (CoveringMap, FiniteConjugacy, MatrixTorusAction, PermAction, TopAction,
                      TorusConjugacy, check_semiconjugacy, conjugate_action, covering_fiber,
                      fiber_separation_beta, finite_action, restrict_to_invariant, restrict_to_subgroup)
from .covers import OpenCover, cover_join, lebesgue_number, prec, refines
from .expansivity import (certify_linear, dynamical_ball, estimate_sup_constant, falsify_expansive,
                          find_separating_element, fixed_points, is_hyperbolic, uniform_separation_bound)
from .groups import GroupPresentation, Subgroup, cayley_ball, coset_transversal, verify_syndetic_witness
from .orbit import (constant_from_cover, cover_from_constant, decide_orbit_expansive_finite,
                    doubled_point_example, image_cover, subgroup_cover, verify_orbit_expansive)
from .spaces import FiniteMetricSpace, FiniteTopSpace, RationalGrid, Torus, TorusPoint, is_T1
from .verdict import Certified, Falsified, InconclusiveAtDepth
