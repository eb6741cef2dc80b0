"""Discrete p-modulus toolkit on weighted grid graphs.

Curve-family and cut-family moduli by cutting-plane constraint
generation, p-capacitary condenser potentials, the curve/surface
duality product, BV/coarea diagnostics, and quasiconformal distortion
measurements for planar grid homeomorphisms.
"""

from .mmspace import (MeasureGraph, build_grid, build_annulus_grid,
                      build_masked_grid, ball, perimeter, total_variation,
                      coarea_identity, doubling_estimate,
                      read_graph, write_graph)
from .families import (Condenser, Constraint, EmptyFamilyError,
                       curve_oracle, cut_oracle, residual)
from .modsolve import (ModulusProblem, ModulusResult, modulus,
                       restricted_solve, brute_force_modulus)
from .potential import (Potential, condenser_potential, capacity,
                        level_set_surfaces, lower_bound_check,
                        relative_capacity, thinness_index)
from .duality import DualityReport, duality_product, refinement_study, loewner_profile
from .qcheck import (GridMap, map_zoo, metric_dilatation,
                     curve_distortion, surface_distortion, qc_panel)

__all__ = [
    "MeasureGraph", "build_grid", "build_annulus_grid", "build_masked_grid",
    "ball", "perimeter", "total_variation", "coarea_identity",
    "doubling_estimate", "read_graph", "write_graph",
    "Condenser", "Constraint", "EmptyFamilyError",
    "curve_oracle", "cut_oracle", "residual",
    "ModulusProblem", "ModulusResult", "modulus",
    "restricted_solve", "brute_force_modulus",
    "Potential", "condenser_potential", "capacity", "level_set_surfaces",
    "lower_bound_check", "relative_capacity", "thinness_index",
    "DualityReport", "duality_product", "refinement_study", "loewner_profile",
    "GridMap", "map_zoo", "metric_dilatation",
    "curve_distortion", "surface_distortion", "qc_panel",
]
