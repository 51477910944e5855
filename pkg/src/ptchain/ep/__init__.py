"""Exceptional points: indicators, contours, orders and Puiseux fits."""

from .algebra import (cubic_discriminant, discriminant, log_discriminant, log_resultant,
                      resultant, sylvester_matrix)
from .contour import (DEFAULT_H_GRID, EPContour, EPPoint, PuiseuxFit, coalescing_eigenvalue,
                      cusp_direction, end_defect_spec, ep_contour, ep_radius, find_cusps,
                      puiseux_fit, puiseux_tau, ray_crossings, refine_ep3, splitting_fit)
from .indicator import (asymptotic_threshold, auto_dps, critical_chain_poly, ep_indicator,
                        indicator_constant, threshold_gamma)
from .order import (DegenerateDirectionError, OrderResult, branch_order, ep_order,
                    local_coefficient_gradients, singular_point_kind)
from .surface import (SurfaceResult, disc_sign, ep_surface_ssh, refine_ssh_ep3,
                      ssh_charpoly_real, ssh_ep4_points, ssh_splitting_fit,
                      ssh_threshold_gamma)

__all__ = [
    "DEFAULT_H_GRID", "DegenerateDirectionError", "EPContour", "EPPoint", "OrderResult",
    "PuiseuxFit", "SurfaceResult", "asymptotic_threshold", "auto_dps", "branch_order",
    "coalescing_eigenvalue", "critical_chain_poly", "cubic_discriminant", "cusp_direction",
    "disc_sign", "discriminant", "end_defect_spec", "ep_contour", "ep_indicator", "ep_order",
    "ep_radius", "ep_surface_ssh", "find_cusps", "indicator_constant",
    "local_coefficient_gradients", "log_discriminant", "log_resultant", "puiseux_fit",
    "puiseux_tau", "ray_crossings", "refine_ep3", "refine_ssh_ep3", "resultant",
    "singular_point_kind", "splitting_fit", "ssh_charpoly_real", "ssh_ep4_points",
    "ssh_splitting_fit", "ssh_threshold_gamma", "sylvester_matrix", "threshold_gamma",
]
