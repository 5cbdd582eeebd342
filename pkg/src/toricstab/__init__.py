"""toricstab: weighted K-stability invariants of toric Kähler manifolds.

The library works entirely on the moment polytope: Delzant data in, weighted
Futaki characters, extremal and soliton fields, Donaldson-Futaki invariants
of toric test configurations, Chow weights, and blowup expansion
coefficients out.  Two independent evaluation backends (simplex cubature
and vertex localisation) cross-check every cohomological quantity.
"""

from .polytope import DelzantPolytope, Facet, VertexData
from .profiles import (Exponential, Log, Monomial, Polynomial, PowerLaw,
                       PowerSeries, WeightPair, builtin, positivity_check)
from .quadrature import QuadratureRule, integrate, integrate_boundary, moments
from .localize import eval_at_degenerate, eval_c1_class, eval_class
from .invariants import (ExtremalData, InvariantReport, extremal_field,
                         futaki, futaki_signed, gram, invariant_report,
                         s_hat, soliton_field)
from .testconfig import (PLConvex, ToricTC, associated_product, chow, chow_T,
                         destabilizing_vertex, df, df_T, l1_norm,
                         normalize_chow, orthogonal_part, twist)
from .blowup import (ExpansionReport, gram_convergence,
                     predict_df_expansions, predict_futaki_expansion,
                     predict_volume_expansion, verify_expansion)
from . import catalog

__version__ = "0.1.0"

__all__ = [
    "DelzantPolytope", "Facet", "VertexData",
    "Monomial", "Exponential", "PowerLaw", "Log", "Polynomial", "PowerSeries",
    "WeightPair", "builtin", "positivity_check",
    "QuadratureRule", "integrate", "integrate_boundary", "moments",
    "eval_class", "eval_c1_class", "eval_at_degenerate",
    "ExtremalData", "InvariantReport", "s_hat", "futaki", "futaki_signed",
    "gram", "extremal_field", "soliton_field", "invariant_report",
    "PLConvex", "ToricTC", "associated_product", "twist", "df", "df_T",
    "l1_norm", "orthogonal_part", "normalize_chow", "chow", "chow_T",
    "destabilizing_vertex",
    "ExpansionReport", "predict_volume_expansion", "predict_futaki_expansion",
    "predict_df_expansions", "verify_expansion", "gram_convergence",
    "catalog",
]
