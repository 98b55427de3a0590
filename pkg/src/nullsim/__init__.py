"""Null Cartan curves in Minkowski space-time and their p-similarity invariants.

Analysis (Cartan frame, curvatures, shape signature), reconstruction from
shape curvatures, closed-form catalog curves, and similarity matching.
"""
from .analysis import (CartanData, CartanProfile, ShapeFrame, ShapeSignature, analyze, cartan_apparatus,
                       cartan_profile, de_sitter_reparam, pseudo_arc_length, shape_frame_generator,
                       shape_frames, sigma_to_t, sim_frame_generator)
from .catalog import (CatalogParams, example_curve, example_source, helix_curve, null_helix,
                      self_similar_case, self_similar_curve)
from .curves import (AnalyticCurve, CurveSource, SampledCurve, estimate_derivatives, sample_curve,
                     transform_curve)
from .errors import NullSimError
from .matching import MatchVerdict, decide_similar, match_signatures
from .minkowski import (FRAME_GRAM, METRIC, REFERENCE_FRAME, CausalType, NullRotation, PSimilarity,
                        PseudoOrthonormalFrame, SimilarityMap, apply_similarity, classify,
                        compose_similarity, invert_similarity, lorentzian_dot)
from .reconstruction import (ReconstructedCurve, ReconstructionResult, ShapeCurvatureSpec, compensating_z1,
                             integrate_frame_system, reconstruct_curve, reconstruct_tau_const,
                             transport_frame)

__version__ = "0.1.0"

__all__ = [
    "AnalyticCurve", "CartanData", "CartanProfile", "CatalogParams", "CausalType", "CurveSource",
    "FRAME_GRAM", "METRIC", "MatchVerdict", "NullRotation", "NullSimError", "PSimilarity",
    "PseudoOrthonormalFrame", "REFERENCE_FRAME", "ReconstructedCurve", "ReconstructionResult",
    "SampledCurve", "ShapeCurvatureSpec", "ShapeFrame", "ShapeSignature", "SimilarityMap", "analyze",
    "apply_similarity", "cartan_apparatus", "cartan_profile", "classify", "compensating_z1",
    "compose_similarity", "de_sitter_reparam", "decide_similar", "estimate_derivatives",
    "example_curve", "example_source", "helix_curve", "integrate_frame_system", "invert_similarity",
    "lorentzian_dot", "match_signatures", "null_helix", "pseudo_arc_length", "reconstruct_curve",
    "reconstruct_tau_const", "sample_curve", "self_similar_case", "self_similar_curve",
    "shape_frame_generator", "shape_frames", "sigma_to_t", "sim_frame_generator", "transform_curve",
    "transport_frame",
]
