"""Verification toolkit for composed decoder+controller ReLU networks over
convex polytopes in a learned latent space."""

from .nnmodel import AffineLayer, Network, compose, forward, parse_network, serialize_network
from .geometry import (
    Halfspace,
    LatentSample,
    Polytope,
    bounding_box,
    contains,
    convex_hull,
    filter_samples,
    inflate,
    outer_approximate,
    sample_points,
)
from .speclang import Spec, SpecKind, build_performance_spec, build_safety_spec
from .verifier import (
    BoundsResult,
    BoxPerturbation,
    Budget,
    Counterexample,
    VerificationResult,
    bab_verify,
    crown_bounds,
    exact_range_enumerate,
    find_counterexample,
    ibp_bounds,
    verify_box_baseline,
    verify_spec,
)

__all__ = [name for name in dir() if not name.startswith("_")]
