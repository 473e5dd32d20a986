"""Silhouette size analysis for triangle meshes approximating surfaces."""

from .expectation import (AtInfinityUniform, BallUniform, exact_expected_silhouette,
                          mc_expected_silhouette, mc_expected_silhouette_length)
from .generators import generate, parse_family
from .geom import AtInfinity, Finite
from .mesh import TriangleMesh, build_adjacency, load_mesh, load_obj, load_off, save_off, validate
from .silhouette import extract_silhouette, projected_length

__version__ = "0.1.0"

__all__ = [
    "AtInfinity", "AtInfinityUniform", "BallUniform", "Finite", "TriangleMesh",
    "build_adjacency", "exact_expected_silhouette", "extract_silhouette", "generate",
    "load_mesh", "load_obj", "load_off", "mc_expected_silhouette",
    "mc_expected_silhouette_length", "parse_family", "projected_length", "save_off", "validate",
]
