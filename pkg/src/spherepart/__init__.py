"""Least-perimeter partitions of the sphere: geometry, nets, certification, optimization."""

from .catalog import NAMES, build_named_net, catalog_table
from .geom import (Arc, CircleSpec, GeometryError, SpherePoint, arc_between, circle_for_area,
                   isoperimetric_profile, polygon_area)
from .net import Net, parse_net, region_areas, serialize_net, total_perimeter, validate
from .optimizer import OptimizerConfig, discretize, minimize, perturb
from .verifier import verify_all

__all__ = [
    "NAMES", "build_named_net", "catalog_table",
    "Arc", "CircleSpec", "GeometryError", "SpherePoint", "arc_between", "circle_for_area",
    "isoperimetric_profile", "polygon_area",
    "Net", "parse_net", "region_areas", "serialize_net", "total_perimeter", "validate",
    "OptimizerConfig", "discretize", "minimize", "perturb",
    "verify_all",
]
