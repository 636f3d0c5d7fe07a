"""Exact rooted R-trees in level coordinates, their ultrametric end spaces, and maps between them."""

from .duality import ends_of, tree_of
from .endmaps import EndMap
from .errors import (
    InputError,
    NotGeodesicallyCompleteError,
    PropernessError,
    TrivialTreeError,
    UltratreeError,
    ValidationFailure,
    WellDefinednessError,
)
from .modulus import ConcaveMajorant, PLMap, StepModulus, concave_majorant, modulus_of
from .morphisms import RadialTreeMap, induce_end_map, induce_tree_map
from .rtree import TreeDistance, TreeNode, TreePoint, TreePresentation
from .ultrametric import FiniteUltrametricSpace, validate_ultrametric

__all__ = [
    "ConcaveMajorant",
    "EndMap",
    "FiniteUltrametricSpace",
    "InputError",
    "NotGeodesicallyCompleteError",
    "PLMap",
    "PropernessError",
    "RadialTreeMap",
    "StepModulus",
    "TreeDistance",
    "TreeNode",
    "TreePoint",
    "TreePresentation",
    "TrivialTreeError",
    "UltratreeError",
    "ValidationFailure",
    "WellDefinednessError",
    "concave_majorant",
    "ends_of",
    "induce_end_map",
    "induce_tree_map",
    "modulus_of",
    "tree_of",
    "validate_ultrametric",
]
