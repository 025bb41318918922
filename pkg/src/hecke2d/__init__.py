"""Exact measure theory, integration and Hecke algebras for GL_n over
F = F_q((t1))((t2))."""

from .errors import HeckeError
from .field import EElem, FElem, FieldConfig
from .hecke import BasicFn, HeckeElem, basic_product, convolve
from .integration import SimpleFn, integrate_Fn, integrate_GLn, transform_linear
from .laurent import LaurentX
from .linalg import MatF
from .representations import (
    SubgroupDescriptor,
    bi_invariance_group,
    double_coset_decompose,
    hecke_action,
    stabilizer,
    translate_action,
)
from .sets import DistinguishedSet, dist_measure, ring_normalize

__version__ = "0.1.0"

__all__ = [
    "BasicFn",
    "DistinguishedSet",
    "EElem",
    "FElem",
    "FieldConfig",
    "HeckeElem",
    "HeckeError",
    "LaurentX",
    "MatF",
    "SimpleFn",
    "SubgroupDescriptor",
    "basic_product",
    "bi_invariance_group",
    "convolve",
    "dist_measure",
    "double_coset_decompose",
    "hecke_action",
    "integrate_Fn",
    "integrate_GLn",
    "ring_normalize",
    "stabilizer",
    "transform_linear",
    "translate_action",
]
