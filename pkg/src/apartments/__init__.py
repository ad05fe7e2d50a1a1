"""Apartments, Grassmann graphs and semilinear reconstruction over finite fields."""

from __future__ import annotations

from .apartment import Apartment, Frame, is_inexact, recognize_apartment
from .errors import GuardError, NotSpecialError, ReconstructionError, TypeFlipError
from .field import FieldAut, FieldSpec, enumerate_automorphisms, field_of_order, get_field
from .grassmann import (
    GrassmannGraph,
    Grassmannian,
    GrassmannianBijection,
    enumerate_grassmannian,
    gaussian_binomial,
    maximal_cliques,
)
from .linalg import SemilinearMap, projectively_equal, rref
from .reconstruct import (
    ReconstructionResult,
    induce,
    local_glue_check,
    preserves_apartments,
    random_semilinear,
    reconstruct,
)
from .special import ApartmentBijection, SpecialBijectionClass, classify_by_matching, classify_by_procedure
from .subspace import Subspace, span

__version__ = "0.1.0"
