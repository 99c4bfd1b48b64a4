"""Exact computations with quasi-triangular quasi-bialgebras, pre-Cartier data and Cartier ring representations."""

from .scalars import GaussRat, HPoly, I, NonUnitError, OrderMismatchError
from .tensor_algebra import (
    AlgebraMorphismData,
    FiniteAlgebra,
    NotInvertibleError,
    NotNilpotentError,
    TensorElement,
    embed_legs,
    exp_element,
    tensor_invert,
)
from .quasibialgebra import (
    CheckEntry,
    CheckReport,
    QuasiBialgebraData,
    QuasiTriangularData,
    gauge_twist,
    gauge_twist_base,
    verify_quasibialgebra,
    verify_quasitriangular,
)
from .precartier import (
    AssociatorOutOfScopeError,
    PreCartierData,
    QuantizationError,
    QuantizationObstructionError,
    TrivialAssociatorRequired,
    quantize,
    twist_chi,
    verify_cartier,
    verify_precartier,
)
from .families import EnSpec, build_en, build_en_twisted, build_h2
from .operators import LinearOperator
from .cartier_ring import CartierRepresentation, CartierWord, ModuleRep, evaluate_word, regular_module

__all__ = [name for name in dir() if not name.startswith("_")]
