"""heisenrep: truncated operator models of Fock and non-Fock Heisenberg algebra representations."""

from .core import (
    BasisConvention,
    ConvergenceError,
    DivergentMoment,
    EmptyInterior,
    ExactComplex,
    GammaPole,
    GradedIndex,
    GradedVector,
    HeisenrepError,
    MonomialBox,
    NotGeneralPosition,
    PoleError,
    ShiftOperator,
    SingularElement,
    SpinParameter,
    TruncationWindow,
    WindowMismatch,
    as_spin,
    casimir_su2,
    commutator,
    convert_basis,
    enumerate_basis,
    interior_residual,
)

__version__ = "0.1.0"
