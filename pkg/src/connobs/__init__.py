"""Obstruction calculus for connections on finitely presented modules."""

from .algebra import (
    MonomialOrder,
    Polynomial,
    PolyRing,
    QQ,
    apply_derivation,
    partial_derivative,
    poly_add,
    poly_mul,
)
from .groebner import (
    FreeModuleElem,
    FreeResolution,
    NotInSubmodule,
    PolyMatrix,
    QuotientRing,
    Submodule,
    buchberger,
    free_resolution,
    lift_with_witness,
    module_kernel,
    normal_form,
    preimage,
    quotient_ring,
    submodule_equal,
    submodule_intersection,
    syzygy_module,
)
from .modules import (
    HomModule,
    ModuleHom,
    PresentedModule,
    direct_sum,
    free_module,
    hom_module,
    ideal_module,
    kaehler_differentials,
    present,
)
from .obstructions import (
    Connection,
    Derivation,
    DerModule,
    InternalInconsistency,
    LiftFailure,
    ObstructionReport,
    ObstructionResult,
    atiyah_class,
    curvature,
    der,
    full_report,
    ks_class,
    ks_kernel,
    lclass,
    lie_bracket,
    verify_connection,
)

__all__ = [
    "MonomialOrder",
    "Polynomial",
    "PolyRing",
    "QQ",
    "apply_derivation",
    "partial_derivative",
    "poly_add",
    "poly_mul",
    "FreeModuleElem",
    "FreeResolution",
    "NotInSubmodule",
    "PolyMatrix",
    "QuotientRing",
    "Submodule",
    "buchberger",
    "free_resolution",
    "lift_with_witness",
    "module_kernel",
    "normal_form",
    "preimage",
    "quotient_ring",
    "submodule_equal",
    "submodule_intersection",
    "syzygy_module",
    "HomModule",
    "ModuleHom",
    "PresentedModule",
    "direct_sum",
    "free_module",
    "hom_module",
    "ideal_module",
    "kaehler_differentials",
    "present",
    "Connection",
    "Derivation",
    "DerModule",
    "InternalInconsistency",
    "LiftFailure",
    "ObstructionReport",
    "ObstructionResult",
    "atiyah_class",
    "curvature",
    "der",
    "full_report",
    "ks_class",
    "ks_kernel",
    "lclass",
    "lie_bracket",
    "verify_connection",
]

__version__ = "0.1.0"
