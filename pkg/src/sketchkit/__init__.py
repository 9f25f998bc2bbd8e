"""Sketches, finite categories and exactness sequents.

The names re-exported here form the stable API; submodules hold the rest.
"""

from ._kernels import BACKEND, available_backends, use_backend
from .construct import (
    ConstructibilityCertificate,
    ConstructStep,
    applicable_steps,
    certify_constructible,
    is_constructible,
    replay_certificate,
)
from .dsl import Document, dualize_document, load, parse_document, serialize_document
from .errors import (
    BudgetExceeded,
    CapExceeded,
    NotInvertible,
    ParseError,
    PreconditionError,
    ResolutionError,
    SketchkitError,
)
from .fincat import (
    Cone,
    Diagram,
    FiniteCategory,
    extract_category,
    is_limiting_cone,
    is_colimiting_cone,
    limits,
    underlying_sketch,
    validate_category,
)
from .kernel import (
    Commutativity,
    Convergence,
    Edge,
    Graph,
    Path,
    Sketch,
    SketchMorphism,
    dualize_sketch,
    is_regular_subsketch,
    is_sketch_morphism,
    is_subsketch_inclusion,
    strip_convergence,
    validate_sketch,
)
from .models import (
    NatTransformation,
    Structure,
    enumerate_nat_transformations,
    enumerate_structures,
    fibre,
    find_isomorphism,
    restrict_structure,
    transport_along_iso,
    validate_structure,
)
from .sequents import (
    FUNCTORIAL,
    STRICT,
    UPTO_ISO,
    ExactnessSequent,
    VerificationDecision,
    decide,
    exists_functorial_verification,
    exists_verification,
    exists_verification_upto_iso,
    is_unconditional_finite_kind,
    validate_sequent,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
