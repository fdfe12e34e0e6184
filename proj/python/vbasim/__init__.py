"""Android app-virtualization simulator.

Thin Python layer over the C++ core: manifest canonicalization, the add-on
customization pipeline, the detection matrix and the synthetic corpus.
"""

from ._vbasim import (
    InsufficientWarmupError,
    InvariantViolation,
    SchemaError,
    VbasimError,
    canonicalize_manifest,
    customize,
    generate_corpus,
    run_matrix,
    singular_check,
    version,
)

__all__ = [
    "InsufficientWarmupError",
    "InvariantViolation",
    "SchemaError",
    "VbasimError",
    "canonicalize_manifest",
    "customize",
    "generate_corpus",
    "run_matrix",
    "singular_check",
    "version",
]
