from ._core import (
    AmbiguousSigns,
    Error,
    IllConditioned,
    NonGeneric,
    NotAdmissible,
    ParseError,
    Potential,
    TruncationTooSmall,
    compare,
    extraction_sweep,
    from_text,
    gap_lengths,
    generate,
    hill_spectrum,
    invariants,
    perturb,
    reconstruct,
)

__all__ = [
    "AmbiguousSigns",
    "Error",
    "IllConditioned",
    "NonGeneric",
    "NotAdmissible",
    "ParseError",
    "Potential",
    "TruncationTooSmall",
    "compare",
    "extraction_sweep",
    "from_text",
    "gap_lengths",
    "generate",
    "hill_spectrum",
    "invariants",
    "perturb",
    "reconstruct",
]
