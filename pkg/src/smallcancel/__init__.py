"""Computing in groups given by C'(lambda) small cancellation presentations."""

from .words import (
    Alphabet,
    ContractError,
    CyclicWord,
    Fragment,
    InputError,
    PieceIndex,
    ResourceError,
    Word,
    build_piece_index,
    concat,
    cyclic_reduce,
    eta_fragments,
    free_reduce,
    invert,
)
from .presentation import (
    BlocksFamily,
    ExplicitFamily,
    PieceReport,
    Presentation,
    SymmetrizedSet,
    blocks,
    check_c_prime,
    free_presentation,
    materialize,
    parse_presentation_file,
    parse_presentation_text,
    short8,
    symmetrize,
    truncation_bound,
)

__all__ = [
    "Alphabet",
    "BlocksFamily",
    "ContractError",
    "CyclicWord",
    "ExplicitFamily",
    "Fragment",
    "InputError",
    "PieceIndex",
    "PieceReport",
    "Presentation",
    "ResourceError",
    "SymmetrizedSet",
    "Word",
    "blocks",
    "build_piece_index",
    "check_c_prime",
    "concat",
    "cyclic_reduce",
    "eta_fragments",
    "free_presentation",
    "free_reduce",
    "invert",
    "materialize",
    "parse_presentation_file",
    "parse_presentation_text",
    "short8",
    "symmetrize",
    "truncation_bound",
]
