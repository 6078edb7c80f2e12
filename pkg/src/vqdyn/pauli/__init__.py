from .algebra import PauliString, PauliSum, popcount
from .encoding import (
    decompose_dense,
    encode_index,
    encode_operator,
    encode_projector,
    expand_diagonal,
    walsh_hadamard,
)

__all__ = [
    "PauliString",
    "PauliSum",
    "decompose_dense",
    "encode_index",
    "encode_operator",
    "encode_projector",
    "expand_diagonal",
    "popcount",
    "walsh_hadamard",
]
