"""Toolkit for polyregular string-to-string functions."""

from .core import Alphabet, Dfa, FiniteMonoid, LetterHom, Nfa, hom_image, transition_monoid
from .errors import (
    AlphabetMismatch,
    CapExceeded,
    NotNormalForm,
    ParseError,
    PolyregError,
    RejectedInput,
    TypeCheckError,
    ValidationError,
)

__version__ = "0.1.0"
