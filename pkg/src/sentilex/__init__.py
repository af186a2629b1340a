"""Build a SentiWordNet-style sentiment lexicon from a dictionary and a seed core."""

from sentilex.lexicon import (
    Label,
    LexiconFormatError,
    PolarityScores,
    PosTag,
    SentiLexicon,
    Synset,
    neutrality,
    read_lexicon,
    write_lexicon,
)

__version__ = "0.1.0"

__all__ = [
    "Label",
    "LexiconFormatError",
    "PolarityScores",
    "PosTag",
    "SentiLexicon",
    "Synset",
    "neutrality",
    "read_lexicon",
    "write_lexicon",
]
