"""Citation networks of statutes and regulations.

Thin layer over the compiled ``_core`` module.
"""

from fractions import Fraction

from ._core import (  # noqa: F401
    ConfigError,
    Error,
    NotFoundError,
    __version__,
    ari,
    classify_star,
    cluster,
    consensus,
    estimate_unextracted,
    extract_stars,
    find_citations,
    map_equation,
    nmi,
    rocket,
    tokenize,
)
from ._core import ari_exact as _ari_exact


def ari_fraction(a, b):
    """Adjusted Rand index of two key -> label mappings as a Fraction."""
    num, den = _ari_exact(a, b)
    return Fraction(num, den)


def ari_exact(a, b):
    """Adjusted Rand index as an unreduced (numerator, denominator) pair."""
    return _ari_exact(a, b)
