"""Exact rational scalar backend.

All arithmetic in the package is exact.  gmpy2's mpq is used when available
(it is several times faster than fractions.Fraction); the stdlib Fraction is
the fallback.  The backend is fixed once at import time.  Set
BUBBLEX_RATIONAL=fraction to force the pure-Python scalars, or =gmpy2 to
require the fast ones.
"""

from __future__ import annotations

import os
from fractions import Fraction

_choice = os.environ.get("BUBBLEX_RATIONAL", "").strip().lower()
if _choice not in ("", "gmpy2", "fraction"):
    raise RuntimeError(f"BUBBLEX_RATIONAL must be 'gmpy2' or 'fraction', got {_choice!r}")

if _choice == "fraction":
    RAT = Fraction
    BACKEND = "fraction"
else:
    try:
        from gmpy2 import mpq as RAT  # type: ignore[no-redef]

        BACKEND = "gmpy2"
    except ImportError:
        if _choice == "gmpy2":
            raise
        RAT = Fraction  # type: ignore[misc]
        BACKEND = "fraction"

ZERO = RAT(0)
ONE = RAT(1)


def rat(p, q=1):
    """Exact rational p/q."""
    return RAT(p, q)


def parse_rat(s: str):
    """Parse 'p' or 'p/q' into an exact rational."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return RAT(int(p), int(q))
    return RAT(int(s))


def rat_str(x) -> str:
    """Canonical string: lowest terms, positive denominator, 'p' or 'p/q'."""
    x = RAT(x)
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"
