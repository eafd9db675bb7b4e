"""Exact rational scalars, angles mod 1, and their string forms.

All coordinates in this package are `fractions.Fraction` values.  Angles
are fractions normalized into [0, 1); "p/q" strings (q > 0, lowest terms)
are the only serialized form.  Nothing in this module, or anywhere in the
core, produces a float.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def rat(value) -> Fraction:
    """Coerce ints, int pairs and 'p/q' strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    if isinstance(value, tuple) and len(value) == 2:
        return Fraction(value[0], value[1])
    raise ParseError(f"cannot interpret {value!r} as a rational")


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            d = int(den)
            if d <= 0:
                raise ParseError(f"denominator must be positive in {text!r}")
            return Fraction(int(num), d)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}") from exc


def fmt_rat(q: Fraction) -> str:
    """Serialize as 'p/q' with q > 0 in lowest terms (always with a slash)."""
    return f"{q.numerator}/{q.denominator}"


def mod1(q: Fraction) -> Fraction:
    """Reduce into [0, 1); the representative of an angle."""
    return q - (q.numerator // q.denominator)


def angles_equal(a: Fraction, b: Fraction) -> bool:
    return mod1(a - b) == 0
