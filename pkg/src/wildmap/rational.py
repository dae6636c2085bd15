"""Parsing and formatting helpers for exact rationals.

Command-line values and JSON payloads carry rationals as ``num/den`` strings
("3/2", "7/288").  Plain integers and finite decimal strings ("1.5", "0.125",
"1e-6") are accepted on input and converted exactly; binary floats are
deliberately rejected by :func:`parse_rational` so no rounding noise sneaks
into exact arithmetic through the text interface.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Convert CLI/JSON text to an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise DomainError(
            f"refusing to convert binary float {text!r}; pass a string such as '3/2' or '1.5'"
        )
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Render as ``num/den`` (or bare integer when the denominator is 1)."""
    return str(Fraction(q))


def rational_json(q: Fraction) -> dict:
    """JSON shape for an exact value: rational string plus decimal approximation."""
    q = Fraction(q)
    return {"rational": format_rational(q), "decimal": float(q)}
