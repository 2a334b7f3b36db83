from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or an integer string; decimals are refused."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ValueError(f"expected an exact 'p/q' rational, got {text!r}")
    return Fraction(s)


def format_rational(q: Fraction | int) -> str:
    return str(Fraction(q))
