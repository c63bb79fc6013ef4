"""Exact/floating arithmetic modes and parameter parsing.

Exact mode works with :class:`fractions.Fraction`; complex parameters are then
Gaussian rationals stored as a ``(re, im)`` pair of fractions.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .errors import DomainError

EXACT = "exact"
FLOAT = "float"
MODES = (EXACT, FLOAT)

Number = Union[int, Fraction, float]
ZLike = Union[complex, float, int, Fraction, str, tuple]


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise DomainError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def to_exact(value) -> Fraction:
    """Convert an int, Fraction or rational string to a Fraction; floats are refused."""
    if isinstance(value, bool):
        raise DomainError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise DomainError(f"exact mode requires a rational value, got {value!r}")


def to_real(value, mode: str = EXACT):
    if check_mode(mode) == EXACT:
        return to_exact(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?[\d./]+(?:[eE][+-]?\d+)?)?\s*"
    r"(?:(?P<sign>[+-])\s*(?P<im>[\d./]*(?:[eE][+-]?\d+)?)\s*[ij])?\s*$"
)


def parse_z(text: str) -> tuple[Fraction, Fraction]:
    """Parse ``"1/2"``, ``"1+i"``, ``"0.3+0.2i"``, ``"-2i"`` into rational parts.

    Decimal literals are read exactly (``"0.3"`` is 3/10).
    """
    s = text.strip().replace(" ", "")
    if re.fullmatch(r"[+-]?[\d./]*(?:[eE][+-]?\d+)?[ij]", s):
        body = s[:-1]
        if body in ("", "+", "-"):
            body += "1"
        return Fraction(0), Fraction(body)
    m = _COMPLEX_RE.match(s)
    if not m or (m.group("re") is None and m.group("sign") is None):
        raise DomainError(f"cannot parse complex parameter {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if m.group("sign"):
        mag = Fraction(m.group("im")) if m.group("im") else Fraction(1)
        im_part = mag if m.group("sign") == "+" else -mag
    return re_part, im_part


def z_parts(z: ZLike, mode: str = EXACT):
    """``(re, im)`` of ``z`` as Fractions (exact) or floats."""
    if isinstance(z, str):
        re_part, im_part = parse_z(z)
    elif isinstance(z, tuple):
        re_part, im_part = z
    elif isinstance(z, complex):
        if check_mode(mode) == EXACT:
            raise DomainError("exact mode requires Gaussian-rational z; pass a string or a pair of Fractions")
        return z.real, z.imag
    else:
        re_part, im_part = z, 0
    if check_mode(mode) == EXACT:
        return to_exact(re_part), to_exact(im_part)
    return float(re_part), float(im_part)


def z_complex(z: ZLike) -> complex:
    re_part, im_part = z_parts(z, FLOAT)
    return complex(re_part, im_part)


def abs2_shift(zr, zi, c):
    """``|z + c|**2`` for real shift ``c``."""
    return (zr + c) * (zr + c) + zi * zi


def rising_factorial(t, n: int):
    """``t (t+1) ... (t+n-1)``; the empty product is 1."""
    if n < 0:
        raise DomainError("rising factorial needs n >= 0")
    out = Fraction(1) if isinstance(t, (int, Fraction)) else 1.0
    for k in range(n):
        out *= t + k
    return out
