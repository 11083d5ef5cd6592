"""Exact-rational codecs and deterministic JSON helpers.

Everything the package writes to disk goes through these helpers so that
repeated runs are byte-identical: rationals travel as ``num/den`` strings
(never floats), and JSON is emitted with sorted keys and fixed separators.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any


def format_rational(value: Fraction | int) -> str:
    """Render a rational as ``num/den`` (``den`` omitted when 1)."""
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def parse_rational(text: str | int) -> Fraction:
    """Parse an integer, ``num/den`` string, or decimal-free numeral."""
    if isinstance(text, bool):  # bool is an int subclass; reject explicitly
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        body = text.strip()
        try:
            if "/" in body:
                num, _, den = body.partition("/")
                return Fraction(int(num), int(den))
            return Fraction(int(body))
        except ZeroDivisionError:
            raise ValueError(f"zero denominator: {text!r}") from None
    raise ValueError(f"not a rational: {text!r}")


def stable_json(payload: Any) -> str:
    """Canonical JSON: sorted keys, no whitespace drift, trailing newline."""
    _reject_floats(payload)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def stable_hash(payload: Any) -> str:
    return hashlib.sha256(stable_json(payload).encode("ascii")).hexdigest()


def _reject_floats(payload: Any) -> None:
    # Floats silently destroy exactness; fail loudly before they reach disk.
    if isinstance(payload, float):
        raise ValueError("refusing to serialize a float; use format_rational")
    if isinstance(payload, dict):
        for key, value in payload.items():
            _reject_floats(key)
            _reject_floats(value)
    elif isinstance(payload, (list, tuple)):
        for value in payload:
            _reject_floats(value)
