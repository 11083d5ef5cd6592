from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bdlab.serialize import format_rational, parse_rational, stable_hash, stable_json


def test_format_integer_has_no_denominator():
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(7) == "7"
    assert format_rational(Fraction(-2)) == "-2"
    assert format_rational(Fraction(0)) == "0"


def test_format_proper_fraction():
    assert format_rational(Fraction(1, 16)) == "1/16"
    assert format_rational(Fraction(-529, 256)) == "-529/256"


def test_parse_accepts_both_shapes():
    assert parse_rational("3") == Fraction(3)
    assert parse_rational("1/16") == Fraction(1, 16)
    assert parse_rational("-7/3") == Fraction(-7, 3)
    assert parse_rational(5) == Fraction(5)


def test_parse_rejects_garbage():
    for bad in ("", "1/0", "one", "1.5", "1/2/3"):
        with pytest.raises(ValueError):
            parse_rational(bad)


@given(st.fractions())
def test_round_trip_is_identity(q: Fraction):
    assert parse_rational(format_rational(q)) == q


def test_stable_json_sorts_keys_and_strips_spaces():
    assert stable_json({"b": 1, "a": [2, 3]}) == '{"a":[2,3],"b":1}\n'


def test_stable_json_rejects_floats():
    with pytest.raises(ValueError):
        stable_json({"x": 0.5})
    with pytest.raises(ValueError):
        stable_json([1, [2.0]])


def test_stable_hash_is_deterministic():
    payload = {"levels": {"1": 3, "2": 7}, "m": ["4", "16"]}
    assert stable_hash(payload) == stable_hash(dict(reversed(payload.items())))
    assert stable_hash(payload) != stable_hash({"levels": {}})
