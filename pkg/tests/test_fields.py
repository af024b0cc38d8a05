from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphzeta import fields
from graphzeta.errors import ValidationError
from graphzeta.fields import GaussianRational as G
from graphzeta.poly import cofactor_det

small = st.fractions(min_value=-4, max_value=4, max_denominator=5)
gaussians = st.builds(G, small, small)


def test_parse_rational():
    assert fields.parse_rational("3/4") == Fraction(3, 4)
    assert fields.parse_rational(-2) == -2
    for bad in ("x", 1.5, "1/0", True):
        with pytest.raises(ValidationError):
            fields.parse_rational(bad)


def test_format_scalar():
    assert fields.format_scalar(Fraction(-3, 4)) == "-3/4"
    assert fields.format_scalar(Fraction(2)) == "2"
    assert fields.format_scalar(G(1, Fraction(-1, 2))) == ["1", "-1/2"]
    assert fields.format_scalar(0.1) == "0.10000000000000001"


def test_gaussian_basics():
    i = G(0, 1)
    assert i * i == -1
    assert (1 + i).conjugate() == 1 - i
    assert G(3, 0) == 3 and hash(G(3, 0)) == hash(3)
    with pytest.raises(ZeroDivisionError):
        i / G(0, 0)


@settings(max_examples=150, deadline=None)
@given(gaussians, gaussians, gaussians)
def test_gaussian_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    assert complex(a * b) == pytest.approx(complex(a) * complex(b))
    if b != 0:
        assert (a / b) * b == a


@settings(max_examples=40, deadline=None)
@given(st.lists(gaussians, min_size=9, max_size=9))
def test_gaussian_det_matches_cofactor(vals):
    m = np.array(vals, dtype=object).reshape(3, 3)
    assert fields.det(m) == cofactor_det(m)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=16, max_size=16))
def test_integer_det_matches_numpy(vals):
    m = np.array([Fraction(v) for v in vals], dtype=object).reshape(4, 4)
    assert fields.det(m) == round(np.linalg.det(np.array(vals, dtype=float).reshape(4, 4)))


def test_unitary_checks():
    assert fields.is_unitary(fields.as_matrix([[0, 1], [-1, 0]], fields.RATIONAL))
    assert not fields.is_unitary(fields.as_matrix([[1, 1], [0, 1]], fields.RATIONAL))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert fields.is_unitary(h.astype(complex))
