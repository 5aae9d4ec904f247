"""Kernel evaluation and the partial-fraction identity."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imqcardinal import KernelParams, ValidationError, imq_eval, partial_fraction_split


def test_imq_eval_hand_values():
    assert imq_eval(KernelParams(1, 1), 0.0) == 1.0
    assert imq_eval(KernelParams(1, 1), 1.0) == 0.5
    assert imq_eval(KernelParams(1, 2), 2.0) == 1.0 / 25.0


def test_imq_eval_array_and_peak():
    params = KernelParams(2.0, 2)
    t = np.linspace(-3, 3, 41)
    values = imq_eval(params, t)
    assert values.shape == t.shape
    assert np.all(values > 0)
    assert values.max() == imq_eval(params, 0.0) == 2.0 ** (-4)


@given(
    alpha=st.floats(0.3, 10.0),
    k=st.integers(1, 6),
    t=st.floats(-100.0, 100.0),
)
def test_imq_eval_even(alpha, k, t):
    params = KernelParams(alpha, k)
    assert imq_eval(params, t) == imq_eval(params, -t)


@given(
    alpha=st.floats(0.3, 10.0),
    k=st.integers(1, 6),
    t1=st.floats(0.0, 50.0),
    dt=st.floats(0.1, 50.0),
)
def test_imq_eval_monotone_decreasing(alpha, k, t1, dt):
    params = KernelParams(alpha, k)
    assert imq_eval(params, t1) > imq_eval(params, t1 + dt)


def test_imq_eval_matches_plain_power():
    # repeated squaring must agree with the direct formula
    for k in range(1, 9):
        params = KernelParams(1.7, k)
        t = 2.31
        expected = (1.7**2 + t**2) ** float(-k)
        assert imq_eval(params, t) == pytest.approx(expected, rel=1e-15)


def test_kernel_params_validation():
    with pytest.raises(ValidationError):
        KernelParams(0.0, 1)
    with pytest.raises(ValidationError):
        KernelParams(-2.0, 1)
    with pytest.raises(ValidationError):
        KernelParams(1.0, 0)


def test_partial_fraction_hand_cases_exact():
    # All three hand cases evaluate exactly in floating point.
    assert partial_fraction_split(1.0, 2, 1) == (0.25, 0.25)
    assert partial_fraction_split(1.0, 2, 0) == (0.2, 0.2)
    assert partial_fraction_split(1.0, 4, 1) == (0.05, 0.05)


def test_partial_fraction_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        partial_fraction_split(1.0, 0, 0)
    with pytest.raises(ValidationError):
        partial_fraction_split(1.0, 3, 4)
    with pytest.raises(ValidationError):
        partial_fraction_split(1.0, 3, -1)
    with pytest.raises(ValidationError):
        partial_fraction_split(0.0, 3, 1)


def test_partial_fraction_random_sweep():
    rng = np.random.default_rng(7)
    for _ in range(2000):
        alpha = rng.uniform(0.5, 5.0)
        M = int(rng.integers(1, 101))
        j = int(rng.integers(0, M + 1))
        lhs, rhs = partial_fraction_split(alpha, M, j)
        assert abs(lhs - rhs) / lhs <= 1e-12


@given(
    num=st.integers(1, 50),
    den=st.integers(1, 10),
    M=st.integers(1, 100),
    data=st.data(),
)
@settings(max_examples=200)
def test_partial_fraction_numerator_identity_exact(num, den, M, data):
    # ((2/M)j + 1)(a2 + (M-j)^2) + (3 - (2/M)j)(a2 + j^2) == 4 a2 + M^2,
    # checked in exact rational arithmetic.
    j = data.draw(st.integers(0, M))
    a2 = Fraction(num, den) ** 2
    s = Fraction(2 * j, M)
    lhs = (s + 1) * (a2 + (M - j) ** 2) + (3 - s) * (a2 + j * j)
    assert lhs == 4 * a2 + M * M


@given(
    num=st.integers(1, 50),
    den=st.integers(1, 10),
    M=st.integers(1, 100),
    data=st.data(),
)
@settings(max_examples=200)
def test_partial_fraction_identity_exact_rational(num, den, M, data):
    j = data.draw(st.integers(0, M))
    a2 = Fraction(num, den) ** 2
    lhs = Fraction(1) / ((a2 + j * j) * (a2 + (M - j) ** 2))
    s = Fraction(2 * j, M)
    rhs = ((s + 1) / (a2 + j * j) + (3 - s) / (a2 + (M - j) ** 2)) / (4 * a2 + M * M)
    assert lhs == rhs
