import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexwalk.errors import InvalidOrderError
from complexwalk.step import ModelParams, StepDistribution, parse_complex, principal_root


def test_params_validation():
    with pytest.raises(InvalidOrderError):
        ModelParams(1)
    with pytest.raises(ValueError):
        ModelParams(3, 0)
    assert ModelParams(3).higher_order and not ModelParams(2).higher_order


def test_parse_complex():
    assert parse_complex("1,0") == 1
    assert parse_complex("-1,0.5") == -1 + 0.5j
    with pytest.raises(ValueError):
        parse_complex("1;2")


def test_principal_root_negative_real():
    assert abs(principal_root(-1.0, 2) - 1j) < 1e-15
    assert abs(principal_root(complex(-1, -0.0), 2) - 1j) < 1e-15


@pytest.mark.parametrize(
    "order,alpha,m,expected", [(3, 1, 3, 1), (3, 1, 2, 0), (4, 2, 8, 4), (5, 1j, 10, -1)]
)
def test_moment_examples(order, alpha, m, expected):
    assert StepDistribution(ModelParams(order, alpha)).moment(m) == pytest.approx(expected)


def test_abs_moment():
    assert StepDistribution(ModelParams(3)).abs_moment(7) == pytest.approx(1)
    assert StepDistribution(ModelParams(4, 16)).abs_moment(4) == pytest.approx(16)
    assert StepDistribution(ModelParams(5, 3 + 4j)).abs_moment(0) == 1


def test_char_fn_values():
    d = StepDistribution(ModelParams(4))
    assert d.char_fn(0) == pytest.approx(1)
    assert d.char_fn(1) == pytest.approx((math.cos(1) + math.cosh(1)) / 2, rel=1e-12)


def test_char_fn_derivatives_match_moments():
    d = StepDistribution(ModelParams(3))
    h = 1e-2
    # central differences of order 2 up to the 3rd derivative at 0
    f = lambda x: d.char_fn(x)  # noqa: E731
    d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h**3)
    assert d3 == pytest.approx(1j**3 * d.moment(3), rel=1e-3)
    d1 = (f(h) - f(-h)) / (2 * h)
    assert abs(d1) < 1e-4


@settings(max_examples=200, deadline=None)
@given(
    st.sampled_from([3, 4, 5, 6]),
    st.complex_numbers(max_magnitude=3, min_magnitude=0.2),
    st.complex_numbers(max_magnitude=2),
)
def test_series_matches_direct_sum(order, alpha, lam):
    d = StepDistribution(ModelParams(order, alpha))
    assert abs(d.char_fn_minus_one(lam) - (d.char_fn(lam) - 1)) < 1e-12 * max(1, abs(d.char_fn(lam)))


@pytest.mark.parametrize("order,alpha,scale", [(4, 1, 0.5), (3, 64, 8.0), (5, 1j, 0.5)])
def test_covariance(order, alpha, scale):
    d = StepDistribution(ModelParams(order, alpha))
    np.testing.assert_allclose(d.covariance(), scale * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(d.covariance_closed(), scale * np.eye(2))


def test_branch_choice_only_permutes_atoms():
    p = ModelParams(5, -2 + 1j)
    other = p.root * cmath.exp(2j * cmath.pi * 2 / 5)
    a = np.sort_complex(StepDistribution(p).atoms.round(12))
    b = np.sort_complex(StepDistribution(p, root=other).atoms.round(12))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_sampling_frequencies_and_reproducibility():
    d = StepDistribution(ModelParams(5))
    _, k = d.sample(np.random.default_rng(11), 10**6)
    freq = np.bincount(k, minlength=5) / 1e6
    sigma = math.sqrt(0.2 * 0.8 / 1e6)
    assert np.all(np.abs(freq - 0.2) <= 3 * sigma)
    a, _ = d.sample(np.random.default_rng(3), 50)
    b, _ = d.sample(np.random.default_rng(3), 50)
    assert np.array_equal(a, b)
