import math

import numpy as np
import pytest

from complexwalk.characteristic import error_bound_K
from complexwalk.solver import (
    SolveRequest,
    convergence_study,
    default_grid,
    error_bound_C,
    solve,
    solve_walk_exact,
    solve_walk_mc,
)
from complexwalk.spectral import AtomicMeasure, Datum, constant, cosine
from complexwalk.step import ModelParams

P4 = ModelParams(4, -1)
P3 = ModelParams(3, 1)


def test_zero_time_is_datum():
    x = default_grid(33)
    np.testing.assert_allclose(solve_walk_exact(P4, cosine(), 0.0, x, 50), np.cos(x), atol=1e-15)


def test_walk_exact_at_origin():
    bound = 1.1 * error_bound_K(P4, 1.0, 1.0) / 1e4
    u = solve_walk_exact(P4, cosine(), 1.0, 0.0, 10**4)[0]
    assert abs(u - math.exp(-1 / 24)) <= bound


def test_constant_datum_has_no_variance():
    mean, se = solve_walk_mc(P4, constant(2.5), 1.0, [0.0, 1.0], 100, 1000, seed=1)
    np.testing.assert_allclose(mean, 2.5)
    np.testing.assert_allclose(se, 0, atol=1e-12)


def test_mc_deterministic_across_workers():
    f = Datum(AtomicMeasure([1.0, -0.5], [0.5, 0.5j]))
    a = solve_walk_mc(P3, f, 1.0, [0.0, 0.3], 200, 100000, seed=9, workers=1)
    b = solve_walk_mc(P3, f, 1.0, [0.0, 0.3], 200, 100000, seed=9, workers=4)
    c = solve_walk_mc(P3, f, 1.0, [0.0, 0.3], 200, 100000, seed=9, workers=1)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.array_equal(a[0], c[0])


def test_mc_against_exact():
    x = default_grid(65)
    mean, se = solve_walk_mc(P3, cosine(), 1.0, x, 100, 200000, seed=3)
    exact = solve_walk_exact(P3, cosine(), 1.0, x, 100)
    z = np.abs(mean - exact) / se
    assert np.mean(z <= 3) >= 0.95


def test_request_validation():
    with pytest.raises(ValueError):
        SolveRequest(P3, cosine(), 1.0, method="bogus")
    with pytest.raises(ValueError):
        SolveRequest(P3, cosine(), 1.0, method="walk-mc")
    with pytest.raises(ValueError):
        SolveRequest(P3, cosine(), 1.0, n=0)


def test_solve_result_csv():
    res = solve(SolveRequest(P3, cosine(), 1.0, [0.0, 1.0], n=100))
    lines = res.to_csv().splitlines()
    assert lines[0] == "x,u_re,u_im,un_re,un_im,abs_err"
    assert len(lines) == 3
    t0 = solve(SolveRequest(P3, cosine(), 2.0, [0.0], n=100, t0=1.0))
    np.testing.assert_allclose(t0.u, np.cos(-1 / 6))


def test_error_constant():
    assert error_bound_C(P3, constant(1.0), 1.0) == 0
    assert error_bound_C(P3, cosine(), 1.0) == pytest.approx(1 / 6 + 1 / 72 - 1 / 720)


@pytest.mark.parametrize(
    "params,t", [(P4, 1.0), (P3, 1.0), (P3, -1.0), (ModelParams(2, 1), 1.0)]
)
def test_convergence_order(params, t):
    rep = convergence_study(params, cosine(), t)
    assert -1.2 <= rep.slope <= -0.8
    assert rep.n_threshold is not None and rep.all_bounded


def test_convergence_grid_validation():
    with pytest.raises(ValueError):
        convergence_study(P3, cosine(), 1.0, n_grid=[10, 100, 1000])
