import math

import numpy as np
import pytest

from complexwalk import boundary as bnd
from complexwalk.errors import InvalidExtensionError, UnsupportedCombinationError
from complexwalk.solver import convergence_study
from complexwalk.spectral import apply_semigroup, cosine, eval_datum, seminorm, spectral_derivative
from complexwalk.step import ModelParams

P4 = ModelParams(4, -1)
P3 = ModelParams(3, 1)
PI = math.pi


def test_sine_series():
    bd = bnd.sine_series(PI, [1])
    assert abs(bd.base(0.0)) < 1e-15 and abs(bd.base(PI)) < 1e-15
    assert bd.base(PI / 2) == pytest.approx(1)
    w = dict(bd.base.measure)
    assert all(w[y] + w[-y] == 0 for y in w)


def test_cosine_series():
    const = bnd.cosine_series(2.0, [3.0])
    assert list(const.base.measure) == [(0.0, 3 + 0j)]
    bd = bnd.cosine_series(PI, [0, 1])
    du = spectral_derivative(bd.base)
    assert abs(du(0.0)) < 1e-15 and abs(du(PI)) < 1e-15
    w = dict(bd.base.measure)
    assert all(w[y] == w[-y] for y in w)


def test_extend():
    sin_half = bnd.HalfLineSeries("sine", (1.0,), (1.0,))
    ext = bnd.extend(sin_half, "odd")
    assert bnd.extend(ext, "odd") is ext
    x = np.linspace(0, 5, 51)
    np.testing.assert_allclose(ext.base(x), np.sin(x), atol=1e-15)
    mix = bnd.HalfLineSeries("cosine", (0.0, 2.0), (0.5, 1.5))
    np.testing.assert_allclose(bnd.extend(mix, "even").base(x), mix(x), atol=1e-14)
    cos_ext = bnd.extend(cosine(), "even")
    assert cos_ext.base == cosine()
    with pytest.raises(InvalidExtensionError):
        bnd.extend(sin_half, "even")
    with pytest.raises(InvalidExtensionError):
        bnd.extend(cosine(), "odd")


def test_invalid_data_rejected():
    with pytest.raises(InvalidExtensionError):
        bnd.BoundaryDatum(cosine(), "dirichlet", PI)
    with pytest.raises(InvalidExtensionError):
        bnd.BoundaryDatum(cosine(0.5), "periodic", PI)
    with pytest.raises(ValueError):
        bnd.BoundaryDatum(cosine(), "periodic")


def test_closure():
    assert bnd.closure_check(P3, bnd.fourier_series(2 * PI, {1: 0.5, -1: 0.5}))
    assert bnd.closure_check(P4, bnd.sine_series(PI, [1]))
    assert not bnd.closure_check(P3, bnd.sine_series(PI, [1]))
    assert not bnd.generator_preserves(P3, bnd.sine_series(PI, [1, 0.5]))
    with pytest.raises(UnsupportedCombinationError, match="odd order"):
        bnd.boundary_solve(P3, bnd.sine_series(PI, [1]), 1.0, [0.5])


def test_dirichlet_interval():
    bd = bnd.sine_series(PI, [1])
    x = np.linspace(0, PI, 33)
    for t in (0.5, 1.0, 3.0):
        u = bnd.boundary_solve(P4, bd, t, x)
        np.testing.assert_allclose(u, math.exp(-t / 24) * np.sin(x), atol=1e-14)
        assert abs(u[0]) == 0


def test_periodic_traveling_wave():
    bd = bnd.fourier_series(2 * PI, {1: 0.5, -1: 0.5})
    x = np.linspace(0, 2 * PI, 33)
    u = bnd.boundary_solve(P3, bd, 1.0, x)
    np.testing.assert_allclose(u, np.cos(x - 1 / 6), atol=1e-14)
    assert bnd.boundary_residuals(P3, bd, 1.0)["periodicity"] < 1e-14


def test_neumann_derivative():
    res = bnd.boundary_residuals(P4, bnd.cosine_series(PI, [0, 1]), 1.0)
    assert res["du_at_0"] < 1e-10 and res["du_at_L"] < 1e-10


@pytest.mark.parametrize("params", [P4, ModelParams(6, 1), ModelParams(2, 1)])
def test_parity_preserved_exactly(params):
    for bd in (bnd.sine_series(PI, [1, 0.5, -0.25]), bnd.cosine_series(PI, [1, 0.5, 0.25])):
        for t in (0.3, 1.0):
            ut = apply_semigroup(params, bd.base, t)
            assert bnd.parity_defect(ut, bd.parity) == 0
            scale = seminorm(bd.base, 0)
            if bd.parity == "odd":
                assert abs(eval_datum(ut, 0.0)) <= 1e-10 * scale
                assert abs(eval_datum(ut, PI)) <= 1e-10 * scale


@pytest.mark.parametrize("params", [P3, P4])
def test_periodic_lattice_preserved(params):
    bd = bnd.fourier_series(2.0, {0: 1, 1: 0.5j, -2: 0.3})
    ut = apply_semigroup(params, bd.base, 0.7)
    assert bnd.lattice_defect(ut, PI) == 0
    assert bd.with_base(ut).kind == "periodic"


def test_probabilistic_boundary_rate():
    bd = bnd.sine_series(PI, [1, 0.5])
    x = np.linspace(0, PI, 65)
    rep = convergence_study(P4, bd.base, 1.0, x)
    assert -1.2 <= rep.slope <= -0.8 and rep.all_bounded
    un = bnd.boundary_solve(P4, bd, 1.0, x, "walk-exact", n=1000)
    assert abs(un[0]) < 1e-15


def test_domain_check():
    with pytest.raises(ValueError, match="domain"):
        bnd.boundary_solve(P4, bnd.sine_series(PI, [1]), 1.0, [-0.1])
