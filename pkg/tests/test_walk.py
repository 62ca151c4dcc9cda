import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from complexwalk import walk
from complexwalk.cyclolattice import CyclotomicPoint, direction
from complexwalk.errors import InvalidSymmetryError, ResourceCapError, UnsupportedError
from complexwalk.montecarlo import block_rng
from complexwalk.step import ModelParams

# three chi-square law checks share one 1% budget
CHI2_LEVEL = 0.01 / 3


def test_zero_steps():
    d = walk.enumerate_distribution(3, 0)
    assert d.entries == {CyclotomicPoint.zero(3): 1} and d.total == 1


def test_small_distributions():
    d = walk.enumerate_distribution(4, 2)
    one_plus_i = direction(4, 0) + direction(4, 1)
    assert d.probability(one_plus_i) == Fraction(2, 16)
    d3 = walk.enumerate_distribution(3, 3)
    assert d3.probability(CyclotomicPoint.zero(3)) == Fraction(6, 27)
    assert sum(d3.entries.values()) == 27


def test_state_cap():
    with pytest.raises(ResourceCapError, match="cap"):
        walk.enumerate_distribution(5, 10, cap=100)


def test_return_probabilities():
    assert walk.return_probability_closed(3, 1) == Fraction(2, 9)
    assert walk.return_probability_closed(5, 1) == Fraction(120, 3125)
    assert float(walk.return_probability_closed(5, 1)) == 0.0384
    assert walk.return_probability_closed(3, 2) == Fraction(90, 729)
    origin = walk.origin_probabilities(3, 6)
    assert origin[6] == Fraction(90, 729)
    with pytest.raises(UnsupportedError):
        walk.return_probability_closed(4, 1)


def test_closed_form_matches_enumeration_prime_orders():
    for order, m_max in ((3, 4), (5, 2), (7, 1)):
        origin = walk.origin_probabilities(order, order * m_max)
        for m in range(1, m_max + 1):
            assert origin[order * m] == walk.return_probability_closed(order, m)


def test_asymptote():
    r = float(walk.return_probability_closed(5, 50)) / walk.return_asymptote(5, 50)
    assert abs(r - 1) < 0.02
    assert walk.return_asymptote(5, 3) == pytest.approx(math.sqrt(5) / (2 * math.pi * 3) ** 2)
    assert walk.return_asymptote(3, 3) == pytest.approx(math.sqrt(3) / (2 * math.pi * 3))


@pytest.mark.parametrize("order,target,tol", [(3, -1, 0.05), (5, -2, 0.05), (4, -1, 0.1)])
def test_recurrence_slopes(order, target, tol):
    rep = walk.recurrence_diagnostic(order, 200)
    assert abs(rep.slope - target) <= tol
    assert rep.partial_sums == sorted(rep.partial_sums)


def test_neighborhood_limit_and_growth():
    p = ModelParams(5)
    n = 10**7
    assert n * (1 - math.exp(-4 / n)) == pytest.approx(4, rel=1e-6)
    rep = walk.neighborhood_visit_stats(p, 1.0, 3000, 64, seed=1)
    assert rep.log_slope > 0
    assert rep.mean_visits == sorted(rep.mean_visits)


def test_escape():
    p = ModelParams(5)
    assert walk.escape_comparator(p, 10**4, 1.0) == pytest.approx(math.exp(-(1e4**-0.6)), rel=1e-12)
    assert walk.escape_comparator(p, 10**4, 1.0) == pytest.approx(0.996027, abs=1e-6)
    est = [walk.escape_probability(p, n, 1.0, 20000, seed=5).estimate for n in (100, 1000, 10000)]
    assert est[0] < est[1] < est[2] < 1
    assert walk.escape_probability(p, 100, 1e-9, 1000, seed=5).estimate == 1.0


def test_symmetries():
    d = walk.enumerate_distribution(4, 2)
    rot = walk.DihedralElement(1)
    assert walk.apply_lattice_symmetry(d, walk.DihedralElement()) == d
    img = walk.apply_lattice_symmetry(d, rot)
    assert img.probability(direction(4, 1) + direction(4, 2)) == Fraction(2, 16)
    for order in (3, 4, 5):
        for n in (1, 4, 7):
            d = walk.enumerate_distribution(order, n)
            for g in walk.dihedral_group(order):
                assert walk.apply_lattice_symmetry(d, g) == d


def test_invalid_symmetry():
    with pytest.raises(InvalidSymmetryError):
        walk.DihedralElement.from_permutation([0, 2, 1, 3, 4][:4])  # not a permutation of 0..3
    with pytest.raises(InvalidSymmetryError):
        walk.DihedralElement.from_permutation([0, 2, 1, 3])
    assert walk.DihedralElement.from_permutation([0, 2, 1]) == walk.DihedralElement(0, True)


def test_steps_for_guard():
    assert walk.steps_for(10, 0.3) == 3
    assert walk.steps_for(100, 0.29) == 29
    assert walk.steps_for(7, -1.0) == 7
    assert walk.sample_W(ModelParams(3), 10, 0.0, np.random.default_rng(0)) == 0


def _chi2_against_exact(samples, dist, params, scale):
    z, prob = dist.support(params, scale)
    keys = {(round(v.real, 9), round(v.imag, 9)): i for i, v in enumerate(z)}
    idx = [keys[(round(s.real, 9), round(s.imag, 9))] for s in samples]
    observed = np.bincount(idx, minlength=len(z))
    expected = prob * len(samples)
    # merge sparse cells so every expected count is at least 5
    order = np.argsort(expected)
    obs_m, exp_m, o_acc, e_acc = [], [], 0.0, 0.0
    for i in order:
        o_acc += observed[i]
        e_acc += expected[i]
        if e_acc >= 5:
            obs_m.append(o_acc)
            exp_m.append(e_acc)
            o_acc = e_acc = 0.0
    obs_m[-1] += o_acc
    exp_m[-1] += e_acc
    return stats.chisquare(obs_m, exp_m).pvalue


def test_W_law_matches_enumeration():
    p = ModelParams(3)
    n = 6
    dist = walk.enumerate_distribution(p, n)
    rng = np.random.default_rng(2024)
    samples = walk.sample_W_batch(p, n, 1.0, 10**5, rng)
    assert _chi2_against_exact(samples, dist, p, n ** (-1 / 3)) > CHI2_LEVEL


def test_negative_time_is_rotated_copy():
    p = ModelParams(3)
    n = 6
    dist = walk.enumerate_distribution(p, n)
    samples = walk.sample_W_batch(p, n, -1.0, 10**5, np.random.default_rng(77))
    back = samples / cmath.exp(1j * math.pi / 3)
    assert _chi2_against_exact(back, dist, p, n ** (-1 / 3)) > CHI2_LEVEL


def test_per_step_sampler_matches_law():
    p = ModelParams(3)
    n = 6
    dist = walk.enumerate_distribution(p, n)
    rng = np.random.default_rng(99)
    samples = np.array([walk.sample_W(p, n, 1.0, rng) for _ in range(20000)])
    assert _chi2_against_exact(samples, dist, p, n ** (-1 / 3)) > CHI2_LEVEL


def test_sample_path_shape():
    p = ModelParams(5)
    path = walk.sample_path(p, 5000, 1.0, block_rng(7, 0))
    assert len(path.values) == 5001 and path.values[0] == 0
    raw = walk.sample_path(p, 10, 1.0, block_rng(7, 0), scaled=False)
    scaled = walk.sample_path(p, 10, 1.0, block_rng(7, 0))
    np.testing.assert_allclose(raw.values * 10 ** (-1 / 5), scaled.values)
    neg = walk.sample_path(ModelParams(3), 10, -1.0, block_rng(1, 0))
    assert neg.times[0] == -1.0 and neg.values[-1] == 0
    assert neg.to_csv().splitlines()[0] == "step,t,re,im"


def test_exact_moments_normalized():
    p = ModelParams(3)
    d = walk.enumerate_distribution(p, 10)
    assert d.moment(p, 6) == pytest.approx(9.1, rel=1e-12)
    assert d.moment(p, 3) == pytest.approx(1, rel=1e-12)
