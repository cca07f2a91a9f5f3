import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sparsetrig.model import (
    Bernoulli,
    FixedSize,
    FrequencyGrid,
    SamplingSet,
    SparseTrigPoly,
    TWO_PI,
    derive_seed,
    draw_coefficients,
    draw_sampling_set,
    draw_support,
    evaluate,
    fourier_matrix,
    instance_from_json,
    instance_to_json,
)


def test_grid_size_exact_integer():
    assert FrequencyGrid(q=40, d=1).size == 81
    assert FrequencyGrid(q=3, d=2).size == 49
    # no silent overflow: python ints
    assert FrequencyGrid(q=10**6, d=3).size == (2 * 10**6 + 1) ** 3


def test_grid_enumeration_is_lexicographic():
    grid = FrequencyGrid(q=1, d=2)
    assert grid.frequencies() == [
        (-1, -1), (-1, 0), (-1, 1),
        (0, -1), (0, 0), (0, 1),
        (1, -1), (1, 0), (1, 1),
    ]


@given(st.integers(0, 4), st.integers(1, 3), st.data())
@settings(max_examples=60, deadline=None)
def test_grid_index_roundtrip(q, d, data):
    grid = FrequencyGrid(q=q, d=d)
    idx = data.draw(st.integers(0, grid.size - 1))
    assert grid.index_of(grid.frequency_at(idx)) == idx


def test_grid_rejects_out_of_range():
    grid = FrequencyGrid(q=2, d=1)
    with pytest.raises(ValueError):
        grid.index_of((3,))


def test_evaluate_empty_poly_is_zero():
    grid = FrequencyGrid(q=2, d=1)
    poly = SparseTrigPoly(grid, {})
    assert evaluate(poly, (0.3,)) == 0


def test_evaluate_constant_term():
    grid = FrequencyGrid(q=2, d=1)
    poly = SparseTrigPoly(grid, {(0,): 1.0})
    assert evaluate(poly, (1.234,)) == pytest.approx(1 + 0j)


def test_evaluate_first_harmonic_at_pi():
    grid = FrequencyGrid(q=2, d=1)
    poly = SparseTrigPoly(grid, {(1,): 1.0})
    assert evaluate(poly, (math.pi,)) == pytest.approx(-1 + 0j, abs=1e-12)


def test_poly_drops_zero_coefficients():
    grid = FrequencyGrid(q=2, d=1)
    poly = SparseTrigPoly(grid, {(1,): 0.0, (2,): 1j})
    assert poly.support == {(2,)}


def test_sampling_determinism_and_range():
    grid = FrequencyGrid(q=5, d=2)
    a = draw_sampling_set(grid, 3, seed=11)
    b = draw_sampling_set(grid, 3, seed=11)
    assert np.array_equal(a.points, b.points)
    assert a.points.shape == (3, 2)
    assert np.all(a.points >= 0) and np.all(a.points < TWO_PI)


def test_sampling_rejects_zero_points():
    with pytest.raises(ValueError):
        draw_sampling_set(FrequencyGrid(q=1, d=1), 0, seed=1)


def test_sampling_mean_matches_uniform_law():
    # law of large numbers: mean of 10000 uniform draws near pi
    grid = FrequencyGrid(q=1, d=1)
    pts = draw_sampling_set(grid, 10_000, seed=123).points
    assert abs(pts.mean() - math.pi) < 0.1


def test_fixed_support_is_permutation_prefix():
    grid = FrequencyGrid(q=3, d=1)
    full = draw_support(grid, FixedSize(grid.size), seed=5)
    assert full == set(grid.frequencies())
    assert draw_support(grid, FixedSize(0), seed=5) == set()
    with pytest.raises(ValueError):
        draw_support(grid, FixedSize(grid.size + 1), seed=5)


def test_fixed_support_deterministic():
    grid = FrequencyGrid(q=10, d=1)
    assert draw_support(grid, FixedSize(4), 7) == draw_support(grid, FixedSize(4), 7)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_bernoulli_support_concentrates(seed):
    grid = FrequencyGrid(q=4999, d=1)  # D = 9999, close to 10^4
    tau = 0.5
    support = draw_support(grid, Bernoulli(tau), seed)
    d = grid.size
    sigma = math.sqrt(d * tau * (1 - tau))
    assert abs(len(support) - d * tau) <= 3 * sigma


def test_coefficients_distribution_and_determinism():
    grid = FrequencyGrid(q=60_000, d=1)
    support = {(k,) for k in range(-25_000, 25_000)}
    poly = draw_coefficients(grid, support, seed=77)
    reals = np.array([c.real for c in poly.coeffs.values()])
    assert 0.97 <= reals.var() <= 1.03
    again = draw_coefficients(grid, support, seed=77)
    assert poly.coeffs == again.coeffs


def test_coefficients_empty_support():
    grid = FrequencyGrid(q=1, d=1)
    assert draw_coefficients(grid, set(), seed=1).coeffs == {}


def test_fourier_matrix_at_origin_is_ones():
    grid = FrequencyGrid(q=2, d=1)
    samples = SamplingSet(points=np.zeros((1, 1)))
    mat = fourier_matrix(samples, grid.frequencies())
    assert np.allclose(mat, 1.0)


def test_fourier_matrix_unimodular():
    grid = FrequencyGrid(q=3, d=2)
    samples = draw_sampling_set(grid, 7, seed=3)
    mat = fourier_matrix(samples, grid.frequencies())
    assert np.max(np.abs(np.abs(mat) - 1.0)) < 1e-12


def test_fourier_matrix_explicit_row():
    grid = FrequencyGrid(q=1, d=1)
    samples = SamplingSet(points=np.array([[math.pi / 2]]))
    row = fourier_matrix(samples, grid.frequencies())[0]
    assert np.allclose(row, [-1j, 1.0, 1j], atol=1e-12)


def test_fourier_matrix_column_restriction_consistency():
    grid = FrequencyGrid(q=4, d=1)
    samples = draw_sampling_set(grid, 6, seed=9)
    support = [(-2,), (1,), (3,)]
    full = fourier_matrix(samples, grid.frequencies())
    restricted = fourier_matrix(samples, support)
    cols = [grid.index_of(k) for k in support]
    assert np.array_equal(full[:, cols], restricted)


def test_derive_seed_separates_roles():
    assert derive_seed(1, "sampling") != derive_seed(1, "support")
    assert derive_seed(1, "trial", 2, 3) != derive_seed(1, "trial", 3, 2)


def test_json_roundtrip_and_field_names():
    grid = FrequencyGrid(q=2, d=2)
    poly = SparseTrigPoly(grid, {(1, -2): 0.5 - 1.25j, (0, 0): 2.0})
    samples = draw_sampling_set(grid, 4, seed=42)
    doc = json.loads(instance_to_json(poly, samples))
    assert set(doc) == {"q", "d", "coeffs", "points", "seed"}
    assert set(doc["coeffs"][0]) == {"k", "re", "im"}
    back_poly, back_samples = instance_from_json(instance_to_json(poly, samples))
    assert back_poly.coeffs == poly.coeffs
    assert np.array_equal(back_samples.points, samples.points)
    assert back_samples.seed == 42
