import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbounce import spectra
from qbounce.numerics import eigenvalues_tridiagonal

ZEROS = [2.338107410459767, 4.08794944413097, 5.520559828095551, 6.786708090071759, 7.944133587120853,
         9.02265085334098, 10.040174341558085]


@pytest.fixture(scope="module")
def default_comparison():
    return spectra.compare_spectra(1.0)


def test_discretize_stencil():
    system = spectra.discretize(lambda s: 3.0 * s, 11.0, 10)
    h = 1.0
    np.testing.assert_allclose(system.diagonal, 2.0 / h ** 2 + 3.0 * np.arange(1, 11))
    np.testing.assert_allclose(system.off_diagonal, -np.ones(9))


def test_free_box_lowest_level():
    lowest = [eigenvalues_tridiagonal(spectra.discretize(lambda s: np.zeros_like(s), 1.0, n), 1)[0] for n in (100, 1000)]
    assert abs(lowest[1] - math.pi ** 2) < abs(lowest[0] - math.pi ** 2) < 1e-2
    assert abs(lowest[1] - math.pi ** 2) < 1e-4


def test_bouncer_ground_level():
    e = eigenvalues_tridiagonal(spectra.discretize(spectra.bouncer_potential, 40.0, 4000), 1)[0]
    assert abs(e - 2.33811) < 2e-4


@pytest.mark.parametrize("points", [5, 9, 0, 10.5])
def test_discretize_rejects_few_points(points):
    with pytest.raises(ValueError):
        spectra.discretize(spectra.bouncer_potential, 40.0, points)


def test_discretize_rejects_bad_box_and_nonfinite_potential():
    with pytest.raises(ValueError):
        spectra.discretize(spectra.bouncer_potential, -1.0, 100)
    with pytest.raises(ValueError, match="node 5"):
        spectra.discretize(lambda s: np.where(np.arange(s.size) == 4, np.inf, s), 10.0, 20)


def test_default_comparison(default_comparison):
    c = default_comparison
    assert c.max_pairwise_gap < 5e-4
    assert c.max_reference_gap < 5e-4
    np.testing.assert_allclose(c.airy_reference, ZEROS[:6], atol=1e-12)
    for values in (c.eigenvalues_qbb, c.eigenvalues_lambda, c.airy_reference):
        assert len(values) == 6 and np.all(np.diff(values) > 0)
    assert c.max_pairwise_gap == np.max(np.abs(c.eigenvalues_qbb - c.eigenvalues_lambda))


def test_comparison_serialises(default_comparison):
    d = default_comparison.to_dict()
    assert d["k"] == 6 and d["L"] == 40.0 and d["points"] == 4000
    assert d["max_pairwise_gap"] == default_comparison.max_pairwise_gap
    assert all(isinstance(v, float) for v in d["eigenvalues_lambda"])


def test_large_lambda_limit():
    assert spectra.compare_spectra(1e6).max_pairwise_gap < 1e-8


def test_richardson_second_order():
    assert spectra.richardson_ratio() == pytest.approx(4.0, abs=0.1)


def test_isospectrality_does_not_degrade_with_refinement():
    coarse = spectra.compare_spectra(1.0, 40.0, 1000, 4)
    fine = spectra.compare_spectra(1.0, 40.0, 2000, 4)
    assert fine.max_pairwise_gap <= coarse.max_pairwise_gap
    assert fine.max_reference_gap < coarse.max_reference_gap


def test_box_too_small_is_rejected():
    with pytest.raises(ValueError, match="increase L"):
        spectra.compare_spectra(1.0, L=12.0, points=500, k=6)


@pytest.mark.parametrize("kwargs", [{"k": 0}, {"k": 11}, {"lam": 0.0}, {"lam": -1.0}])
def test_comparison_rejects_bad_arguments(kwargs):
    args = {"lam": 1.0, "L": 40.0, "points": 200, "k": 3}
    args.update(kwargs)
    with pytest.raises(ValueError):
        spectra.compare_spectra(**args)


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 10.5))
def test_level_count_matches_airy_zero_count(energy):
    if min(abs(energy - z) for z in ZEROS) < 2e-3:
        energy += 5e-3
    want = sum(1 for z in ZEROS if z < energy)
    assert spectra.level_count_below(energy, 40.0, 4000) == want
