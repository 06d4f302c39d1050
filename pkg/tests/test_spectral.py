import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toeplitz_triples.multiindex import enumerate_basis
from toeplitz_triples.operators import toeplitz_monomial, toeplitz_radial
from toeplitz_triples.bases import R_SYMBOL
from toeplitz_triples.spectral import (
    NonHermitianError,
    SpectrumStream,
    counting,
    disc_bundle_stream,
    dixmier_closed_form_ball,
    dixmier_extrapolated,
    dixmier_log_average,
    hardy_stream,
    spectral_dimension,
    spectrum_of,
    stream_from_values,
    t_r_inverse_stream,
    weyl_fit,
    zeta_growth_exponent,
    zeta_partial,
)


def test_stream_sorting_and_expansion():
    s = SpectrumStream(np.array([3.0, -1.0, 2.0]), np.array([1, 2, 3]))
    assert list(s.values) == [-1.0, 2.0, 3.0]
    assert s.total == 6
    assert list(s.expanded(4)) == [-1.0, -1.0, 2.0, 2.0]
    with pytest.raises(ValueError):
        s.expanded(7)
    with pytest.raises(ValueError):
        SpectrumStream(np.array([1.0]), np.array([0]))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matrix_spectrum_matches_stream(n):
    enum = enumerate_basis(n, 12)
    op = toeplitz_radial(R_SYMBOL, enum)
    got = spectrum_of(op)
    inv = t_r_inverse_stream(n, 12)
    assert np.allclose(np.sort(1.0 / got.values), np.sort(inv.values))
    assert sorted(got.multiplicities) == sorted(inv.multiplicities)


def test_non_hermitian_rejected():
    op = toeplitz_monomial((1,), enumerate_basis(1, 5))
    with pytest.raises(NonHermitianError):
        spectrum_of(op)


def test_counting_by_hand():
    s = t_r_inverse_stream(2, 10)  # values k+3 with multiplicity k+1
    assert counting(s, 3.0) == 0
    assert counting(s, 3.5) == 1
    assert counting(s, 6.0) == 1 + 2 + 3
    with pytest.raises(ValueError):
        counting(s, 0.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weyl_dimension(n):
    fit = weyl_fit(t_r_inverse_stream(n, 100_000))
    assert abs(fit.exponent - n) <= 0.05
    # leading coefficient of M(lambda) is 1/n!
    assert fit.coefficient == pytest.approx(1 / math.factorial(n), rel=0.05)


@pytest.mark.parametrize("n", [1, 2])
def test_hardy_and_disc_bundle(n):
    assert abs(spectral_dimension(hardy_stream(n, 100_000)) - n) <= 0.05
    assert abs(spectral_dimension(disc_bundle_stream(n, 100_000)) - (n + 1)) <= 0.05


def test_weyl_fit_validation():
    s = t_r_inverse_stream(1, 100)
    with pytest.raises(ValueError):
        weyl_fit(s, (10.0, 20.0))
    with pytest.raises(ValueError):
        weyl_fit(s, (1.0, 1e4))


def test_zeta_convergence_boundary():
    s = t_r_inverse_stream(2, 3000)
    counts = [10_000, 40_000, 160_000]
    assert zeta_growth_exponent(s, 3.0, counts) < -0.3
    assert abs(zeta_growth_exponent(s, 2.0, counts)) < 0.1
    assert zeta_partial(s, 3.0) == pytest.approx(sum((k + 1) / (k + 3) ** 3 for k in range(3001)))


def test_dixmier_n1_against_harmonic_sum():
    s = t_r_inverse_stream(1, 1_000_100)
    count = 1_000_000
    exact = math.fsum(1.0 / (k + 2) for k in range(count)) / math.log(count)
    assert dixmier_log_average(s, 1, count) == pytest.approx(exact, rel=1e-12)
    assert abs(exact - 1.0) <= 0.05


@pytest.mark.parametrize("n,target", [(1, 1.0), (2, 0.5), (3, 1 / 6)])
def test_closed_form(n, target):
    assert dixmier_closed_form_ball(-n, 1.0, n) == pytest.approx(target, rel=1e-12)
    # a constant passed as a callable averages to itself
    assert dixmier_closed_form_ball(-n, lambda z: np.ones(z.shape[0]), n) == pytest.approx(target, rel=1e-12)
    with pytest.raises(ValueError):
        dixmier_closed_form_ball(-n + 1, 1.0, n)


def test_extrapolation_recovers_limit_n1():
    s = t_r_inverse_stream(1, 1_000_100)
    a, _ = dixmier_extrapolated(s, 1, [1000, 10_000, 100_000, 1_000_000])
    assert a == pytest.approx(1.0, abs=0.01)


@given(st.lists(st.floats(-50, 50).filter(lambda v: abs(v) > 1e-3), min_size=1, max_size=30))
@settings(max_examples=50, deadline=None)
def test_stream_from_values_preserves_count(values):
    s = stream_from_values(np.array(values))
    assert s.total == len(values)
    assert np.allclose(np.sort(s.expanded()), np.sort(values), atol=1e-6)
