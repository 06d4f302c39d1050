
import numpy as np
import pytest

from toeplitz_triples.bases import HermiteBasis, fock_constant, fock_norm_sq
from toeplitz_triples.multiindex import enumerate_basis
from toeplitz_triples.segal_bargmann import (
    SBTransform,
    UnderResolved,
    basis_mapping_errors,
    gram_residual,
    intertwining_check,
    number_operator_check,
)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_hermite_to_monomials(n, t):
    sb = SBTransform(n, t)
    errs = basis_mapping_errors(sb, 6)
    assert max(errs.values()) <= 1e-6
    assert gram_residual(sb, 6) <= 1e-6


@pytest.mark.parametrize("t", [1.0, 3.0])
def test_forward_pointwise(t):
    # W h_k evaluated at a point equals a_k z^k
    sb = SBTransform(1, t)
    hb = HermiteBasis(1, t)
    z = np.array([[0.3 + 0.4j], [-1.1 + 0.2j]])
    for k in range(5):
        got = sb.forward(lambda x, k=k: hb.evaluate((k,), x), z)
        want = fock_constant((k,), t) * z[:, 0] ** k
        assert np.allclose(got, want, atol=1e-10)


def test_isometry_on_random_combination(rng):
    t = 1.3
    sb = SBTransform(2, t)
    hb = HermiteBasis(2, t)
    basis = list(enumerate_basis(2, 4))
    c = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))

    def f(x):
        return sum(ci * hb.evaluate(a, x) for ci, a in zip(c, basis))

    taylor = sb.taylor_coefficients(f, 4)
    fock_norm = sum(abs(v) ** 2 * fock_norm_sq(a, t) for a, v in taylor.items())
    assert fock_norm == pytest.approx(np.sum(np.abs(c) ** 2), rel=1e-10)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.5])
def test_intertwining(t):
    rep = intertwining_check(t, 8)
    assert rep.max_residual <= 1e-9


@pytest.mark.parametrize("n", [1, 2])
def test_number_operator_diagonal(n):
    assert number_operator_check(1.5, n, 4) <= 1e-9


@pytest.mark.parametrize("t", [0.7, 1.0, 2.0])
def test_inverse_integral_matches_series(t):
    # u-coefficients F map back to sum F_alpha h_alpha; the integral formula must agree
    sb = SBTransform(1, t)
    hb = HermiteBasis(1, t)
    coeffs = {(1,): 0.5, (3,): -0.25j}
    x = np.linspace(-2, 2, 9)[:, None]
    series = sb.inverse(coeffs, x)
    direct = np.array([sb.inverse_integral_n1(coeffs, float(xi)) for xi in x[:, 0]])
    expected = 0.5 * hb.eval_1d(1, x[:, 0]) - 0.25j * hb.eval_1d(3, x[:, 0])
    assert np.allclose(series, expected, atol=1e-13)
    assert np.allclose(direct, expected, atol=1e-9)


def test_under_resolved():
    sb = SBTransform(1, 1.0, nodes=20)
    assert sb.max_degree == 5
    with pytest.raises(UnderResolved):
        basis_mapping_errors(sb, 6)


@pytest.mark.parametrize("bad", [dict(n=0), dict(n=1, t=0.0)])
def test_invalid(bad):
    with pytest.raises(ValueError):
        SBTransform(**bad)
