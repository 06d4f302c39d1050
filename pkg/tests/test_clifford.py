import math

import numpy as np
import pytest

from toeplitz_triples.clifford import SIGMA1, SIGMA2, SIGMA3, dirac_bergman, gamma_matrices, spinor_lift
from toeplitz_triples.multiindex import enumerate_basis
from toeplitz_triples.operators import interior_distance, operator_norm, toeplitz_monomial


@pytest.mark.parametrize("n", range(1, 8))
def test_clifford_relations(n):
    cl = gamma_matrices(n)
    assert len(cl.gammas) == n
    assert cl.d == 2 ** (n // 2)
    assert cl.anticommutator_residual() == 0.0


def test_low_dimensional_gammas():
    assert np.array_equal(gamma_matrices(1).gammas[0], np.eye(1))
    g2 = gamma_matrices(2).gammas
    assert np.array_equal(g2[0], SIGMA2) and np.array_equal(g2[1], SIGMA3)
    g3 = gamma_matrices(3).gammas
    assert np.array_equal(g3[2], -SIGMA1)


def test_gamma_rejects_zero():
    with pytest.raises(ValueError):
        gamma_matrices(0)


def test_dirac_hand_matrix():
    enum = enumerate_basis(1, 2)
    b = np.array([[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]])
    d = dirac_bergman(1.0, enum)
    assert np.allclose(d.matrix, -1j * (b - b.T), atol=1e-15)


@pytest.mark.parametrize("n,cutoff", [(1, 30), (2, 10), (3, 6)])
def test_dirac_t_independent(n, cutoff):
    enum = enumerate_basis(n, cutoff)
    d1 = dirac_bergman(1.0, enum)
    d4 = dirac_bergman(4.0, enum)
    assert operator_norm(d1.interior_block() - d4.interior_block()).value <= 1e-10
    assert d1.hermiticity_residual() < 1e-14


@pytest.mark.parametrize("n", [1, 2])
def test_dirac_spectrum_symmetric(n):
    d = dirac_bergman(1.0, enumerate_basis(n, 8))
    ev = np.linalg.eigvalsh(d.matrix)
    assert np.allclose(np.sort(ev), np.sort(-ev), atol=1e-10)


def test_dirac_norm_growth_is_square_root():
    cuts = np.arange(20, 201, 10)
    norms = [operator_norm(dirac_bergman(1.0, enumerate_basis(1, int(c)))).value for c in cuts]
    slope = np.polyfit(np.log(cuts), np.log(norms), 1)[0]
    assert abs(slope - 0.5) <= 0.06


def test_spinor_lift_commutes_with_spinor_structure():
    enum = enumerate_basis(2, 5)
    z = toeplitz_monomial((1, 0), enum)
    lifted = spinor_lift(z, 2)
    assert lifted.blocks == 2
    assert np.allclose(lifted.matrix[: len(enum), : len(enum)], z.matrix)
    d = dirac_bergman(1.0, enum)
    # lifted operators share the block layout of D
    assert (d @ lifted).dim == d.dim
    assert interior_distance(spinor_lift(z, 2), lifted) == 0
