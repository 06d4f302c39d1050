import numpy as np
import pytest

from toeplitz_triples.multiindex import enumerate_basis
from toeplitz_triples.operators import commutator, interior_distance, toeplitz_monomial
from toeplitz_triples.spectral import t_r_inverse_stream
from toeplitz_triples.triples import (
    TripleSpec,
    UnitarityError,
    bergman_tr_triple,
    bounded_d_control,
    build_doubled,
    commutator_boundedness,
    compact_resolvent_check,
    doubled_spectrum,
    doubled_sweep,
    exp_z1_coefficients,
    hardy_model_triple,
    heisenberg_dirac_triple,
    is_stabilizing,
    polar_unitary,
    raising_ladder_control,
    regularity_check,
    relative_variation,
    scalar_distance,
    t_r_inverse,
    unitarity_residual,
    verify_doubled,
)


def test_variation_helpers():
    assert relative_variation([1.0, 1.01, 1.0]) == pytest.approx(0.01 / 1.01)
    assert is_stabilizing([5.0, 1.0, 1.0, 1.01])
    assert not is_stabilizing([1.0, 2.0, 3.0])


@pytest.mark.parametrize("n", [1, 2])
def test_commutator_identity(n):
    # [T_r^{-1}, T_z1] = T_z1 exactly since T_z1 raises the degree by one
    enum = enumerate_basis(n, 12)
    z = toeplitz_monomial((1,) + (0,) * (n - 1), enum)
    c = commutator(t_r_inverse(enum), z)
    assert interior_distance(c, z) < 1e-13


def test_bergman_tr_sweep():
    rep = commutator_boundedness(bergman_tr_triple(1))
    norms = rep.norms["Re T_z1"]
    assert rep.passed
    assert norms[-1] < 2.0 and norms[-1] > 1.9
    reg = regularity_check(bergman_tr_triple(1), 2)
    assert reg[1].passed and reg[2].passed


@pytest.mark.parametrize("n,cutoffs", [(1, tuple(range(10, 61, 5))), (2, (20, 30, 40, 50, 60))])
def test_hardy_model(n, cutoffs):
    rep = commutator_boundedness(hardy_model_triple(n, cutoffs))
    assert rep.passed
    assert rep.norms["Re T_z1"][-1] < 4.0


def test_ladder_control_is_flagged():
    rep = commutator_boundedness(raising_ladder_control())
    assert not rep.passed
    vals = rep.norms["tau(a1+)"]
    assert vals[-1] > vals[0] * 1.5


def test_heisenberg_dirac_commutators_bounded():
    rep = commutator_boundedness(heisenberg_dirac_triple(1, 1.0, (20, 40, 60, 80)))
    assert rep.passed


def test_resolvent_checks():
    assert compact_resolvent_check(bergman_tr_triple(1)).verdict == "pass"
    assert compact_resolvent_check(bounded_d_control()).verdict == "fails"


def test_spec_validation():
    with pytest.raises(ValueError):
        TripleSpec("x", lambda c: None, {}, (10, 20, 30))
    with pytest.raises(ValueError):
        TripleSpec("x", lambda c: None, {}, (10, 30, 20, 40))


@pytest.mark.parametrize("n", [1, 2])
def test_polar_unitary(n):
    cutoff = 30 if n == 1 else 12
    enum = enumerate_basis(n, cutoff)
    u = polar_unitary(exp_z1_coefficients(n, cutoff), enum)
    assert unitarity_residual(u) <= 1e-10
    assert scalar_distance(u) > 0.1


def test_polar_unitary_rejects_degenerate():
    enum = enumerate_basis(1, 5)
    with pytest.raises((UnitarityError, ValueError, ZeroDivisionError)):
        polar_unitary({(1,): 1.0}, enum)


def test_doubled_structure():
    enum = enumerate_basis(1, 30)
    u = polar_unitary(exp_z1_coefficients(1, 30), enum)
    dt = build_doubled(t_r_inverse(enum), u)
    rep = verify_doubled(dt, t_r_inverse_stream(1, 100_000))
    assert rep.passed
    assert rep.block_spectra <= 1e-8
    spec = doubled_spectrum(dt)
    # every |eigenvalue| of D appears twice, with both signs
    assert spec.total == 2 * len(enum)
    assert np.allclose(np.sort(np.abs(spec.expanded()))[::2], np.arange(len(enum)) + 2)


def test_doubled_commutators():
    assert commutator_boundedness(doubled_sweep(1, (30, 40, 50, 60))).passed
