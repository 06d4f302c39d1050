"""Gamma matrices and the Dirac-type operator on the Bergman basis.

Construction: start from the empty set in dimension 1. For even n = 2m take
the n-2 matrices of the previous even step tensored with sigma_1 and add
I (x) sigma_2, I (x) sigma_3. For odd n = 2m+1 append the chirality element
i**m Gamma_1 ... Gamma_2m. This gives

    n=1: [1]
    n=2: sigma_2, sigma_3
    n=3: sigma_2, sigma_3, -sigma_1

Tensor ordering for D is (spinor slow, basis fast): np.kron(Gamma_j, M).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bases import RadialWeight, UNWEIGHTED
from .multiindex import BasisEnumeration
from .operators import HeisenbergElement, TruncatedOperator, heisenberg_rep

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class CliffordRep:
    n: int
    gammas: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return self.gammas[0].shape[0]

    def anticommutator_residual(self) -> float:
        eye = np.eye(self.d)
        worst = 0.0
        for j, gj in enumerate(self.gammas):
            worst = max(worst, float(np.max(np.abs(gj - gj.conj().T))))
            for k, gk in enumerate(self.gammas):
                target = 2.0 * eye if j == k else 0.0 * eye
                worst = max(worst, float(np.max(np.abs(gj @ gk + gk @ gj - target))))
        return worst


def _even(m: int) -> list[np.ndarray]:
    if m == 0:
        return []
    prev = _even(m - 1)
    dim = 2 ** (m - 1)
    eye = np.eye(dim, dtype=complex)
    return [np.kron(g, SIGMA1) for g in prev] + [np.kron(eye, SIGMA2), np.kron(eye, SIGMA3)]


def gamma_matrices(n: int) -> CliffordRep:
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n // 2
    gammas = _even(m)
    if n % 2:
        chi = np.eye(2**m, dtype=complex)
        for g in gammas:
            chi = chi @ g
        gammas.append((1j**m) * chi)
    # entries are in {0, +-1, +-i}; round away the phase arithmetic noise
    gammas = [np.round(g.real) + 1j * np.round(g.imag) for g in gammas]
    return CliffordRep(n, tuple(gammas))


def dirac_bergman(
    t: float,
    enum: BasisEnumeration,
    weight: RadialWeight = UNWEIGHTED,
    clifford: CliffordRep | None = None,
) -> TruncatedOperator:
    """D = (t/2)**(-1/2) sum_j Gamma_j (x) tau_t(P_j) on basis (x) C^d."""
    if t <= 0:
        raise ValueError("t must be positive")
    cl = clifford or gamma_matrices(enum.n)
    mat = np.zeros((cl.d * len(enum),) * 2, dtype=complex)
    for j, g in enumerate(cl.gammas, start=1):
        p = heisenberg_rep(HeisenbergElement("P", j), t, enum, weight).matrix
        mat += np.kron(g, p)
    mat /= math.sqrt(t / 2.0)
    return TruncatedOperator(enum, mat, 1, enum.cutoff - 1, f"D[t={t}]", blocks=cl.d)


def spinor_lift(op: TruncatedOperator, d: int) -> TruncatedOperator:
    """I_d (x) op, for letting algebra elements act on spinor-valued vectors."""
    return TruncatedOperator(
        op.enum, np.kron(np.eye(d), op.matrix), op.shift, op.interior, f"I{d}x{op.tag}", d * op.blocks
    )
