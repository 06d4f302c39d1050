"""The weighted Bergman tower over the ball and its semiclassical limits.

Level m is A^2(B^n, r^m) with r = 1 - |z|^2. Radial Toeplitz operators are
diagonal on every level, so everything reduces to eigenvalue tables
eig[m, k] indexed by level and degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import sympy as sp

from .bases import RadialSymbol, RadialWeight
from .operators import radial_eigenvalues
from .spectral import SpectrumStream, disc_bundle_stream, spectral_dimension


def tower_eigenvalues(
    f: RadialSymbol,
    m_values: Sequence[float],
    kmax: int,
    n: int = 1,
    method: str = "auto",
    tol: float = 1e-12,
) -> np.ndarray:
    """Table eig[i, k] of T_f on level m_values[i] at degree k."""
    return np.array([radial_eigenvalues(f, n, kmax, RadialWeight(m), method, tol) for m in m_values])


def number_operator(m_values: Sequence[int], n: int) -> np.ndarray:
    """Diagonal of N = (+)_m (m + n + 1) pi_m."""
    return np.asarray(m_values, dtype=float) + n + 1


@dataclass
class SupNormReport:
    m_values: np.ndarray
    norms: np.ndarray
    sup_f: float
    tail_resolved: np.ndarray
    rate: float

    @property
    def contractive(self) -> bool:
        return bool(np.all(self.norms <= self.sup_f * (1 + 1e-12)))

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.norms - self.sup_f)


def sup_norm_limit(
    f: RadialSymbol,
    m_values: Sequence[int],
    kmax: int,
    n: int = 1,
    tail_tol: float = 0.05,
    method: str = "auto",
) -> SupNormReport:
    """||pi_m T_f pi_m|| per level.

    Eigenvalues tend to f(1) as k grows, so the norm is the larger of the
    finite-table maximum and |f(1)|. A level is flagged when its last table
    entry is still farther than ``tail_tol`` (relative to sup|f|) from f(1).
    """
    table = tower_eigenvalues(f, m_values, kmax, n, method)
    edge = abs(f.boundary_value())
    norms = np.maximum(np.max(np.abs(table), axis=1), edge)
    sup_f = f.sup_norm()
    resolved = np.abs(table[:, -1] - f.boundary_value()) <= tail_tol * max(sup_f, 1e-300)
    err = np.abs(norms - sup_f)
    ms = np.asarray(m_values, dtype=float)
    keep = err > 0
    rate = float(-np.polyfit(np.log(ms[keep] + 1), np.log(err[keep]), 1)[0]) if keep.sum() > 1 else float("inf")
    return SupNormReport(ms, norms, sup_f, resolved, rate)


@dataclass
class StarSeries:
    """Leading terms of T_f T_g - T_{fg} on each level."""

    m_values: np.ndarray
    kmax: int
    error_table: np.ndarray = field(repr=False)
    error_norms: np.ndarray
    decay_exponent: float
    c0_residual: float
    c1_table: np.ndarray = field(repr=False)

    @property
    def scaled_norms(self) -> np.ndarray:
        """m * ||E(m)||, the regression constant of the 1/m envelope."""
        return self.m_values * self.error_norms


def _richardson(ms: np.ndarray, values: np.ndarray) -> np.ndarray:
    # one step assuming a 1/m correction: eliminate it from the last two levels
    m1, m2 = ms[-2], ms[-1]
    return (m2 * values[-1] - m1 * values[-2]) / (m2 - m1)


def expansion_check(
    f: RadialSymbol,
    g: RadialSymbol,
    m_values: Sequence[int],
    kmax: int,
    n: int = 1,
    method: str = "auto",
) -> StarSeries:
    """E(m) = eigenvalues of T_f T_g - T_{fg} on level m for radial f, g.

    The norm over k includes the limit k -> infinity, where E tends to 0.
    The decay exponent is minus the log-log slope of ||E(m)|| against m.
    C_1 data is (m+n+1) E(m, k), extrapolated in m per degree.
    """
    if not (isinstance(f, RadialSymbol) and isinstance(g, RadialSymbol)):
        raise TypeError("expansion_check handles radial symbols only")
    ms = np.asarray(m_values, dtype=float)
    ef = tower_eigenvalues(f, m_values, kmax, n, method)
    eg = tower_eigenvalues(g, m_values, kmax, n, method)
    efg = tower_eigenvalues(f * g, m_values, kmax, n, method)
    err = ef * eg - efg
    norms = np.max(np.abs(err), axis=1)
    nz = norms > 0
    if nz.sum() > 1:
        exponent = float(-np.polyfit(np.log(ms[nz]), np.log(norms[nz]), 1)[0])
    else:
        exponent = float("inf")
    # C_0 = fg: the product table approaches the pointwise product at the level limit
    c0 = float(np.max(np.abs(ef[-1] * eg[-1] - efg[-1])))
    scaled = (ms + n + 1)[:, None] * err
    c1 = _richardson(ms, scaled) if len(ms) >= 2 else scaled[-1]
    return StarSeries(ms, kmax, err, norms, exponent, c0, c1)


def error_rr_closed_form(m: float, k: np.ndarray, n: int) -> np.ndarray:
    """E(m, k) for f = g = 1 - |z|^2: -(m+1)(n+k) / ((n+k+m+1)^2 (n+k+m+2))."""
    p = n + np.asarray(k, dtype=float)
    return -(m + 1) * p / ((p + m + 1) ** 2 * (p + m + 2))


# regression constant: m ||E(m)|| -> 4/27 for f = g = 1 - |z|^2, any n
RR_ENVELOPE_CONSTANT = 4.0 / 27.0


def metric_factor(n: int) -> tuple[sp.Expr, sp.Expr]:
    """(g, J) for r = 1 - |z|^2 computed symbolically.

    g = r^{n+1} det[d_j dbar_k (-log r)] and J = -det [[r, dbar r], [d r, d dbar r]]
    (the Monge-Ampere determinant). z and zbar are independent symbols.
    """
    z = sp.symbols(f"z1:{n + 1}")
    zb = sp.symbols(f"zb1:{n + 1}")
    r = 1 - sum(a * b for a, b in zip(z, zb))
    hess = sp.Matrix(n, n, lambda j, k: sp.diff(-sp.log(r), z[j], zb[k]))
    g = sp.simplify(r ** (n + 1) * hess.det())
    border = sp.Matrix(n + 1, n + 1, lambda i, j: 0)
    border[0, 0] = r
    for k in range(n):
        border[0, k + 1] = sp.diff(r, zb[k])
        border[k + 1, 0] = sp.diff(r, z[k])
        for j in range(n):
            border[k + 1, j + 1] = sp.diff(r, z[k], zb[j])
    jac = sp.simplify(-border.det())
    return g, jac


@dataclass
class BerezinTower:
    n: int
    m_values: Sequence[int]
    kmax: int

    def __post_init__(self):
        if any(m <= -1 for m in self.m_values):
            raise ValueError("level weights need m > -1")

    def weights(self) -> list[RadialWeight]:
        return [RadialWeight(m) for m in self.m_values]

    def number_operator(self) -> np.ndarray:
        return number_operator(self.m_values, self.n)

    def eigenvalues(self, f: RadialSymbol, method: str = "auto") -> np.ndarray:
        return tower_eigenvalues(f, self.m_values, self.kmax, self.n, method)

    def commutes_with_number(self, f: RadialSymbol) -> float:
        """Largest entry of [N, T_f] over the tower, block diagonal by level."""
        worst = 0.0
        for nval, row in zip(self.number_operator(), self.eigenvalues(f)):
            d = np.diag(row)
            worst = max(worst, float(np.max(np.abs(nval * d - d * nval))))
        return worst

    def disc_bundle_dimension(self, smax: int = 100_000) -> float:
        return spectral_dimension(disc_bundle_stream(self.n, smax))


def disc_bundle_spectrum(n: int, smax: int) -> SpectrumStream:
    return disc_bundle_stream(n, smax)
