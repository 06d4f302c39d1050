"""Numerical Segal-Bargmann transform between L^2(R^n) and the Fock space.

(W_t f)(z) = (pi t)**(-n/4) * integral of exp((-z**2 + 2 sqrt2 x z - x**2)/2t) f(x) dx

The integral is done with Gauss-Hermite nodes for the weight exp(-x**2/t),
so Hermite functions (polynomial times exp(-x**2/2t)) are integrated
exactly up to the node budget. Taylor coefficients of the output are read off
by an FFT over the torus |z_j| = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite import hermgauss

from .bases import HermiteBasis, fock_constant, fock_norm_sq
from .multiindex import degree, enumerate_basis

Coefficients = Mapping[tuple[int, ...], complex]


class UnderResolved(ValueError):
    """Requested degree is beyond what the node table integrates exactly."""


@dataclass
class SBTransform:
    n: int
    t: float = 1.0
    nodes: int = 60
    torus_points: int = 16
    hermite: HermiteBasis = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.t <= 0:
            raise ValueError("t must be positive")
        y, w = hermgauss(self.nodes)
        self._x = math.sqrt(self.t) * y
        self._w = math.sqrt(self.t) * w
        self.hermite = HermiteBasis(self.n, self.t)

    @property
    def max_degree(self) -> int:
        """Largest degree allowed by the rule nodes >= 2 * degree + 10."""
        return (self.nodes - 10) // 2

    def _check_degree(self, k: int):
        if k > self.max_degree:
            raise UnderResolved(f"degree {k} needs at least {2 * k + 10} nodes, have {self.nodes}")
        if k >= self.torus_points:
            raise UnderResolved(f"degree {k} aliases on a {self.torus_points}-point torus")

    def _kernel_1d(self, z: np.ndarray) -> np.ndarray:
        # exp((-z^2 + 2 sqrt2 x z)/2t) on nodes, shape (len(z), nodes); the
        # exp(-x^2/t) part lives in the Gauss-Hermite weights
        z = np.asarray(z, dtype=complex)[..., None]
        return np.exp((-(z**2) + 2.0 * math.sqrt(2.0) * self._x * z) / (2.0 * self.t))

    def _forward_hermite_1d(self, k: int, z: np.ndarray) -> np.ndarray:
        p = self.hermite.poly(k)(self._x)
        # h_k = p g with g = exp(-x^2/2t); integrand = kernel * p * g * g^{-1}
        # times exp(-x^2/2t) from the transform itself, i.e. exp(-x^2/t) overall
        return (math.pi * self.t) ** -0.25 * (self._kernel_1d(z) @ (self._w * p))

    def forward(self, f: Coefficients | Callable, z) -> np.ndarray:
        """W_t f at points z of shape (..., n).

        ``f`` is either a mapping alpha -> Hermite coefficient or a vectorised
        callable on points of shape (..., n).
        """
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.n:
            raise ValueError(f"points must have trailing dimension {self.n}")
        if callable(f):
            return self._forward_callable(f, z)
        out = np.zeros(z.shape[:-1], dtype=complex)
        for alpha, c in f.items():
            if len(alpha) != self.n:
                raise ValueError(f"multi-index {alpha} has wrong length")
            self._check_degree(max(alpha))
            term = np.ones(z.shape[:-1], dtype=complex)
            for j, k in enumerate(alpha):
                term = term * self._forward_hermite_1d(k, z[..., j])
            out = out + c * term
        return out

    def _forward_callable(self, f: Callable, z: np.ndarray) -> np.ndarray:
        grids = np.meshgrid(*([self._x] * self.n), indexing="ij")
        pts = np.stack(grids, axis=-1)
        weights = np.ones(pts.shape[:-1])
        for j in range(self.n):
            shape = [1] * self.n
            shape[j] = -1
            weights = weights * self._w.reshape(shape)
        # undo exp(-x^2/t) in the weights, keep exp(-x^2/2t) from the kernel
        gauss = np.exp(np.sum(pts**2, axis=-1) / (2.0 * self.t))
        fx = np.asarray(f(pts)) * gauss * weights
        flat_pts = pts.reshape(-1, self.n)
        flat_f = fx.reshape(-1)
        zf = z.reshape(-1, self.n)
        expo = (-(zf**2) @ np.ones(self.n))[:, None] + 2.0 * math.sqrt(2.0) * zf @ flat_pts.T
        vals = np.exp(expo / (2.0 * self.t)) @ flat_f
        return ((math.pi * self.t) ** (-self.n / 4.0) * vals).reshape(z.shape[:-1])

    def taylor_coefficients(self, f: Coefficients | Callable, max_degree: int) -> dict[tuple[int, ...], complex]:
        """Coefficients c_beta of z**beta in W_t f for |beta| <= max_degree."""
        m = self.torus_points
        if max_degree >= m:
            raise UnderResolved(f"degree {max_degree} aliases on a {m}-point torus")
        roots = np.exp(2j * np.pi * np.arange(m) / m)
        grids = np.meshgrid(*([roots] * self.n), indexing="ij")
        z = np.stack(grids, axis=-1)
        vals = self.forward(f, z)
        spec = np.fft.fftn(vals) / m**self.n
        return {beta: complex(spec[beta]) for beta in enumerate_basis(self.n, max_degree)}

    def fock_coefficients(self, f: Coefficients | Callable, max_degree: int) -> dict[tuple[int, ...], complex]:
        """Coefficients of W_t f in the orthonormal basis u_beta."""
        taylor = self.taylor_coefficients(f, max_degree)
        return {beta: c / fock_constant(beta, self.t) for beta, c in taylor.items()}

    def inverse(self, F: Coefficients, x) -> np.ndarray:
        """W_t^{-1} of a finite expansion sum F_alpha u_alpha, evaluated at x."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for alpha, c in F.items():
            out = out + c * self.hermite.evaluate(alpha, x)
        return out

    def inverse_integral_n1(self, F: Coefficients, x: float, nodes: int = 80) -> complex:
        """Integral formula for W_t^{-1} at n = 1, by 2-D Gauss-Hermite over C.

        With z = u + i v the Gaussian part of the integrand is
        exp(-3u^2/2t - v^2/2t), times exp(i u v / t) exp(sqrt2 x (u - i v)/t).
        """
        if self.n != 1:
            raise ValueError("the 2-D spot check is only for n = 1")
        t = self.t
        y, w = hermgauss(nodes)
        u = math.sqrt(2.0 * t / 3.0) * y
        v = math.sqrt(2.0 * t) * y
        wu = math.sqrt(2.0 * t / 3.0) * w
        wv = math.sqrt(2.0 * t) * w
        uu, vv = np.meshgrid(u, v, indexing="ij")
        zz = uu + 1j * vv
        poly = sum(c * fock_constant(a, t) * zz ** a[0] for a, c in F.items())
        phase = np.exp(1j * uu * vv / t + math.sqrt(2.0) * x * np.conj(zz) / t - x * x / (2.0 * t))
        total = np.einsum("i,j,ij->", wu, wv, poly * phase)
        return complex((math.pi * t) ** -1.25 * total)


# --- checks -----------------------------------------------------------------


def _coef_vector(coeffs: Mapping, order) -> np.ndarray:
    return np.array([coeffs.get(b, 0.0) for b in order], dtype=complex)


def basis_mapping_errors(sb: SBTransform, max_degree: int) -> dict[tuple[int, ...], float]:
    """max |coefficient of W_t h_alpha - u_alpha| for each |alpha| <= max_degree."""
    order = list(enumerate_basis(sb.n, max_degree))
    errs = {}
    for alpha in order:
        got = _coef_vector(sb.fock_coefficients({alpha: 1.0}, max_degree), order)
        want = np.array([1.0 if b == alpha else 0.0 for b in order])
        errs[alpha] = float(np.max(np.abs(got - want)))
    return errs


def gram_matrix(sb: SBTransform, max_degree: int) -> np.ndarray:
    """Fock Gram matrix of {W_t h_alpha}, using <z^a, z^b> = t^|a| a! delta."""
    order = list(enumerate_basis(sb.n, max_degree))
    norms = np.array([fock_norm_sq(b, sb.t) for b in order])
    rows = np.array([_coef_vector(sb.taylor_coefficients({a: 1.0}, max_degree), order) for a in order])
    return (rows * norms) @ rows.conj().T


def gram_residual(sb: SBTransform, max_degree: int) -> float:
    g = gram_matrix(sb, max_degree)
    return float(np.max(np.abs(g - np.eye(g.shape[0]))))


@dataclass
class IntertwiningReport:
    t: float
    max_degree: int
    position: float
    derivative: float
    number: float
    raising: float

    @property
    def max_residual(self) -> float:
        return max(self.position, self.derivative, self.number, self.raising)


def _poly_gauss_callable(p: Polynomial, t: float):
    def f(pts):
        x = pts[..., 0]
        return p(x) * np.exp(-(x**2) / (2.0 * t))

    return f


def _apply_z(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    out[1:] = c[:-1]
    return out


def _apply_d(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    out[:-1] = c[1:] * np.arange(1, len(c))
    return out


def intertwining_check(t: float, max_degree: int, nodes: int | None = None) -> IntertwiningReport:
    """Verify the one-variable conjugation identities on Hermite functions.

    W x W^-1 = (z + t d/dz)/sqrt2, W d/dx W^-1 = (-z + t d/dz)/(t sqrt2),
    W rho(N) W^-1 = t (z d/dz + 1/2) and W A^* = z W, compared as Taylor
    coefficient arrays. rho(N) = (x^2 - t^2 d^2/dx^2)/2.
    """
    nodes = nodes or max(2 * (max_degree + 2) + 10, 40)
    sb = SBTransform(1, t, nodes=nodes, torus_points=max(16, max_degree + 4))
    hb = sb.hermite
    top = max_degree + 2
    x = Polynomial([0.0, 1.0])
    s2 = math.sqrt(2.0)

    def coeffs(p: Polynomial) -> np.ndarray:
        c = sb.taylor_coefficients(_poly_gauss_callable(p, t), top)
        return np.array([c[(k,)] for k in range(top + 1)])

    worst = {"position": 0.0, "derivative": 0.0, "number": 0.0, "raising": 0.0}
    for k in range(max_degree + 1):
        p = hb.poly(k)
        base = coeffs(p)
        pos = coeffs(x * p)
        der = coeffs(p.deriv() - x * p / t)
        num = coeffs((-(t**2) * p.deriv(2) + 2.0 * t * x * p.deriv() + t * p) / 2.0)
        rai = coeffs(hb.raise_poly(p))
        worst["position"] = max(worst["position"], np.max(np.abs(pos - (_apply_z(base) + t * _apply_d(base)) / s2)))
        worst["derivative"] = max(
            worst["derivative"], np.max(np.abs(der - (-_apply_z(base) + t * _apply_d(base)) / (t * s2)))
        )
        worst["number"] = max(worst["number"], np.max(np.abs(num - t * (k + 0.5) * base)))
        worst["raising"] = max(worst["raising"], np.max(np.abs(rai - _apply_z(base))))
    return IntertwiningReport(t, max_degree, **{k: float(v) for k, v in worst.items()})


def number_operator_check(t: float, n: int, max_degree: int) -> float:
    """Residual of nu_t(N) u_alpha = t(|alpha| + n/2) u_alpha via the transform.

    rho(N) h_alpha is formed per variable as a polynomial times Gaussian and
    pushed through W_t; the result is compared with the scaled u_alpha.
    """
    sb = SBTransform(n, t, nodes=max(2 * (max_degree + 2) + 10, 40), torus_points=max(16, max_degree + 4))
    hb = sb.hermite
    x = Polynomial([0.0, 1.0])
    worst = 0.0
    for alpha in enumerate_basis(n, max_degree):
        polys = [hb.poly(k) for k in alpha]
        npolys = [(-(t**2) * p.deriv(2) + 2.0 * t * x * p.deriv() + t * p) / 2.0 for p in polys]

        def f(pts, polys=polys, npolys=npolys):
            total = 0.0
            for j in range(n):
                term = np.ones(pts.shape[:-1])
                for i in range(n):
                    q = npolys[i] if i == j else polys[i]
                    term = term * q(pts[..., i])
                total = total + term
            return total * np.exp(-np.sum(pts**2, axis=-1) / (2.0 * t))

        got = sb.fock_coefficients(f, max_degree)
        target = t * (degree(alpha) + n / 2.0)
        for beta, c in got.items():
            want = target if beta == alpha else 0.0
            worst = max(worst, abs(c - want))
    return float(worst)
