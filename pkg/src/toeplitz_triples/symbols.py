"""Principal symbols of generalized Toeplitz operators on the unit sphere.

A symbol lives on the half-line bundle spanned by the contact form eta and
is stored as (order q, coefficient c(x')), meaning c(x') * ||xi'||**q. Only
the sphere with r = 1 - |z|^2 is supported, so every geometric constant is
fixed (see ``SPHERE``). Boundary points are complex vectors x' in C^n with
|x'| = 1, passed as arrays of shape (..., n).

Normal derivatives are taken along the inward normal, where d_n r = 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
import sympy as sp

from .bases import RadialWeight, UNWEIGHTED

Coefficient = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SphereContext:
    """Geometric constants of the unit sphere for r = 1 - |z|^2."""

    eta_norm: float = 1.0
    dr_norm: float = math.sqrt(2.0)
    normal_derivative_r: float = 2.0
    minus_R_r: float = 1.0

    @staticmethod
    def d_r(x: np.ndarray) -> np.ndarray:
        """d_k r at x' is -conj(x'_k)."""
        return -np.conj(x)

    @staticmethod
    def eta(x: np.ndarray) -> np.ndarray:
        """Complex components of eta = Im(-d r): eta_k = -i conj(x'_k)."""
        return -1j * np.conj(x)


SPHERE = SphereContext()


def sphere_samples(n: int, count: int = 256, seed: int = 0) -> np.ndarray:
    """Deterministic points on S^{2n-1} in C^n."""
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(count, 2 * n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts[:, :n] + 1j * pts[:, n:]


def _const(c: complex) -> Coefficient:
    def coeff(x):
        x = np.asarray(x)
        return np.full(x.shape[:-1], c, dtype=complex)

    coeff.constant = c
    return coeff


class NonEllipticError(ValueError):
    pass


@dataclass(frozen=True)
class GtoSymbol:
    order: float
    coeff: Coefficient
    label: str = ""

    @classmethod
    def constant(cls, order: float, c: complex, label: str = "") -> "GtoSymbol":
        return cls(float(order), _const(c), label or f"{c}|xi|^{order}")

    @property
    def constant_value(self) -> complex | None:
        return getattr(self.coeff, "constant", None)

    def __call__(self, x: np.ndarray, xi_norm=1.0) -> np.ndarray:
        return np.asarray(self.coeff(x)) * np.asarray(xi_norm, dtype=float) ** self.order

    def min_modulus(self, n: int, count: int = 256) -> float:
        return float(np.min(np.abs(self.coeff(sphere_samples(n, count)))))

    def is_elliptic(self, n: int, tol: float = 1e-12, count: int = 256) -> bool:
        return self.min_modulus(n, count) > tol


IDENTITY = GtoSymbol.constant(0.0, 1.0, "1")


def mul(a: GtoSymbol, b: GtoSymbol) -> GtoSymbol:
    """Symbol of a composition: orders add, coefficients multiply."""
    ca, cb = a.constant_value, b.constant_value
    if ca is not None and cb is not None:
        return GtoSymbol.constant(a.order + b.order, ca * cb, f"({a.label})({b.label})")
    fa, fb = a.coeff, b.coeff
    return GtoSymbol(a.order + b.order, lambda x: fa(x) * fb(x), f"({a.label})({b.label})")


def power(a: GtoSymbol, k: int) -> GtoSymbol:
    out = IDENTITY
    for _ in range(k):
        out = mul(out, a)
    return out


def parametrix(a: GtoSymbol, n: int = 2, tol: float = 1e-12) -> GtoSymbol:
    """Symbol of a parametrix: order negated, coefficient inverted."""
    c = a.constant_value
    if c is not None:
        if abs(c) <= tol:
            raise NonEllipticError("constant coefficient vanishes")
        return GtoSymbol.constant(-a.order, 1.0 / c, f"({a.label})^-1")
    if not a.is_elliptic(n, tol):
        raise NonEllipticError(f"coefficient of {a.label or 'symbol'} vanishes on the sample grid")
    f = a.coeff
    return GtoSymbol(-a.order, lambda x: 1.0 / f(x), f"({a.label})^-1")


# --- explicit formulas -------------------------------------------------------


def _g_boundary(weight: RadialWeight) -> float:
    return float(weight.gfun(np.array([1.0]))[0])


def lambda_symbol(weight: RadialWeight = UNWEIGHTED) -> GtoSymbol:
    """sigma(Lambda_w) = Gamma(m+1)/2 * g(x') * ||eta||^m, order -(m+1)."""
    m = weight.m
    c = 0.5 * math.gamma(m + 1) * _g_boundary(weight) * SPHERE.eta_norm**m
    return GtoSymbol.constant(-(m + 1), c, f"Lambda_w(m={m})")


def lambda_symbol_from_normal_derivative(m: int) -> sp.Expr:
    """2^{-(m+1)} (d_n^m w)(x') for w = r^m, evaluated exactly with sympy.

    On the sphere the inward normal derivative is -d/d rho at rho = 1.
    """
    if m < 0 or int(m) != m:
        raise ValueError("this form needs a nonnegative integer exponent")
    rho = sp.symbols("rho", positive=True)
    w = (1 - rho**2) ** m
    deriv = sp.diff(w, rho, m) * (-1) ** m if m > 0 else w
    return sp.nsimplify(sp.Rational(1, 2 ** (m + 1)) * deriv.subs(rho, 1))


def lambda_P_symbol(
    weight: RadialWeight,
    terms: Mapping[tuple[int, ...], Callable[[np.ndarray], np.ndarray] | complex],
    j: float = 0.0,
) -> GtoSymbol:
    """Symbol of T_{Lambda_{wP}} for P = sum_{|nu| = d} a_nu r^j d^nu (top order part).

    (-1)^d Gamma(m+1+j)/2 * g * ||eta||^{m+j-d} * sum a_nu prod (d_k r)^{nu_k},
    order d - (m+1+j), with d_k r = -conj(x'_k).
    """
    if not terms:
        raise ValueError("need at least one coefficient")
    degrees = {sum(nu) for nu in terms}
    if len(degrees) != 1:
        raise ValueError("all top-order multi-indices must share one degree")
    d = degrees.pop()
    m = weight.m
    pref = (-1) ** d * math.gamma(m + 1 + j) / 2.0 * _g_boundary(weight) * SPHERE.eta_norm ** (m + j - d)
    items = [(nu, a if callable(a) else _const(a)) for nu, a in terms.items()]

    def coeff(x):
        x = np.asarray(x, dtype=complex)
        dr = SPHERE.d_r(x)
        total = np.zeros(x.shape[:-1], dtype=complex)
        for nu, a in items:
            prod = np.ones(x.shape[:-1], dtype=complex)
            for k, e in enumerate(nu):
                prod = prod * dr[..., k] ** e
            total = total + np.asarray(a(x)) * prod
        return pref * total

    return GtoSymbol(d - (m + 1 + j), coeff, f"Lambda_wP(d={d}, m={m}, j={j})")


def normal_derivative_symbol(n: int) -> GtoSymbol:
    """Symbol of gamma T_P K for P = sum conj(d_k r) d_k with w = 1.

    P = -sum z_k d_k, so T_P = -R. The symbol is sigma(Lambda)^{-1} times
    sigma(T_{Lambda_P}).
    """
    terms = {}
    for k in range(n):
        nu = tuple(1 if i == k else 0 for i in range(n))
        terms[nu] = (lambda x, k=k: -np.asarray(x)[..., k])
    lp = lambda_P_symbol(UNWEIGHTED, terms)
    return mul(parametrix(lambda_symbol(UNWEIGHTED), n), lp)


def dirac_component_symbol(j: int, t: float, n: int) -> GtoSymbol:
    """sigma(gamma tau_t(P_j) K) on the cone: order 1/2.

    2^{3/4} (t/2)^{1/2} (||eta|| / (-R(r)))^{1/2} xi'_j / ||xi'||^{1/2}; on the
    cone xi' = s eta, so the coefficient is 2^{3/4} (t/2)^{1/2} eta_j(x').
    """
    if not 1 <= j <= n:
        raise ValueError(f"index j={j} outside 1..{n}")
    if t <= 0:
        raise ValueError("t must be positive")
    pref = 2.0**0.75 * math.sqrt(t / 2.0) * math.sqrt(SPHERE.eta_norm / SPHERE.minus_R_r)

    def coeff(x):
        return pref * SPHERE.eta(np.asarray(x, dtype=complex))[..., j - 1]

    return GtoSymbol(0.5, coeff, f"tauP_{j}")


def dirac_square_symbol(t: float, n: int) -> GtoSymbol:
    """sum_j |sigma_j|^2 as a symbol of order 1."""
    comps = [dirac_component_symbol(j, t, n) for j in range(1, n + 1)]

    def coeff(x):
        return sum(np.abs(c.coeff(x)) ** 2 for c in comps)

    return GtoSymbol(1.0, coeff, "sum|tauP|^2")


def psi_Tf_symbol(j: int, dn_f: Callable[[np.ndarray], np.ndarray] | complex, m_w: float = 0.0) -> GtoSymbol:
    """Gamma(m+j+1)/Gamma(m+1) * 2^{-j}/j! * d_n^j f(x'), order -j."""
    if j < 0:
        raise ValueError("vanishing order must be >= 0")
    pref = math.gamma(m_w + j + 1) / math.gamma(m_w + 1) * 2.0**-j / math.factorial(j)
    if callable(dn_f):
        return GtoSymbol(-j, lambda x: pref * np.asarray(dn_f(x)), f"psi(T_f), j={j}")
    return GtoSymbol.constant(-j, pref * dn_f, f"psi(T_f), j={j}")


def psi_T_r_symbol(m_w: float = 0.0) -> GtoSymbol:
    """psi(T_r) for r = 1 - |z|^2: j = 1 and d_n r = 2."""
    return psi_Tf_symbol(1, SPHERE.normal_derivative_r, m_w)


# --- property suite ----------------------------------------------------------


@dataclass
class PropertyReport:
    trials: int
    failures: dict[str, int]

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def random_symbol(rng: np.random.Generator, n: int) -> GtoSymbol:
    """Elliptic symbol c(x) = a + sum_k b_k x_k with |a| > sum |b_k|."""
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    a = (np.sum(np.abs(b)) + rng.uniform(0.1, 2.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    order = float(rng.choice([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]))
    return GtoSymbol(order, lambda x, a=a, b=b: a + np.asarray(x) @ b, "random")


def symbol_property_suite(trials: int = 100, n: int = 2, seed: int = 0, tol: float = 1e-12) -> PropertyReport:
    """Order additivity, multiplicativity, parametrix identity, ellipticity."""
    rng = np.random.default_rng(seed)
    pts = sphere_samples(n, 64, seed + 1)
    xi = rng.uniform(0.5, 5.0, size=64)
    fails = {"order": 0, "multiplicative": 0, "parametrix": 0, "ellipticity": 0}
    for _ in range(trials):
        a, b = random_symbol(rng, n), random_symbol(rng, n)
        ab = mul(a, b)
        if ab.order != a.order + b.order:
            fails["order"] += 1
        lhs, rhs = ab(pts, xi), a(pts, xi) * b(pts, xi)
        if np.max(np.abs(lhs - rhs)) > tol * max(1.0, np.max(np.abs(rhs))):
            fails["multiplicative"] += 1
        q = parametrix(a, n)
        ident = mul(a, q)
        if ident.order != 0 or np.max(np.abs(ident(pts) - 1.0)) > tol:
            fails["parametrix"] += 1
        if not (ab.is_elliptic(n) and q.is_elliptic(n)):
            fails["ellipticity"] += 1
    return PropertyReport(trials, fails)
