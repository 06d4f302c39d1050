"""Normalisation constants, radial quadrature and Hermite functions.

Conventions
-----------
* The defining function is r(rho) = 1 - rho**2 throughout.
* A radial weight is w = r**m * g with m > -1 and g > 0 on [0, 1].
* Bergman basis: v_alpha = b_alpha z**alpha, orthonormal in L^2(B^n, w dmu).
* Fock basis: u_alpha = a_alpha z**alpha, a_alpha = (t**|alpha| alpha!)**(-1/2).
* Hermite functions are stored as polynomial * exp(-x**2 / 2t) per variable.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from .multiindex import degree, multi_factorial


class QuadratureError(RuntimeError):
    """Adaptive quadrature ran out of budget; carries the best estimate."""

    def __init__(self, message: str, value: float, error: float):
        super().__init__(f"{message} (value={value!r}, error estimate={error:.3g})")
        self.value = value
        self.error = error


_G10 = leggauss(10)
_G20 = leggauss(20)


def _panel(f, a, b):
    half, mid = 0.5 * (b - a), 0.5 * (a + b)
    lo = half * np.dot(_G10[1], f(mid + half * _G10[0]))
    hi = half * np.dot(_G20[1], f(mid + half * _G20[0]))
    return hi, abs(hi - lo)


def quadrature_radial(
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-12,
    a: float = 0.0,
    b: float = 1.0,
    atol: float = 1e-300,
    max_panels: int = 4000,
) -> float:
    """Adaptive Gauss-Legendre integral of a vectorised f over [a, b].

    Each panel is integrated with 10 and 20 nodes and the difference is the
    error estimate. The worst panel is bisected until the summed estimate is
    below max(tol * |I|, atol). ``tol`` is relative.
    """
    if tol < 1e-14:
        raise ValueError("tolerance below 1e-14 is not reachable in double precision")
    value, err = _panel(f, a, b)
    heap = [(-err, a, b, value)]
    total, total_err = value, err
    panels = 1
    while total_err > max(tol * abs(total), atol):
        if panels >= max_panels:
            raise QuadratureError("panel budget exhausted", total, total_err)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        panels += 1
        if panels % 64 == 0:
            # re-sum to shed accumulated rounding in the running totals
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
    return float(total)


# --- weights and radial symbols ----------------------------------------------


def _one(rho):
    return np.ones_like(np.asarray(rho, dtype=float))


@dataclass(frozen=True)
class RadialWeight:
    """w(rho) = (1 - rho**2)**m * g(rho)."""

    m: float = 0.0
    g: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if isinstance(self.m, complex):
            raise TypeError("only real weight exponents are supported")
        if not self.m > -1:
            raise ValueError(f"weight exponent must exceed -1, got {self.m}")
        if self.g is not None:
            grid = np.linspace(0.0, 1.0, 65)
            if np.any(np.asarray(self.g(grid)) <= 0):
                raise ValueError("weight factor g must be positive on [0, 1]")

    @property
    def is_pure_power(self) -> bool:
        return self.g is None

    def gfun(self, rho):
        return _one(rho) if self.g is None else np.asarray(self.g(rho), dtype=float)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return (1.0 - rho * rho) ** self.m * self.gfun(rho)


UNWEIGHTED = RadialWeight(0.0)


@dataclass(frozen=True)
class RadialSymbol:
    """A bounded radial function f(rho) on the closed ball.

    When ``r_poly`` is given, f = sum_p r_poly[p] * (1 - rho**2)**p and the
    Beta-ratio closed forms apply.
    """

    func: Callable[[np.ndarray], np.ndarray]
    r_poly: tuple[float, ...] | None = None
    label: str = ""

    @classmethod
    def from_r_polynomial(cls, coeffs: Sequence[float], label: str = "") -> "RadialSymbol":
        coeffs = tuple(float(c) for c in coeffs)
        poly = Polynomial(coeffs)

        def func(rho):
            return poly(1.0 - np.asarray(rho, dtype=float) ** 2)

        return cls(func=func, r_poly=coeffs, label=label or f"r-poly{coeffs}")

    @classmethod
    def constant(cls, c: float) -> "RadialSymbol":
        return cls.from_r_polynomial([c], label=f"const({c})")

    def __call__(self, rho):
        return np.asarray(self.func(np.asarray(rho, dtype=float)), dtype=float)

    def __mul__(self, other: "RadialSymbol") -> "RadialSymbol":
        if self.r_poly is not None and other.r_poly is not None:
            prod = (Polynomial(self.r_poly) * Polynomial(other.r_poly)).coef
            return RadialSymbol.from_r_polynomial(prod, label=f"({self.label})*({other.label})")
        f, g = self.func, other.func
        return RadialSymbol(lambda rho: f(rho) * g(rho), label=f"({self.label})*({other.label})")

    def boundary_value(self) -> float:
        return float(self(np.array([1.0]))[0])

    def sup_norm(self, samples: int = 2001) -> float:
        return float(np.max(np.abs(self(np.linspace(0.0, 1.0, samples)))))


R_SYMBOL = RadialSymbol.from_r_polynomial([0.0, 1.0], label="1-|z|^2")
ABS2_SYMBOL = RadialSymbol.from_r_polynomial([1.0, -1.0], label="|z|^2")


# --- radial moments ---------------------------------------------------------


def radial_moment(p: int, weight: RadialWeight = UNWEIGHTED, f=None, tol: float = 1e-12) -> float:
    """Integral over [0, 1] of rho**(2p-1) * f(rho) * w(rho) d rho, for p >= 1.

    For m < 0 the endpoint singularity is removed by s = rho**2 followed by
    u = (1 - s)**(m + 1), which turns the integrand into a bounded function.
    """
    if p < 1:
        raise ValueError("radial moments need p >= 1")
    fa = (lambda rho: _one(rho)) if f is None else f
    m = weight.m
    if m >= 0:
        def integrand(rho):
            return rho ** (2 * p - 1) * fa(rho) * weight(rho)

        return quadrature_radial(integrand, tol)
    e = 1.0 / (m + 1.0)

    def integrand_u(u):
        s = 1.0 - u**e
        rho = np.sqrt(np.clip(s, 0.0, 1.0))
        return s ** (p - 1) * fa(rho) * weight.gfun(rho)

    return quadrature_radial(integrand_u, tol) * 0.5 * e


def beta_moment(p: int, m: float) -> float:
    """Closed form of the moment for w = r**m, f = 1: B(p, m + 1) / 2."""
    return 0.5 * math.exp(math.lgamma(p) + math.lgamma(m + 1) - math.lgamma(p + m + 1))


@lru_cache(maxsize=None)
def ball_volume(n: int) -> float:
    """Lebesgue volume of B^n in C^n, by quadrature of the polar form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    sphere = 2.0 * math.pi**n / math.factorial(n - 1)
    return sphere * radial_moment(n)


def contact_volume(n: int) -> float:
    """Integral of eta ^ (d eta)^(n-1) over the unit sphere.

    By Stokes this equals 2**n n! times the ball volume, i.e. (2 pi)**n.
    """
    return 2.0**n * math.factorial(n) * ball_volume(n)


def monomial_norm_sq(alpha: Sequence[int], weight: RadialWeight = UNWEIGHTED, tol: float = 1e-12) -> float:
    """Integral of |z**alpha|**2 w over the ball, by polar reduction."""
    n = len(alpha)
    k = degree(alpha)
    prefactor = 2.0 * math.pi**n * multi_factorial(alpha) / math.factorial(k + n - 1)
    return prefactor * radial_moment(k + n, weight, tol=tol)


def bergman_constant(alpha: Sequence[int], weight: RadialWeight = UNWEIGHTED, tol: float = 1e-12) -> float:
    """b_alpha = (integral of |z**alpha|**2 w)**(-1/2) by quadrature."""
    n = len(alpha)
    k = degree(alpha)
    log_pref = (
        math.log(2.0) + n * math.log(math.pi) + math.log(multi_factorial(alpha)) - math.lgamma(k + n)
    )
    moment = radial_moment(k + n, weight, tol=tol)
    return math.exp(-0.5 * (log_pref + math.log(moment)))


def bergman_constant_closed(alpha: Sequence[int]) -> float:
    """Closed form for w = 1: ((|alpha|+n)! / (n! alpha! mu(B^n)))**(1/2)."""
    n = len(alpha)
    k = degree(alpha)
    log_val = math.lgamma(k + n + 1) - math.lgamma(n + 1) - math.log(multi_factorial(alpha))
    return math.exp(0.5 * log_val) / math.sqrt(ball_volume(n))


def fock_constant(alpha: Sequence[int], t: float) -> float:
    """a_alpha = (t**|alpha| alpha!)**(-1/2)."""
    if t <= 0:
        raise ValueError("t must be positive")
    return 1.0 / math.sqrt(t ** degree(alpha) * multi_factorial(alpha))


def fock_norm_sq(alpha: Sequence[int], t: float) -> float:
    """<z**alpha, z**alpha> in the Fock space: t**|alpha| alpha!."""
    return t ** degree(alpha) * multi_factorial(alpha)


# --- Hermite functions ------------------------------------------------------


class HermiteBasis:
    """Hermite functions h_alpha on R^n built with the raising operator.

    One variable: h_k = p_k(x) exp(-x**2 / 2t), with
    p_{k+1} = (t (k+1))**(-1/2) * (2 x p_k - t p_k') / sqrt(2).
    """

    def __init__(self, n: int, t: float = 1.0):
        if n < 1:
            raise ValueError("n must be >= 1")
        if t <= 0:
            raise ValueError("t must be positive")
        self.n = n
        self.t = float(t)
        self._polys: list[Polynomial] = [Polynomial([(math.pi * self.t) ** -0.25])]

    def poly(self, k: int) -> Polynomial:
        """p_k, the polynomial factor of the one-variable h_k."""
        x = Polynomial([0.0, 1.0])
        while len(self._polys) <= k:
            j = len(self._polys) - 1
            p = self._polys[j]
            raised = (2.0 * x * p - self.t * p.deriv()) / math.sqrt(2.0)
            self._polys.append(raised / math.sqrt(self.t * (j + 1)))
        return self._polys[k]

    def gaussian(self, x):
        return np.exp(-np.asarray(x, dtype=float) ** 2 / (2.0 * self.t))

    def eval_1d(self, k: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.poly(k)(x) * self.gaussian(x)

    def evaluate(self, alpha: Sequence[int], x) -> np.ndarray:
        """h_alpha at points x of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"points must have trailing dimension {self.n}")
        out = np.ones(x.shape[:-1])
        for j, k in enumerate(alpha):
            out = out * self.eval_1d(k, x[..., j])
        return out

    def raise_poly(self, p: Polynomial) -> Polynomial:
        """Polynomial part of A* (p g), A* = (x - t d/dx) / sqrt(2)."""
        x = Polynomial([0.0, 1.0])
        return (2.0 * x * p - self.t * p.deriv()) / math.sqrt(2.0)

    def lower_poly(self, p: Polynomial) -> Polynomial:
        """Polynomial part of A (p g), A = (x + t d/dx) / sqrt(2)."""
        return self.t * p.deriv() / math.sqrt(2.0)

    def inner(self, alpha: Sequence[int], beta: Sequence[int], nodes: int = 40) -> float:
        """L^2 inner product by Gauss-Hermite quadrature with weight exp(-x**2/t)."""
        y, w = hermgauss(nodes)
        x = math.sqrt(self.t) * y
        total = 1.0
        for a, b in zip(alpha, beta):
            total *= math.sqrt(self.t) * float(np.dot(w, self.poly(a)(x) * self.poly(b)(x)))
        return total


def hermite_eval(alpha: Sequence[int], t: float, x) -> np.ndarray:
    return HermiteBasis(len(alpha), t).evaluate(alpha, x)
