"""Truncated operators on degree-graded bases and their constructors.

A ``TruncatedOperator`` is a dense complex matrix over the basis
{v_alpha : |alpha| <= cutoff}, possibly tensored with a small auxiliary
factor (spinors, doubling) placed as the slow index. Two integers travel with
the matrix:

* ``shift``: entries vanish when the row and column degrees differ by more;
* ``interior``: columns of degree <= interior are exact images of the
  untruncated operator.

Arithmetic propagates both, so norms and spectra can always be taken on the
block where truncation has no effect.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .bases import RadialSymbol, RadialWeight, UNWEIGHTED, radial_moment
from .multiindex import (
    BasisEnumeration,
    degree,
    derivative_coefficient,
    monomial_coefficient,
    unit,
)


class EnumerationMismatch(ValueError):
    pass


_SPARSE_MIN_DIM = 256


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # ladder-type matrices are banded; route large sparse factors through CSR
    if a.shape[0] >= _SPARSE_MIN_DIM:
        if np.count_nonzero(a) < 0.05 * a.size:
            return np.asarray(sparse.csr_matrix(a) @ b)
        if np.count_nonzero(b) < 0.05 * b.size:
            return np.asarray((sparse.csr_matrix(b.T) @ a.T).T)
    return a @ b


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    enum: BasisEnumeration
    matrix: np.ndarray = field(repr=False)
    shift: int
    interior: int | None = None
    tag: str = ""
    blocks: int = 1

    def __post_init__(self):
        dim = self.blocks * len(self.enum)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis size {dim}")
        if self.interior is None:
            object.__setattr__(self, "interior", self.enum.cutoff - self.shift)
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    @property
    def cutoff(self) -> int:
        return self.enum.cutoff

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return np.tile(self.enum.degrees, self.blocks)

    def interior_mask(self, level: int | None = None) -> np.ndarray:
        level = self.interior if level is None else level
        return self.degrees <= level

    def interior_block(self, level: int | None = None) -> np.ndarray:
        mask = self.interior_mask(level)
        return self.matrix[np.ix_(mask, mask)]

    def _check(self, other: "TruncatedOperator"):
        if other.enum.n != self.enum.n or other.enum.cutoff != self.enum.cutoff:
            raise EnumerationMismatch(
                f"bases differ: (n={self.enum.n}, cutoff={self.cutoff}) vs (n={other.enum.n}, cutoff={other.cutoff})"
            )
        if other.blocks != self.blocks:
            raise EnumerationMismatch(f"block counts differ: {self.blocks} vs {other.blocks}")

    def _like(self, matrix, shift, interior, tag):
        return TruncatedOperator(self.enum, matrix, shift, interior, tag, self.blocks)

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return self._like(
            self.matrix + other.matrix,
            max(self.shift, other.shift),
            min(self.interior, other.interior),
            f"({self.tag}+{other.tag})",
        )

    def __neg__(self):
        return self._like(-self.matrix, self.shift, self.interior, f"-{self.tag}")

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return self + (-other)

    def scale(self, c: complex) -> "TruncatedOperator":
        return self._like(c * self.matrix, self.shift, self.interior, f"{c}*{self.tag}")

    __rmul__ = scale

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        lam = self.cutoff
        if self.interior >= lam:
            interior = other.interior
        else:
            interior = min(other.interior, self.interior - other.shift)
        return self._like(
            _product(self.matrix, other.matrix),
            min(self.shift + other.shift, lam),
            interior,
            f"{self.tag}{other.tag}",
        )

    def adjoint(self) -> "TruncatedOperator":
        return self._like(
            self.matrix.conj().T,
            self.shift,
            min(self.interior, self.cutoff - self.shift),
            f"{self.tag}^*",
        )

    @property
    def H(self) -> "TruncatedOperator":
        return self.adjoint()

    def hermiticity_residual(self) -> float:
        block = self.interior_block()
        if block.size == 0:
            return 0.0
        return float(np.max(np.abs(block - block.conj().T)))

    def band_violation(self) -> float:
        """Largest entry outside the declared degree band."""
        deg = self.degrees
        outside = np.abs(deg[:, None] - deg[None, :]) > self.shift
        return float(np.max(np.abs(self.matrix[outside]), initial=0.0))

    def retag(self, tag: str) -> "TruncatedOperator":
        return self._like(self.matrix, self.shift, self.interior, tag)

    def with_interior(self, interior: int, tag: str | None = None) -> "TruncatedOperator":
        return self._like(self.matrix, self.shift, interior, self.tag if tag is None else tag)


def commutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    return (a @ b - b @ a).retag(f"[{a.tag},{b.tag}]")


def interior_distance(a: TruncatedOperator, b: TruncatedOperator) -> float:
    """Largest entry of a - b on their common interior block."""
    a._check(b)
    level = min(a.interior, b.interior)
    diff = a.interior_block(level) - b.interior_block(level)
    return float(np.max(np.abs(diff), initial=0.0))


@dataclass
class NormResult:
    value: float
    converged: bool
    iterations: int

    def __float__(self):
        return self.value


def operator_norm(
    op: TruncatedOperator | np.ndarray,
    restrict_to_interior: bool = True,
    rtol: float = 1e-10,
    max_iter: int = 10_000,
) -> NormResult:
    """Largest singular value by power iteration on A^* A."""
    if isinstance(op, TruncatedOperator):
        a = op.interior_block() if restrict_to_interior else op.matrix
    else:
        a = np.asarray(op)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("operator_norm needs a square matrix")
    if a.size == 0 or not np.any(a):
        return NormResult(0.0, True, 0)
    ah = a.conj().T
    # deterministic start vector with components in every direction
    x = 1.0 + 0.1 * np.cos(np.arange(a.shape[0]) * 1.618)
    x = x / np.linalg.norm(x)
    est = 0.0
    for it in range(1, max_iter + 1):
        y = ah @ (a @ x)
        new = float(np.real(np.vdot(x, y)))
        ny = np.linalg.norm(y)
        if ny == 0:
            return NormResult(0.0, True, it)
        # the Rayleigh quotient error is quadratic in the residual, so a
        # residual of sqrt(rtol) already pins the eigenvalue to ~rtol
        resid = np.linalg.norm(y - new * x)
        x = y / ny
        if resid <= math.sqrt(rtol) * new or (it > 1 and abs(new - est) <= 1e-3 * rtol * new):
            return NormResult(math.sqrt(max(new, 0.0)), True, it)
        est = new
    return NormResult(math.sqrt(max(est, 0.0)), False, max_iter)


# --- constructors -----------------------------------------------------------


def identity(enum: BasisEnumeration, blocks: int = 1) -> TruncatedOperator:
    return TruncatedOperator(enum, np.eye(blocks * len(enum)), 0, enum.cutoff, "I", blocks)


def diagonal(enum: BasisEnumeration, values_by_degree, tag: str = "diag") -> TruncatedOperator:
    """Degree-diagonal operator with eigenvalue values_by_degree[k] on degree k."""
    vals = np.asarray(values_by_degree)
    return TruncatedOperator(enum, np.diag(vals[enum.degrees]), 0, enum.cutoff, tag)


def toeplitz_monomial(alpha: Sequence[int], enum: BasisEnumeration) -> TruncatedOperator:
    """T_{z^alpha} on the unweighted Bergman space of the ball."""
    alpha = tuple(alpha)
    n, lam = enum.n, enum.cutoff
    a = degree(alpha)
    mat = np.zeros((len(enum), len(enum)))
    for col, beta in enumerate(enum):
        if sum(beta) + a > lam:
            continue
        row = enum.index(tuple(b + x for b, x in zip(beta, alpha)))
        mat[row, col] = monomial_coefficient(alpha, beta, n)
    return TruncatedOperator(enum, mat, a, lam - a, f"T_z{alpha}")


def toeplitz_derivative(alpha: Sequence[int], enum: BasisEnumeration) -> TruncatedOperator:
    """T_{d^alpha}; columns with beta < alpha somewhere are zero."""
    alpha = tuple(alpha)
    n = enum.n
    a = degree(alpha)
    mat = np.zeros((len(enum), len(enum)))
    for col, beta in enumerate(enum):
        if any(b < x for b, x in zip(beta, alpha)):
            continue
        row = enum.index(tuple(b - x for b, x in zip(beta, alpha)))
        mat[row, col] = derivative_coefficient(alpha, beta, n)
    return TruncatedOperator(enum, mat, a, enum.cutoff, f"T_d{alpha}")


def radial_eigenvalues(
    f: RadialSymbol | Callable,
    n: int,
    kmax: int,
    weight: RadialWeight = UNWEIGHTED,
    method: str = "auto",
    tol: float = 1e-12,
) -> np.ndarray:
    """Eigenvalue of T_f at degrees k = 0..kmax on A^2(B^n, w).

    The analytic path needs f given as a polynomial in r = 1 - rho**2 and a
    pure power weight; then each r**q contributes prod_{i<=q} (m+i)/(n+k+m+i).
    """
    analytic_ok = isinstance(f, RadialSymbol) and f.r_poly is not None and weight.is_pure_power
    if method == "auto":
        method = "analytic" if analytic_ok else "quadrature"
    ks = np.arange(kmax + 1)
    if method == "analytic":
        if not analytic_ok:
            raise ValueError("analytic path needs an r-polynomial symbol and a pure power weight")
        m = float(weight.m)
        out = np.zeros(kmax + 1)
        term = np.ones(kmax + 1)
        for q, c in enumerate(f.r_poly):
            if q > 0:
                term = term * (m + q) / (n + ks + m + q)
            out = out + c * term
        return out
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    func = f if callable(f) else f.func
    vals = np.empty(kmax + 1)
    for k in ks:
        num = radial_moment(n + int(k), weight, func, tol)
        den = radial_moment(n + int(k), weight, None, tol)
        vals[k] = num / den
    return vals


def toeplitz_radial(
    f: RadialSymbol | Callable,
    enum: BasisEnumeration,
    weight: RadialWeight = UNWEIGHTED,
    method: str = "auto",
    tol: float = 1e-12,
) -> TruncatedOperator:
    """Diagonal Toeplitz operator of a radial symbol."""
    vals = radial_eigenvalues(f, enum.n, enum.cutoff, weight, method, tol)
    label = getattr(f, "label", "") or "f"
    return diagonal(enum, vals, f"T_rad[{label}]")


def euler_operator(enum: BasisEnumeration) -> TruncatedOperator:
    """R = sum_j T_{z_j} T_{d_j}, diagonal with value |beta|."""
    return diagonal(enum, np.arange(enum.cutoff + 1, dtype=float), "R")


def r_plus_n_power(enum: BasisEnumeration, power: float) -> TruncatedOperator:
    """(R + n)**power by diagonal functional calculus."""
    vals = (np.arange(enum.cutoff + 1, dtype=float) + enum.n) ** power
    return diagonal(enum, vals, f"(R+n)^{power}")


# --- Heisenberg representation ----------------------------------------------

HEISENBERG_KINDS = ("Q", "P", "T", "a", "a+", "N")


@dataclass(frozen=True)
class HeisenbergElement:
    kind: str
    j: int | None = None

    def __post_init__(self):
        if self.kind not in HEISENBERG_KINDS:
            raise ValueError(f"unknown generator {self.kind!r}; expected one of {HEISENBERG_KINDS}")
        indexed = self.kind in ("Q", "P", "a", "a+")
        if indexed and self.j is None:
            raise ValueError(f"{self.kind} needs an index j")
        if not indexed and self.j is not None:
            raise ValueError(f"{self.kind} takes no index")

    def __str__(self):
        return self.kind if self.j is None else f"{self.kind}_{self.j}"


def lowering(j: int, enum: BasisEnumeration) -> np.ndarray:
    """b_j v_alpha = sqrt(alpha_j) v_{alpha - 1_j} (j is 1-based)."""
    if not 1 <= j <= enum.n:
        raise ValueError(f"index j={j} outside 1..{enum.n}")
    e = unit(j - 1, enum.n)
    mat = np.zeros((len(enum), len(enum)))
    for col, alpha in enumerate(enum):
        if alpha[j - 1] == 0:
            continue
        row = enum.index(tuple(a - x for a, x in zip(alpha, e)))
        mat[row, col] = math.sqrt(alpha[j - 1])
    return mat


def heisenberg_rep(
    h: HeisenbergElement,
    t: float,
    enum: BasisEnumeration,
    weight: RadialWeight = UNWEIGHTED,
) -> TruncatedOperator:
    """Matrix of tau_t(h) on the orthonormal basis {v_alpha}.

    The representation is transported from the Fock basis by relabelling
    u_alpha -> v_alpha, so the matrices do not depend on the weight.
    """
    del weight  # relabelling makes the matrices weight independent
    if t <= 0:
        raise ValueError("t must be positive")
    lam = enum.cutoff
    if h.kind == "T":
        return TruncatedOperator(enum, 1j * t * np.eye(len(enum)), 0, lam, str(h))
    if h.kind == "N":
        vals = t * (np.arange(lam + 1) + enum.n / 2.0)
        return diagonal(enum, vals, "N")
    b = lowering(h.j, enum)
    bd = b.T
    s = math.sqrt(t / 2.0)
    if h.kind == "Q":
        return TruncatedOperator(enum, s * (b + bd), 1, lam - 1, str(h))
    if h.kind == "P":
        return TruncatedOperator(enum, -1j * s * (b - bd), 1, lam - 1, str(h))
    if h.kind == "a":
        return TruncatedOperator(enum, math.sqrt(t) * b, 1, lam, str(h))
    return TruncatedOperator(enum, math.sqrt(t) * bd, 1, lam - 1, str(h))


def tau_P_via_R(j: int, t: float, enum: BasisEnumeration) -> TruncatedOperator:
    """-i (t/2)**(1/2) [X - X^*] with X = T_{d_j} (R + n)**(-1/2)."""
    x = toeplitz_derivative(unit(j - 1, enum.n), enum) @ r_plus_n_power(enum, -0.5)
    op = (x - x.adjoint()).scale(-1j * math.sqrt(t / 2.0))
    return op.retag(f"tauP_{j}[R]")


def hardy_monomial(alpha: Sequence[int], enum: BasisEnumeration) -> TruncatedOperator:
    """Bergman-side image of the Hardy-space T_{z^alpha}.

    Coefficient sqrt((beta+alpha)!/beta! * (|beta|+n-1)!/(|beta|+|alpha|+n-1)!).
    """
    alpha = tuple(alpha)
    n, lam = enum.n, enum.cutoff
    a = degree(alpha)
    mat = np.zeros((len(enum), len(enum)))
    for col, beta in enumerate(enum):
        if sum(beta) + a > lam:
            continue
        row = enum.index(tuple(b + x for b, x in zip(beta, alpha)))
        # same ratio as the Bergman coefficient with n replaced by n - 1
        mat[row, col] = monomial_coefficient(alpha, beta, n - 1)
    return TruncatedOperator(enum, mat, a, lam - a, f"H_z{alpha}")


def hermitian_part(op: TruncatedOperator) -> TruncatedOperator:
    """op + op^*, the self-adjoint generator built from a raising operator."""
    return (op + op.adjoint()).retag(f"{op.tag}+h.c.")
