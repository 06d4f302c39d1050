"""Eigenvalue streams, Weyl fits, zeta sums and Dixmier estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bases import contact_volume
from .multiindex import degree_multiplicity
from .operators import TruncatedOperator


class NonHermitianError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"operator is not Hermitian on its interior block (residual {residual:.3g})")
        self.residual = residual


@dataclass(frozen=True)
class SpectrumStream:
    """Eigenvalues with multiplicities, sorted by increasing absolute value."""

    values: np.ndarray
    multiplicities: np.ndarray
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if vals.shape != mult.shape:
            raise ValueError("values and multiplicities differ in length")
        if np.any(mult <= 0):
            raise ValueError("multiplicities must be positive")
        order = np.argsort(np.abs(vals), kind="stable")
        object.__setattr__(self, "values", vals[order])
        object.__setattr__(self, "multiplicities", mult[order])

    def __len__(self):
        return len(self.values)

    @property
    def total(self) -> int:
        return int(self.multiplicities.sum())

    def expanded(self, count: int | None = None) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, first ``count`` of them."""
        if count is None:
            return np.repeat(self.values, self.multiplicities)
        if count > self.total:
            raise ValueError(f"stream holds {self.total} eigenvalues, {count} requested")
        cum = np.cumsum(self.multiplicities)
        last = int(np.searchsorted(cum, count)) + 1
        return np.repeat(self.values[:last], self.multiplicities[:last])[:count]

    def scaled(self, c: float) -> "SpectrumStream":
        return SpectrumStream(c * self.values, self.multiplicities, f"{c}*{self.label}")

    def doubled(self) -> "SpectrumStream":
        """Spectrum of |[[0, UD], [DU*, 0]]|: every |value| twice as often."""
        return SpectrumStream(np.abs(self.values), 2 * self.multiplicities, f"double({self.label})")


def t_r_inverse_stream(n: int, kmax: int) -> SpectrumStream:
    """D = T_{1-|z|^2}^{-1} on A^2(B^n): value n+k+1, multiplicity C(n-1+k, n-1)."""
    ks = np.arange(kmax + 1)
    mult = np.array([degree_multiplicity(n, int(k)) for k in ks], dtype=np.int64)
    return SpectrumStream((n + ks + 1).astype(float), mult, f"T_r^-1(n={n})")


def hardy_stream(n: int, kmax: int) -> SpectrumStream:
    """Inverse of Lambda on H^2(S^{2n-1}): value 2(k+n), multiplicity C(n-1+k, n-1)."""
    ks = np.arange(kmax + 1)
    mult = np.array([degree_multiplicity(n, int(k)) for k in ks], dtype=np.int64)
    return SpectrumStream(2.0 * (n + ks), mult, f"hardy(n={n})")


def disc_bundle_stream(n: int, smax: int) -> SpectrumStream:
    """Model of L^{-1} on the disc-bundle Hardy space, the sphere in C^{n+1}.

    Degree-s block: value 2(s + n + 1), multiplicity C(n+s, n).
    """
    return hardy_stream(n + 1, smax)


def stream_from_values(values: np.ndarray, label: str = "", atol: float = 1e-9) -> SpectrumStream:
    """Group numerically equal eigenvalues into (value, multiplicity) pairs."""
    vals = np.sort(np.asarray(values, dtype=float))
    if vals.size == 0:
        return SpectrumStream(np.array([]), np.array([], dtype=np.int64), label)
    groups = [[vals[0]]]
    for v in vals[1:]:
        if abs(v - groups[-1][0]) <= atol * max(1.0, abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    return SpectrumStream(
        np.array([np.mean(g) for g in groups]), np.array([len(g) for g in groups]), label
    )


def spectrum_of(op: TruncatedOperator, hermitian_tol: float = 1e-10, atol: float = 1e-9) -> SpectrumStream:
    """Interior-block eigenvalues of a Hermitian truncated operator."""
    block = op.interior_block()
    resid = float(np.max(np.abs(block - block.conj().T), initial=0.0))
    if resid > hermitian_tol:
        raise NonHermitianError(resid)
    vals = np.linalg.eigvalsh(0.5 * (block + block.conj().T))
    return stream_from_values(vals, op.tag, atol)


def counting(stream: SpectrumStream, lam: float) -> int:
    """M(lambda) = #{j : |lambda_j| < lambda} with multiplicity."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    idx = int(np.searchsorted(np.abs(stream.values), lam, side="left"))
    return int(stream.multiplicities[:idx].sum())


@dataclass(frozen=True)
class WeylFit:
    exponent: float
    coefficient: float
    residual: float
    samples: int


def weyl_fit(
    stream: SpectrumStream,
    lam_range: tuple[float, float] | None = None,
    samples: int = 60,
) -> WeylFit:
    """Least-squares fit of log M(lambda) = log c + d log lambda.

    The default range is the top two decades below the largest eigenvalue
    held by the stream, so M is complete over the whole range.
    """
    top = float(np.abs(stream.values[-1]))
    lo, hi = lam_range if lam_range is not None else (top / 100.0, top)
    if not (0 < lo < hi) or hi / lo < 10.0 or samples < 20:
        raise ValueError("Weyl fit needs at least 20 samples across at least a decade")
    if hi > top:
        raise ValueError(f"upper end {hi} exceeds the largest eigenvalue held ({top})")
    lams = np.geomspace(lo, hi, samples)
    counts = np.array([counting(stream, lam) for lam in lams], dtype=float)
    keep = counts > 0
    if keep.sum() < 2:
        raise ValueError("degenerate range: counting function vanishes")
    x, y = np.log(lams[keep]), np.log(counts[keep])
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / keep.sum()) if len(res) else 0.0
    return WeylFit(float(slope), float(math.exp(icpt)), rms, int(keep.sum()))


def zeta_partial(stream: SpectrumStream, s: float, count: int | None = None) -> float:
    """sum_{j <= count} |lambda_j|**(-s) with multiplicity."""
    if s <= 0:
        raise ValueError("s must be positive")
    if np.any(stream.values == 0):
        raise ZeroDivisionError("zero eigenvalue in stream")
    if count is None:
        return float(np.sum(stream.multiplicities * np.abs(stream.values) ** (-s)))
    vals = stream.expanded(count)
    return float(np.sum(np.abs(vals) ** (-s)))


def zeta_partial_sums(stream: SpectrumStream, s: float, counts: Sequence[int]) -> np.ndarray:
    if np.any(stream.values == 0):
        raise ZeroDivisionError("zero eigenvalue in stream")
    terms = np.abs(stream.expanded(max(counts))) ** (-s)
    cum = np.cumsum(terms)
    return cum[np.asarray(counts) - 1]


def zeta_growth_exponent(stream: SpectrumStream, s: float, counts: Sequence[int]) -> float:
    """Log-log slope of the partial-sum tail increments S(2N) - S(N) against N.

    Negative slope means the series converges at s; near zero means log or
    power divergence at the boundary.
    """
    counts = np.asarray(counts)
    sums = zeta_partial_sums(stream, s, list(counts) + list(2 * counts))
    inc = sums[len(counts):] - sums[: len(counts)]
    return float(np.polyfit(np.log(counts), np.log(inc), 1)[0])


def spectral_dimension(stream: SpectrumStream, **kwargs) -> float:
    """Dimension estimate: the Weyl-law exponent of the counting function."""
    return weyl_fit(stream, **kwargs).exponent


def dixmier_log_average(
    stream: SpectrumStream,
    s: float,
    count: int,
    weights: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """(1/log N) * sum of the N largest eigenvalues of a |D|^{-s}.

    ``weights`` gives the eigenvalue of a commuting diagonal ``a`` as a
    function of the eigenvalue of D.
    """
    if count < 2:
        raise ValueError("need N >= 2")
    mult = stream.multiplicities
    vals = np.abs(stream.values) ** (-s)
    if weights is not None:
        vals = vals * np.asarray(weights(stream.values), dtype=float)
    order = np.argsort(-vals, kind="stable")
    vals, mult = vals[order], mult[order]
    cum = np.cumsum(mult)
    if cum[-1] < count:
        raise ValueError(f"stream holds {cum[-1]} eigenvalues, {count} requested")
    last = int(np.searchsorted(cum, count))
    taken = mult[: last + 1].copy()
    taken[-1] -= cum[last] - count
    return float(math.fsum(vals[: last + 1] * taken) / math.log(count))


def dixmier_extrapolated(stream: SpectrumStream, s: float, counts: Sequence[int], weights=None) -> tuple[float, float]:
    """Fit A(N) = a + b / log N over several N; returns (a, b).

    Supporting output only: the limit of the log-average is a, and b is the
    finite-N drift.
    """
    xs = np.array([1.0 / math.log(c) for c in counts])
    ys = np.array([dixmier_log_average(stream, s, c, weights) for c in counts])
    b, a = np.polyfit(xs, ys, 1)
    return float(a), float(b)


def dixmier_closed_form_ball(order: float, coeff, n: int, samples: int = 4096) -> float:
    """Boundary-integral value of the Dixmier trace for a symbol on the sphere.

    Tr_w = (1 / (n! (2 pi)^n)) * integral of c(x) over S^{2n-1} against
    eta ^ (d eta)^(n-1). The volume is taken from ``contact_volume`` and the
    coefficient is averaged over a fixed point set on the sphere.
    """
    if abs(order + n) > 1e-12:
        raise ValueError(f"critical order is {-n}, got {order}")
    if callable(coeff):
        rng = np.random.default_rng(12345)
        pts = rng.normal(size=(samples, 2 * n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        z = pts[:, :n] + 1j * pts[:, n:]
        avg = float(np.mean(np.real(coeff(z))))
    else:
        avg = float(coeff)
    vol = contact_volume(n)
    return avg * vol / (math.factorial(n) * (2.0 * math.pi) ** n)


def decay_exponent(values: np.ndarray, ks: np.ndarray) -> float:
    """Log-log slope of |values| against (k + 1)."""
    return float(np.polyfit(np.log(np.asarray(ks) + 1.0), np.log(np.abs(values)), 1)[0])
