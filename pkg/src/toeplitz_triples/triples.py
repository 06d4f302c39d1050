"""Finite-truncation harness for spectral triples.

Bounded commutators, compact resolvent and regularity are statements about
untruncated operators. Here each is checked on a sweep of cutoffs: an
operator is built per cutoff, measured on its interior block, and the
sequence is judged stabilising when the last three values agree to 2%.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .multiindex import BasisEnumeration, enumerate_basis
from .operators import (
    HeisenbergElement,
    TruncatedOperator,
    commutator,
    diagonal,
    hardy_monomial,
    heisenberg_rep,
    hermitian_part,
    operator_norm,
    toeplitz_monomial,
    unit,
)
from .spectral import SpectrumStream, spectral_dimension, stream_from_values

Builder = Callable[[int], TruncatedOperator]

STABILITY_RTOL = 0.02


def relative_variation(values: Sequence[float]) -> float:
    vals = np.asarray(values, dtype=float)
    top = np.max(np.abs(vals))
    if top == 0:
        return 0.0
    return float((np.max(vals) - np.min(vals)) / top)


def is_stabilizing(values: Sequence[float], rtol: float = STABILITY_RTOL) -> bool:
    return len(values) >= 3 and relative_variation(values[-3:]) <= rtol


@dataclass
class TripleSpec:
    """Per-cutoff builders for D and the algebra generators."""

    name: str
    dirac: Builder
    generators: Mapping[str, Builder]
    cutoffs: Sequence[int]
    max_shift: int = 1
    # degree level for norms, overriding the tracked interior (model-exact D)
    norm_level: Callable[[int], int] | None = None

    def __post_init__(self):
        cut = list(self.cutoffs)
        if len(cut) < 4 or any(b <= a for a, b in zip(cut, cut[1:])):
            raise ValueError("cutoff sweep must be increasing with at least 4 values")

    def build(self, cutoff: int, hermitian_tol: float = 1e-10):
        d = self.dirac(cutoff)
        resid = d.hermiticity_residual()
        if resid > hermitian_tol:
            raise ValueError(f"D is not Hermitian on its interior (residual {resid:.3g})")
        gens = {}
        for label, builder in self.generators.items():
            g = builder(cutoff)
            if g.shift > self.max_shift:
                raise ValueError(f"generator {label} has shift {g.shift} > {self.max_shift}")
            gens[label] = g
        return d, gens


@dataclass
class SweepReport:
    name: str
    cutoffs: list[int]
    norms: dict[str, list[float]]
    converged: dict[str, list[bool]] = field(default_factory=dict)

    def variation(self, label: str) -> float:
        return relative_variation(self.norms[label][-3:])

    def verdict(self, label: str) -> str:
        return "stabilizing" if is_stabilizing(self.norms[label]) else "non-stabilizing"

    @property
    def passed(self) -> bool:
        return all(self.verdict(k) == "stabilizing" for k in self.norms)

    def rows(self):
        for label, vals in self.norms.items():
            for cut, v in zip(self.cutoffs, vals):
                yield {"generator": label, "cutoff": cut, "norm": v}


def _measured(spec: TripleSpec, cutoff: int, op: TruncatedOperator) -> np.ndarray:
    if spec.norm_level is None:
        return op.interior_block()
    return op.interior_block(spec.norm_level(cutoff))


def commutator_boundedness(spec: TripleSpec) -> SweepReport:
    norms: dict[str, list[float]] = {k: [] for k in spec.generators}
    conv: dict[str, list[bool]] = {k: [] for k in spec.generators}
    for cut in spec.cutoffs:
        d, gens = spec.build(cut)
        for label, g in gens.items():
            res = operator_norm(_measured(spec, cut, commutator(d, g)))
            norms[label].append(res.value)
            conv[label].append(res.converged)
    return SweepReport(spec.name, list(spec.cutoffs), norms, conv)


def absolute_value(d: TruncatedOperator) -> TruncatedOperator:
    """|D| from the spectral decomposition of the stored Hermitian matrix."""
    h = 0.5 * (d.matrix + d.matrix.conj().T)
    w, v = np.linalg.eigh(h)
    mat = (v * np.abs(w)) @ v.conj().T
    return TruncatedOperator(d.enum, mat, d.shift, d.interior, f"|{d.tag}|", d.blocks)


def regularity_check(spec: TripleSpec, k: int = 2) -> dict[int, SweepReport]:
    """Norms of delta^m(a) = [|D|, delta^{m-1}(a)] for m = 1..k."""
    if k < 1 or k > 3:
        raise ValueError("regularity order must be 1, 2 or 3 at desk scale")
    out = {m: {label: [] for label in spec.generators} for m in range(1, k + 1)}
    for cut in spec.cutoffs:
        d, gens = spec.build(cut)
        ad = absolute_value(d)
        for label, g in gens.items():
            cur = g
            for m in range(1, k + 1):
                cur = commutator(ad, cur)
                out[m][label].append(operator_norm(_measured(spec, cut, cur)).value)
    return {m: SweepReport(f"{spec.name}:delta^{m}", list(spec.cutoffs), out[m]) for m in out}


@dataclass
class ResolventReport:
    name: str
    cutoffs: list[int]
    tail_minima: dict[int, np.ndarray]
    growth_exponent: float
    stable: bool
    verdict: str


def _tail_minima(d: TruncatedOperator) -> np.ndarray:
    block = d.interior_block()
    deg = d.degrees[d.interior_mask()]
    h = 0.5 * (block + block.conj().T)
    w, v = np.linalg.eigh(h)
    if np.min(np.abs(w)) < 1e-12:
        raise ZeroDivisionError("D has a zero eigenvalue on its interior")
    absd = (v * np.abs(w)) @ v.conj().T
    mins = []
    for k in range(int(d.interior) + 1):
        sel = deg >= k
        mins.append(float(np.linalg.eigvalsh(absd[np.ix_(sel, sel)])[0]))
    return np.array(mins)


def compact_resolvent_check(spec: TripleSpec, min_exponent: float = 0.1) -> ResolventReport:
    """Smallest eigenvalue of |D| compressed to degrees >= k, per cutoff.

    Pass requires the minima to be truncation independent (last two cutoffs
    agree to 2% on their common range) and to grow like (k+1)**p with
    p >= min_exponent.
    """
    minima = {}
    for cut in spec.cutoffs:
        d, _ = spec.build(cut)
        minima[cut] = _tail_minima(d)
    cuts = list(spec.cutoffs)
    a, b = minima[cuts[-2]], minima[cuts[-1]]
    common = min(len(a), len(b))
    half = max(1, common // 2)
    stable = bool(np.all(np.abs(a[:half] - b[:half]) <= STABILITY_RTOL * np.abs(b[:half])))
    last = minima[cuts[-1]]
    ks = np.arange(1, len(last))
    growth = float(np.polyfit(np.log(ks + 1.0), np.log(last[1:]), 1)[0]) if len(ks) > 1 else 0.0
    ok = stable and growth >= min_exponent
    return ResolventReport(spec.name, cuts, minima, growth, stable, "pass" if ok else "fails")


# --- unitaries and the doubled triple ---------------------------------------


class UnitarityError(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"operator is not unitary (residual {residual:.3g})")
        self.residual = residual


def holomorphic_multiplier(coeffs: Mapping[tuple[int, ...], complex], enum: BasisEnumeration) -> TruncatedOperator:
    """T_f = sum c_alpha T_{z^alpha} on the unweighted Bergman basis."""
    mat = np.zeros((len(enum), len(enum)), dtype=complex)
    for alpha, c in coeffs.items():
        if sum(alpha) <= enum.cutoff and c != 0:
            mat += c * toeplitz_monomial(alpha, enum).matrix
    return TruncatedOperator(enum, mat, enum.cutoff, tag="T_f")


def exp_z1_coefficients(n: int, order: int) -> dict[tuple[int, ...], float]:
    return {tuple(k * x for x in unit(0, n)): 1.0 / math.factorial(k) for k in range(order + 1)}


def unitarity_residual(u: TruncatedOperator) -> float:
    block = u.interior_block()
    return float(np.max(np.abs(block.conj().T @ block - np.eye(block.shape[0]))))


def polar_unitary(
    coeffs: Mapping[tuple[int, ...], complex],
    enum: BasisEnumeration,
    tol: float = 1e-10,
) -> TruncatedOperator:
    """U = F (F^* F)^{-1/2} for the finite section F of T_f.

    F is lower triangular in degree with diagonal f(0) != 0, so it is
    invertible and U is exactly unitary on the truncated space.
    """
    zero = tuple(0 for _ in range(enum.n))
    if abs(coeffs.get(zero, 0.0)) == 0:
        raise ValueError("f(0) must be nonzero")
    f = holomorphic_multiplier(coeffs, enum).matrix
    w, v = np.linalg.eigh(f.conj().T @ f)
    if np.min(w) <= 0:
        raise UnitarityError(float("inf"))
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    u = TruncatedOperator(enum, f @ inv_sqrt, enum.cutoff, enum.cutoff, "U")
    resid = unitarity_residual(u)
    if resid > tol:
        raise UnitarityError(resid)
    return u


def scalar_distance(u: TruncatedOperator) -> float:
    """||U - (tr U / dim) I||, zero iff U is a multiple of the identity."""
    block = u.interior_block()
    c = np.trace(block) / block.shape[0]
    return float(np.linalg.norm(block - c * np.eye(block.shape[0]), 2))


def _block2(a, b, c, d) -> np.ndarray:
    return np.block([[a, b], [c, d]])


@dataclass
class DoubledTriple:
    d: TruncatedOperator
    u: TruncatedOperator
    dtilde: TruncatedOperator


def build_doubled(d: TruncatedOperator, u: TruncatedOperator, tol: float = 1e-10) -> DoubledTriple:
    """Dtilde = [[0, U D], [D U^*, 0]] on H (+) H."""
    resid = unitarity_residual(u)
    if resid > tol:
        raise UnitarityError(resid)
    ud = u.matrix @ d.matrix
    du = d.matrix @ u.matrix.conj().T
    z = np.zeros_like(ud)
    interior = min(d.interior, u.interior)
    dt = TruncatedOperator(d.enum, _block2(z, ud, du, z), d.enum.cutoff, interior, "Dtilde", 2)
    return DoubledTriple(d, u, dt)


def doubled_generator(a: TruncatedOperator) -> TruncatedOperator:
    return TruncatedOperator(a.enum, np.kron(np.eye(2), a.matrix), a.shift, a.interior, f"diag({a.tag})", 2)


@dataclass
class DoubledReport:
    unitarity: float
    hermiticity: float
    offdiag_square: float
    block_spectra: float
    dimension_base: float
    dimension_doubled: float
    commutators: SweepReport | None

    @property
    def passed(self) -> bool:
        ok = (
            self.unitarity <= 1e-10
            and self.hermiticity <= 1e-10
            and self.offdiag_square <= 1e-10
            and self.block_spectra <= 1e-8
            and abs(self.dimension_doubled - self.dimension_base) <= 0.05
        )
        if self.commutators is not None:
            ok = ok and self.commutators.passed
        return ok


def verify_doubled(
    dt: DoubledTriple,
    base_stream: SpectrumStream,
    sweep: TripleSpec | None = None,
) -> DoubledReport:
    """Checks on Dtilde. Spectra are compared relative to the largest |eigenvalue|."""
    m = dt.dtilde.matrix
    herm = float(np.max(np.abs(m - m.conj().T)))
    sq = m @ m
    half = m.shape[0] // 2
    off = max(float(np.max(np.abs(sq[:half, half:]))), float(np.max(np.abs(sq[half:, :half]))))
    top = np.linalg.eigvalsh(0.5 * (sq[:half, :half] + sq[:half, :half].conj().T))
    bot = np.linalg.eigvalsh(0.5 * (sq[half:, half:] + sq[half:, half:].conj().T))
    spec_gap = float(np.max(np.abs(top - bot)) / max(1.0, np.max(np.abs(bot))))
    dim_base = spectral_dimension(base_stream)
    dim_doubled = spectral_dimension(base_stream.doubled())
    comm = commutator_boundedness(sweep) if sweep is not None else None
    return DoubledReport(unitarity_residual(dt.u), herm, off, spec_gap, dim_base, dim_doubled, comm)


def doubled_spectrum(dt: DoubledTriple) -> SpectrumStream:
    return stream_from_values(np.linalg.eigvalsh(dt.dtilde.matrix), "Dtilde")


# --- named triples ------------------------------------------------------------


def t_r_inverse(enum: BasisEnumeration) -> TruncatedOperator:
    """D = T_{1-|z|^2}^{-1} on the unweighted ball: value n+k+1 on degree k."""
    return diagonal(enum, np.arange(enum.cutoff + 1, dtype=float) + enum.n + 1, "T_r^-1")


def hardy_d(enum: BasisEnumeration) -> TruncatedOperator:
    """Inverse of Lambda on the Hardy space, Bergman-side image: 2(k+n)."""
    return diagonal(enum, 2.0 * (np.arange(enum.cutoff + 1, dtype=float) + enum.n), "Lambda^-1")


def bergman_tr_triple(n: int = 1, cutoffs: Sequence[int] = tuple(range(10, 61, 5))) -> TripleSpec:
    return TripleSpec(
        "bergman-tr",
        lambda c: t_r_inverse(enumerate_basis(n, c)),
        {"Re T_z1": lambda c: hermitian_part(toeplitz_monomial(unit(0, n), enumerate_basis(n, c)))},
        cutoffs,
    )


def hardy_model_triple(n: int = 1, cutoffs: Sequence[int] = tuple(range(10, 61, 5))) -> TripleSpec:
    return TripleSpec(
        "hardy-model",
        lambda c: hardy_d(enumerate_basis(n, c)),
        {"Re T_z1": lambda c: hermitian_part(hardy_monomial(unit(0, n), enumerate_basis(n, c)))},
        cutoffs,
    )


def heisenberg_dirac_triple(
    n: int = 1, t: float = 1.0, cutoffs: Sequence[int] = tuple(range(20, 101, 10))
) -> TripleSpec:
    from .clifford import dirac_bergman, gamma_matrices, spinor_lift

    d_spin = gamma_matrices(n).d

    def gen(c):
        return spinor_lift(hermitian_part(toeplitz_monomial(unit(0, n), enumerate_basis(n, c))), d_spin)

    return TripleSpec(
        "heisenberg-dirac",
        lambda c: dirac_bergman(t, enumerate_basis(n, c)),
        {"Re T_z1": gen},
        cutoffs,
    )


def raising_ladder_control(n: int = 1, cutoffs: Sequence[int] = tuple(range(10, 61, 10))) -> TripleSpec:
    """Negative control: a = tau(a_1^+) + h.c. is unbounded, so [|D|, a] grows."""
    return TripleSpec(
        "control:ladder",
        lambda c: t_r_inverse(enumerate_basis(n, c)),
        {"tau(a1+)": lambda c: hermitian_part(heisenberg_rep(HeisenbergElement("a+", 1), 1.0, enumerate_basis(n, c)))},
        cutoffs,
    )


def bounded_d_control(n: int = 1, cutoffs: Sequence[int] = tuple(range(10, 61, 10))) -> TripleSpec:
    """Negative control for the resolvent check: D = 2 - 1/(k+1) is bounded."""
    return TripleSpec(
        "control:bounded",
        lambda c: diagonal(enumerate_basis(n, c), 2.0 - 1.0 / (np.arange(c + 1) + 1.0), "bounded"),
        {},
        cutoffs,
    )


def doubled_sweep(n: int = 1, cutoffs: Sequence[int] = tuple(range(10, 61, 10)), pad: int = 20) -> TripleSpec:
    """Commutators of Dtilde with diag(a, a) for U = polar unitary of exp(z_1).

    The finite-section polar factor is distorted only within a few degrees of
    its own cutoff, so everything is built ``pad`` degrees higher and the
    norms are read on degrees <= cutoff - 1.
    """

    def dt(c):
        enum = enumerate_basis(n, c + pad)
        u = polar_unitary(exp_z1_coefficients(n, c + pad), enum)
        return build_doubled(t_r_inverse(enum), u).dtilde

    def gen(c):
        return doubled_generator(hermitian_part(toeplitz_monomial(unit(0, n), enumerate_basis(n, c + pad))))

    return TripleSpec("doubled", dt, {"diag(Re T_z1)": gen}, cutoffs, max_shift=1, norm_level=lambda c: c - 1)
