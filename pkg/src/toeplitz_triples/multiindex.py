"""Multi-indices: graded enumeration, multiplicities and factorial ratios.

Every basis in the package is indexed by exponents alpha in N^n. The
enumeration is graded lexicographic: degree blocks |alpha| = 0, 1, 2, ...
are contiguous and, inside a block, tuples come in decreasing lexicographic
order, so for n = 2 the degree-1 block is (1, 0), (0, 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


def as_multiindex(alpha: Sequence[int], n: int | None = None) -> MultiIndex:
    """Validate and normalise a sequence of exponents to a tuple."""
    out = tuple(int(a) for a in alpha)
    if not out:
        raise ValueError("a multi-index needs at least one entry")
    if any(a < 0 for a in out):
        raise ValueError(f"negative exponent in {out}")
    if n is not None and len(out) != n:
        raise ValueError(f"expected {n} entries, got {len(out)}")
    return out


def degree(alpha: Sequence[int]) -> int:
    return int(sum(alpha))


def unit(j: int, n: int) -> MultiIndex:
    """The multi-index 1_j (zero-based j)."""
    if not 0 <= j < n:
        raise ValueError(f"index {j} out of range for n={n}")
    return tuple(1 if i == j else 0 for i in range(n))


def _compositions(k: int, n: int) -> Iterator[MultiIndex]:
    # decreasing lexicographic order of all alpha with |alpha| = k
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


def degree_multiplicity(n: int, k: int) -> int:
    """Number of alpha in N^n with |alpha| = k, i.e. binomial(n-1+k, n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.comb(n - 1 + k, n - 1)


@dataclass(frozen=True)
class BasisEnumeration:
    """Graded-lex list of all alpha in N^n with |alpha| <= cutoff."""

    n: int
    cutoff: int
    order: tuple[MultiIndex, ...] = field(repr=False)

    def __post_init__(self):
        lookup = {alpha: i for i, alpha in enumerate(self.order)}
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.order[i]

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._lookup

    def index(self, alpha: Sequence[int]) -> int:
        try:
            return self._lookup[tuple(alpha)]
        except KeyError:
            raise KeyError(f"{tuple(alpha)} is not in the degree-{self.cutoff} basis") from None

    def get(self, alpha: Sequence[int], default=None):
        return self._lookup.get(tuple(alpha), default)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((sum(a) for a in self.order), dtype=np.int64, count=len(self.order))

    def block(self, k: int) -> slice:
        """Contiguous slice of the degree-k block."""
        if not 0 <= k <= self.cutoff:
            raise ValueError(f"degree {k} outside 0..{self.cutoff}")
        start = math.comb(k - 1 + self.n, self.n) if k > 0 else 0
        return slice(start, start + degree_multiplicity(self.n, k))

    def size_up_to(self, k: int) -> int:
        """Number of basis elements with degree <= k (0 when k < 0)."""
        if k < 0:
            return 0
        return math.comb(min(k, self.cutoff) + self.n, self.n)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "cutoff": self.cutoff, "order": [list(a) for a in self.order]})

    @classmethod
    def from_json(cls, text: str) -> "BasisEnumeration":
        data = json.loads(text)
        enum = enumerate_basis(data["n"], data["cutoff"])
        if [list(a) for a in enum.order] != data["order"]:
            raise ValueError("serialized order is not the graded-lex order")
        return enum


def enumerate_basis(n: int, cutoff: int) -> BasisEnumeration:
    """All alpha in N^n with |alpha| <= cutoff in graded-lex order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    order = tuple(alpha for k in range(cutoff + 1) for alpha in _compositions(k, n))
    return BasisEnumeration(n=n, cutoff=cutoff, order=order)


def graded_lex_key(alpha: Sequence[int]) -> tuple:
    """Sort key reproducing the enumeration order."""
    return (sum(alpha), tuple(-a for a in alpha))


# --- factorial ratios -------------------------------------------------------
#
# Ratios of factorials are accumulated as fsum of logs over the ranges that
# actually differ, which keeps relative error near 1e-15 for degrees in the
# hundreds without ever forming a large factorial.


def _log_rising(lo: int, hi: int) -> list[float]:
    # logs of lo+1, ..., hi
    return [math.log(k) for k in range(lo + 1, hi + 1)]


def log_factorial_ratio(top: int, bottom: int) -> float:
    """log(top! / bottom!) for nonnegative integers."""
    if top < 0 or bottom < 0:
        raise ValueError(f"factorial of a negative integer ({top}, {bottom})")
    if top >= bottom:
        return math.fsum(_log_rising(bottom, top))
    return -math.fsum(_log_rising(top, bottom))


def multi_factorial(alpha: Sequence[int]) -> int:
    """alpha! = prod_k alpha_k! as an exact integer."""
    return math.prod(math.factorial(a) for a in alpha)


def shift_ratio(alpha: Sequence[int], beta: Sequence[int], sign: int = 1) -> float:
    """(beta + alpha)!/beta! for sign=+1, beta!/(beta - alpha)! for sign=-1."""
    if len(alpha) != len(beta):
        raise ValueError("multi-indices of different length")
    logs = []
    for a, b in zip(alpha, beta):
        if sign > 0:
            logs.extend(_log_rising(b, b + a))
        else:
            if b - a < 0:
                raise ValueError(f"beta - alpha has a negative entry ({tuple(beta)} - {tuple(alpha)})")
            logs.extend(_log_rising(b - a, b))
    return math.exp(math.fsum(logs))


def monomial_coefficient(alpha: Sequence[int], beta: Sequence[int], n: int) -> float:
    """Coefficient of v_{beta+alpha} in T_{z^alpha} v_beta on the unweighted ball.

    sqrt((beta+alpha)!/beta! * (|beta|+n)!/(|beta|+|alpha|+n)!)
    """
    a, b = degree(alpha), degree(beta)
    logs = []
    for ai, bi in zip(alpha, beta):
        logs.extend(_log_rising(bi, bi + ai))
    logs.extend(-x for x in _log_rising(b + n, b + a + n))
    return math.exp(0.5 * math.fsum(logs))


def derivative_coefficient(alpha: Sequence[int], beta: Sequence[int], n: int) -> float:
    """Coefficient of v_{beta-alpha} in T_{d^alpha} v_beta; 0 unless beta >= alpha."""
    if any(bi < ai for ai, bi in zip(alpha, beta)):
        return 0.0
    a, b = degree(alpha), degree(beta)
    logs = []
    for ai, bi in zip(alpha, beta):
        logs.extend(_log_rising(bi - ai, bi))
    logs.extend(_log_rising(b - a + n, b + n))
    return math.exp(0.5 * math.fsum(logs))
