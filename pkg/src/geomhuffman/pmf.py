"""Finite probability vectors and the information measures on them.

All entropies and divergences are reported in bits (log base 2).
Divergence targets may be unnormalized nonnegative vectors, in which case
the divergence can be negative or +inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, GuardExceededError

SUM_TOL = 1e-9
PRODUCT_CAP = 1 << 24  # max number of entries a product PMF may hold


def _freeze(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability vector: entries >= 0 and summing to 1 within SUM_TOL.

    Inputs outside the sum tolerance are rejected; use :meth:`normalized`
    to renormalize explicitly.
    """

    probs: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.probs)
        if arr.size < 1:
            raise ValueError("a PMF needs at least one entry")
        if not np.all(np.isfinite(arr)):
            raise ValueError("PMF entries must be finite")
        if np.any(arr < 0.0):
            raise ValueError("PMF entries must be nonnegative")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"PMF entries sum to {total!r}, expected 1 within {SUM_TOL}")
        object.__setattr__(self, "probs", arr)

    @property
    def m(self) -> int:
        return int(self.probs.size)

    @classmethod
    def normalized(cls, values) -> "Pmf":
        """Build a Pmf from a nonnegative vector, dividing by its sum."""
        arr = np.asarray(values, dtype=np.float64).reshape(-1)
        if arr.size < 1:
            raise ValueError("a PMF needs at least one entry")
        if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite and nonnegative")
        total = arr.sum()
        if total <= 0.0:
            raise ValueError("cannot normalize a vector with zero sum")
        return cls(arr / total)

    @classmethod
    def uniform(cls, m: int) -> "Pmf":
        return cls(np.full(m, 1.0 / m))


@dataclass(frozen=True, eq=False)
class NonNegVector:
    """Nonnegative weight vector with at least one positive entry.

    No normalization is required; these serve as divergence targets.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.values)
        if arr.size < 1:
            raise ValueError("need at least one entry")
        if not np.all(np.isfinite(arr)):
            raise ValueError("entries must be finite")
        if np.any(arr < 0.0):
            raise ValueError("entries must be nonnegative")
        if not np.any(arr > 0.0):
            raise ValueError("need at least one positive entry")
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return int(self.values.size)


def as_weights(x) -> np.ndarray:
    """Return the raw float vector behind a Pmf, NonNegVector, or array-like."""
    if isinstance(x, Pmf):
        return x.probs
    if isinstance(x, NonNegVector):
        return x.values
    return np.asarray(x, dtype=np.float64).reshape(-1)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits, with the 0*log(0) = 0 convention."""
    arr = as_weights(p)
    pos = arr[arr > 0.0]
    return float(-(pos * np.log2(pos)).sum())


def kl_divergence(p: Pmf, x) -> float:
    """D(p || x) = sum over p_i > 0 of p_i * log2(p_i / x_i), in bits.

    Returns +inf when p puts mass where x is zero.  x may be unnormalized
    (nonnegativity of the result is only guaranteed for normalized x).
    """
    parr = as_weights(p)
    xarr = as_weights(x)
    if parr.size != xarr.size:
        raise DimensionMismatchError(
            f"dimension mismatch: p has {parr.size} entries, x has {xarr.size}"
        )
    mask = parr > 0.0
    ps = parr[mask]
    xs = xarr[mask]
    if np.any(xs == 0.0):
        return math.inf
    # difference form avoids overflow of p/x for denormal targets
    return float((ps * (np.log2(ps) - np.log2(xs))).sum())


def product_pmf(p: Pmf, k: int, cap: int = PRODUCT_CAP) -> Pmf:
    """k-fold product PMF over m**k tuples in lexicographic order.

    The first symbol of a tuple is the most significant index.  The result
    is renormalized by its own sum (a factor within k*SUM_TOL of 1) so that
    accumulated rounding never trips the PMF sum check.
    """
    if k < 1:
        raise ValueError("block length k must be >= 1")
    size = p.m ** k
    if size > cap:
        raise GuardExceededError(
            f"product PMF would hold {size} entries, cap is {cap}"
        )
    out = p.probs
    for _ in range(k - 1):
        out = np.kron(out, p.probs)
    return Pmf.normalized(out)
