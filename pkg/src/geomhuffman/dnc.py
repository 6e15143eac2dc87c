"""Memoryless discrete noiseless channels.

Symbols carry positive weights (costs); the figure of merit is entropy per
average weight, in bits per unit weight.  Capacity comes from a one-line
root equation, and the best dyadic input PMF from a fixed-point iteration
whose inner step is :func:`geomhuffman.approximators.ghc` on a tilted
capacity-achieving PMF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approximators import ghc
from .dyadic import CodeLengths, DyadicPmf
from .errors import ConvergenceError, DimensionMismatchError
from .pmf import PRODUCT_CAP, NonNegVector, Pmf, entropy, product_pmf

ROOT_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DncSpec:
    """Positive symbol weights and the logarithm base of the capacity units."""

    w: np.ndarray
    b: float = 2.0

    def __post_init__(self):
        arr = np.array(self.w, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 2:
            raise ValueError("need at least 2 symbols")
        if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
            raise ValueError("weights must be positive")
        if not (self.b > 1.0):
            raise ValueError("log base must be > 1")
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @property
    def m(self) -> int:
        return int(self.w.size)


@dataclass(frozen=True, eq=False)
class DncCapacity:
    """Capacity in bits per unit weight, the PMF achieving it, and the
    residual of the defining root equation."""

    C: float
    p_star: Pmf
    root_residual: float


@dataclass(frozen=True, eq=False)
class LecResult:
    """Converged fixed point: achieved capacity fraction R, the dyadic code,
    its rate in bits per unit weight, and the iteration count."""

    R: float
    lengths: CodeLengths
    rate: float
    iterations: int


@dataclass(frozen=True, eq=False)
class BlockDncReport:
    """Dyadic optimization over blocks of k symbols."""

    block: int
    capacity: float
    lengths: CodeLengths
    kl_bits: float
    d_over_k: float
    rate: float
    lower_bound: float


def dnc_capacity(spec: DncSpec) -> DncCapacity:
    """Solve sum_i b**(-s w_i) = 1 for the unique positive root.

    The map is strictly decreasing from m > 1 at s = 0, so plain bisection
    on a doubled bracket is exact enough: 200 halvings collapse the bracket
    to adjacent floats.  The returned capacity is converted to bits per
    unit weight; p*_i = b**(-s w_i) follows from the root.
    """
    w = spec.w
    ln_b = math.log(spec.b)

    def f(s: float) -> float:
        return float(np.exp(-s * w * ln_b).sum())

    hi = 1.0
    for _ in range(200):
        if f(hi) < 1.0:
            break
        hi *= 2.0
    else:
        raise RuntimeError("could not bracket the capacity root")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    s = lo if abs(f(lo) - 1.0) <= abs(f(hi) - 1.0) else hi

    c_bits = s * math.log2(spec.b)
    p_star = np.exp2(-c_bits * w)
    residual = abs(math.fsum(p_star.tolist()) - 1.0)
    if residual > ROOT_RESIDUAL_TOL:
        raise RuntimeError(f"capacity root residual {residual:.3e} above tolerance")
    return DncCapacity(C=c_bits, p_star=Pmf(p_star), root_residual=residual)


def entropy_per_weight(p: Pmf, spec: DncSpec) -> float:
    """H(p) divided by the average weight, in bits per unit weight."""
    if p.m != spec.m:
        raise DimensionMismatchError(f"PMF has {p.m} entries, channel has {spec.m}")
    h = entropy(p)
    if h == 0.0:
        return 0.0
    return h / float(p.probs @ spec.w)


def weighted_target(p_star: Pmf, R: float) -> NonNegVector:
    """Elementwise p*_i ** R, the (unnormalized) target tilted by the
    achievable capacity fraction R."""
    if not 0.0 <= R <= 1.0:
        raise ValueError("R must lie in [0, 1]")
    return NonNegVector(np.power(p_star.probs, R))


def lec(spec: DncSpec, tol: float = 1e-12, max_iter: int = 1000) -> LecResult:
    """Fixed-point iteration for the dyadic PMF maximizing entropy per
    average weight.

    Starting from R = 1, each pass builds p = ghc(p*^R) and updates
    R = rate(p) / C.  The divergence D(p || p*^R), taken against the tilt
    that built p, equals (R_new - R) * C * average_weight, so it vanishes
    exactly at the fixed point; iteration stops when it falls below tol or
    when R stops moving (the |dR| fallback covers exact ties between
    distinct optimal codes).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    cap = dnc_capacity(spec)
    pstar = cap.p_star.probs

    R = 1.0
    last: "LecResult | None" = None
    for iteration in range(1, max_iter + 1):
        target = np.power(pstar, R)
        code, div = ghc(target)
        dyadic = DyadicPmf.from_code(code)
        rate = entropy_per_weight(dyadic.probs, spec)
        r_new = rate / cap.C
        last = LecResult(R=r_new, lengths=code, rate=rate, iterations=iteration)
        if div <= tol or abs(r_new - R) <= 1e-12:
            return last
        R = r_new
    raise ConvergenceError(
        f"LEC did not converge within {max_iter} iterations", best=last
    )


def optimize_block_dnc(spec: DncSpec, k: int, cap: int = PRODUCT_CAP) -> BlockDncReport:
    """Best dyadic PMF over blocks of k symbols.

    Block weights are sums of the component weights in lexicographic tuple
    order; they are never materialized, the average weight comes from the
    per-coordinate marginals of the block PMF.  The reported lower bound is
    C - D / (k * w_min).
    """
    if k < 1:
        raise ValueError("block length k must be >= 1")
    capacity = dnc_capacity(spec)
    target = product_pmf(capacity.p_star, k, cap=cap)
    code, d_total = ghc(target.probs)
    dyadic = DyadicPmf.from_code(code)

    m = spec.m
    tensor = dyadic.probs.probs.reshape((m,) * k)
    avg_weight = 0.0
    for axis in range(k):
        marginal = tensor.sum(axis=tuple(a for a in range(k) if a != axis))
        avg_weight += float(marginal @ spec.w)
    rate = entropy(dyadic.probs) / avg_weight

    w_min = float(spec.w.min())
    return BlockDncReport(
        block=k,
        capacity=capacity.C,
        lengths=code,
        kl_bits=d_total,
        d_over_k=d_total / k,
        rate=rate,
        lower_bound=capacity.C - d_total / (k * w_min),
    )
