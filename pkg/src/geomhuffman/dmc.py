"""Discrete memoryless channels: mutual information, capacity via
alternating maximization, the divergence penalty bound, and block-extension
optimization with :func:`geomhuffman.approximators.ghc`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .approximators import ghc
from .dyadic import CodeLengths, DyadicPmf
from .errors import ConvergenceError, DimensionMismatchError, GuardExceededError, SupportConditionError
from .pmf import PRODUCT_CAP, Pmf, kl_divergence, product_pmf

COLUMN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DmcSpec:
    """Transition matrix h with n output rows and m input columns.

    h[j, i] = P(output j | input i); every column sums to 1.
    """

    h: np.ndarray

    def __post_init__(self):
        arr = np.array(self.h, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("transition matrix must be 2-dimensional")
        n, m = arr.shape
        if n < 1 or m < 2:
            raise ValueError("need at least 1 output and 2 inputs")
        if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
            raise ValueError("transition probabilities must lie in [0, 1]")
        sums = arr.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1.0) > COLUMN_TOL)
        if bad.size:
            raise ValueError(
                f"column {bad[0]} sums to {float(sums[bad[0]])!r}, expected 1 within {COLUMN_TOL}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "h", arr)

    @property
    def n(self) -> int:
        return int(self.h.shape[0])

    @property
    def m(self) -> int:
        return int(self.h.shape[1])


@dataclass(frozen=True, eq=False)
class CapacityResult:
    """Capacity estimate in bits/use with the maximizing input PMF and the
    solver's final upper/lower gap."""

    C: float
    p_star: Pmf
    achieved_tol: float


@dataclass(frozen=True, eq=False)
class BlockDmcReport:
    """Result of dyadic-input optimization on the k-fold product channel."""

    block: int
    capacity: float
    achieved_tol: float
    p_star: Pmf
    lengths: CodeLengths
    kl_bits: float
    d_over_k: float
    per_use_mi: float
    per_use_bound: float


def _check_dims(dmc: DmcSpec, p: Pmf):
    if p.m != dmc.m:
        raise DimensionMismatchError(
            f"PMF has {p.m} entries but channel has {dmc.m} inputs"
        )


def output_pmf(dmc: DmcSpec, p: Pmf) -> Pmf:
    """Output PMF r = h p."""
    _check_dims(dmc, p)
    return Pmf.normalized(dmc.h @ p.probs)


def _per_input_divergence(h: np.ndarray, r: np.ndarray) -> np.ndarray:
    """D_i = sum_j h_ji log2(h_ji / r_j) for each input i, in bits.

    Terms with h_ji = 0 contribute 0; h_ji > 0 with r_j = 0 yields +inf.
    """
    mask = h > 0.0
    lg = np.zeros_like(h)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = h / r[:, None]
        np.log2(ratio, out=lg, where=mask)
    terms = np.where(mask, h * lg, 0.0)
    return terms.sum(axis=0)


def mutual_information(dmc: DmcSpec, p: Pmf) -> float:
    """I(p) = sum_i p_i sum_j h_ji log2(h_ji / r_j), in bits per use."""
    _check_dims(dmc, p)
    r = dmc.h @ p.probs
    div = _per_input_divergence(dmc.h, r)
    live = p.probs > 0.0
    return float(p.probs[live] @ div[live])


def blahut_arimoto(dmc: DmcSpec, tol: float = 1e-9, max_iter: int = 100_000) -> CapacityResult:
    """Capacity and capacity-achieving PMF by alternating maximization.

    Starts from the uniform input PMF (deterministic) and stops when the
    standard gap max_i D_i - sum_i p_i D_i drops below tol; that gap
    brackets the true capacity from above and below.  Raises
    ConvergenceError (carrying the best iterate) if max_iter is hit first.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    h = dmc.h
    p = np.full(dmc.m, 1.0 / dmc.m)
    result = None
    for _ in range(max_iter):
        r = h @ p
        div = _per_input_divergence(h, r)
        live = p > 0.0
        lower = float(p[live] @ div[live])
        gap = float(div.max() - lower)
        result = CapacityResult(C=lower, p_star=Pmf.normalized(p), achieved_tol=gap)
        if gap <= tol:
            return result
        top = float(div[live].max())
        if not np.isfinite(top):
            raise ConvergenceError(
                "capacity solver hit numerical underflow", best=result
            )
        scaled = np.where(live, p * np.exp2(div - top), 0.0)
        p = scaled / scaled.sum()
    raise ConvergenceError(
        f"capacity solver did not reach tol={tol} within {max_iter} iterations "
        f"(gap {result.achieved_tol:.3e})",
        best=result,
    )


def kkt_check(dmc: DmcSpec, p_star: Pmf, tol: float) -> bool:
    """True iff the per-input divergences are equal (within tol) on the
    support of p_star and no larger than that common value elsewhere."""
    _check_dims(dmc, p_star)
    r = dmc.h @ p_star.probs
    div = _per_input_divergence(dmc.h, r)
    live = p_star.probs > tol
    if not np.any(live):
        return False
    ref = float(p_star.probs[live] @ div[live]) / float(p_star.probs[live].sum())
    if np.any(np.abs(div[live] - ref) > tol):
        return False
    rest = div[~live]
    return not np.any(rest > ref + tol)


def mi_lower_bound(C: float, p: Pmf, p_star: Pmf) -> float:
    """The guaranteed mutual information C - D(p || p*), in bits per use.

    Requires p_i = 0 wherever p*_i = 0; otherwise the bound does not apply
    and a SupportConditionError is raised.
    """
    if p.m != p_star.m:
        raise DimensionMismatchError("p and p_star differ in length")
    violating = np.flatnonzero((p.probs > 0.0) & (p_star.probs == 0.0))
    if violating.size:
        raise SupportConditionError(
            f"p has mass on symbol {violating[0]} where p_star is zero"
        )
    return C - kl_divergence(p, p_star)


def clamp_support(p: Pmf, threshold: float = 1e-12) -> Pmf:
    """Zero out entries below threshold and renormalize.

    Solver outputs are never exactly zero; clamping makes the support
    condition meaningful before handing the PMF to ghc.
    """
    arr = np.where(p.probs < threshold, 0.0, p.probs)
    return Pmf.normalized(arr)


def _block_mutual_information(h: np.ndarray, p_block: np.ndarray, k: int) -> float:
    """Exact mutual information of input PMF p_block on the k-fold product
    channel, without materializing the product transition matrix.

    Uses I = sum_i p_i sum_j H_ji log2 H_ji + H(r): the first term splits
    per coordinate because the product channel factorizes, and r is
    computed by contracting h along each tensor axis in turn.
    """
    n, m = h.shape
    mask = h > 0.0
    lg = np.zeros_like(h)
    np.log2(h, out=lg, where=mask)
    phi = np.where(mask, h * lg, 0.0).sum(axis=0)  # per-input -H(output|input)

    tensor = p_block.reshape((m,) * k)
    term1 = 0.0
    for axis in range(k):
        marginal = tensor.sum(axis=tuple(a for a in range(k) if a != axis))
        term1 += float(marginal @ phi)

    out = tensor
    for _ in range(k):
        # contract current axis 0 (an input) with h; output axis lands last
        out = np.tensordot(out, h, axes=([0], [1]))
    r = out.reshape(-1)
    rpos = r[r > 0.0]
    term2 = float(-(rpos * np.log2(rpos)).sum())
    return term1 + term2


def optimize_block_dmc(
    dmc: DmcSpec,
    k: int,
    tol: float = 1e-9,
    max_iter: int = 100_000,
    cap: int = PRODUCT_CAP,
) -> BlockDmcReport:
    """Best dyadic PMF for k consecutive channel uses.

    Solves for the capacity-achieving PMF, clamps near-zero entries, runs
    ghc on its k-fold product, and reports the exact per-use mutual
    information of the resulting (generally non-product) dyadic PMF along
    with the per-use penalty bound C - D/k.
    """
    if k < 1:
        raise ValueError("block length k must be >= 1")
    if max(dmc.m, dmc.n) ** k > cap:
        raise GuardExceededError(
            f"block channel would need {max(dmc.m, dmc.n) ** k} entries, cap is {cap}"
        )
    res = blahut_arimoto(dmc, tol=tol, max_iter=max_iter)
    p_star = clamp_support(res.p_star)
    target = product_pmf(p_star, k, cap=cap)
    code, d_total = ghc(target.probs)
    dyadic = DyadicPmf.from_code(code)
    mi = _block_mutual_information(dmc.h, dyadic.probs.probs, k)
    return BlockDmcReport(
        block=k,
        capacity=res.C,
        achieved_tol=res.achieved_tol,
        p_star=res.p_star,
        lengths=code,
        kl_bits=d_total,
        d_over_k=d_total / k,
        per_use_mi=mi / k,
        per_use_bound=res.C - d_total / k,
    )
