"""Dyadic approximation algorithms.

Three ways to turn a nonnegative weight vector (typically a PMF) into a
dyadic PMF given by codeword lengths:

* :func:`ghc` - bottom-up tree construction with a geometric-mean merge
  rule; minimizes D(p || x) over all dyadic PMFs and may drop symbols.
* :func:`huffman` - classical Huffman coding, included as the comparison
  baseline; it minimizes D(x || p), not D(p || x), and never drops symbols.
* :func:`gcc` - greedy floor-of-log length assignment truncated at exact
  Kraft equality; guarantees D(p || q) <= 1 bit for any PMF q.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .dyadic import INF, CodeLengths, DyadicPmf, KraftSum
from .pmf import Pmf, as_weights, kl_divergence


@dataclass(frozen=True, eq=False)
class LogWeights:
    """Weights in the log domain: u_i = -log2(x_i), sorted ascending.

    ``perm[rank]`` maps sorted positions back to original symbol indices;
    zero weights become +inf and sort last.  The merge decisions below
    depend only on differences of u, which keeps very small weights (for
    instance entries of long product PMFs) numerically workable.
    """

    u: np.ndarray
    perm: np.ndarray

    @classmethod
    def from_vector(cls, x) -> "LogWeights":
        arr = as_weights(x)
        if np.any(arr < 0.0):
            raise ValueError("weights must be nonnegative")
        with np.errstate(divide="ignore"):
            u = np.where(arr > 0.0, -np.log2(np.where(arr > 0.0, arr, 1.0)), np.inf)
        perm = np.argsort(u, kind="stable")
        out_u = u[perm]
        out_u.setflags(write=False)
        perm.setflags(write=False)
        return cls(out_u, perm)


def _assign_depths(kids, syms, root: int, m: int) -> list:
    lengths = [INF] * m
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if kids[node] is None:
            lengths[syms[node]] = depth
        else:
            a, b = kids[node]
            stack.append((a, depth + 1))
            stack.append((b, depth + 1))
    return lengths


def ghc(x) -> tuple:
    """Minimize D(p || x) in bits over all dyadic PMFs p.

    Works on u_i = -log2(x_i).  Repeatedly takes the two largest u (the two
    smallest weights) u_a >= u_b and either

    * drops the u_a node entirely when u_b <= u_a - 2 (the second-smallest
      weight is at least four times the smallest), or
    * merges them into a parent with u' = (u_a + u_b)/2 - 1, the log-domain
      form of replacing the pair by twice their geometric mean.

    A merged parent satisfies u' < u_b, so it can overtake other pending
    nodes; a priority queue handles that (a two-queue Huffman scan would
    not).  Dropped nodes may be whole subtrees; every leaf beneath one gets
    length inf.  Among equal u the lower original symbol index ends up with
    the shorter (or equal) codeword, which keeps outputs deterministic.

    Returns (CodeLengths in original symbol order, divergence in bits).
    Zero-weight symbols always get length inf.
    """
    arr = as_weights(x)
    lw = LogWeights.from_vector(arr)
    finite = int(np.isfinite(lw.u).sum())
    if finite == 0:
        raise ValueError("need at least one positive weight")
    m = int(arr.size)

    us: list = []
    ties: list = []
    kids: list = []
    syms: list = []
    heap = []
    for rank in range(finite):
        sym = int(lw.perm[rank])
        us.append(float(lw.u[rank]))
        ties.append(sym)
        kids.append(None)
        syms.append(sym)
        # pop order: largest u first; among equal u the higher index pops
        # first (gets merged deeper), so the lower index wins
        heap.append((-us[rank], -sym, rank))
    heapq.heapify(heap)

    while len(heap) >= 2:
        _, _, a = heapq.heappop(heap)
        entry_b = heapq.heappop(heap)
        b = entry_b[2]
        ua, ub = us[a], us[b]
        if ub <= ua - 2.0:
            heapq.heappush(heap, entry_b)  # drop node a outright
            continue
        uc = 0.5 * (ua + ub) - 1.0
        c = len(us)
        us.append(uc)
        ties.append(min(ties[a], ties[b]))
        kids.append((a, b))
        syms.append(-1)
        heapq.heappush(heap, (-uc, -ties[c], c))

    root = heap[0][2]
    code = CodeLengths(tuple(_assign_depths(kids, syms, root, m)))
    dyadic = DyadicPmf.from_code(code)
    return code, kl_divergence(dyadic.probs, arr)


def huffman(x) -> tuple:
    """Classical Huffman lengths for weight vector x, merging the two
    smallest weights into their sum.  No symbol is dropped.

    The reported divergence is D(p || x) for the induced dyadic p, for
    comparison with :func:`ghc`; it is not the quantity Huffman coding
    minimizes and is +inf when x contains zeros.
    """
    arr = as_weights(x)
    if np.any(arr < 0.0):
        raise ValueError("weights must be nonnegative")
    if int((arr > 0.0).sum()) < 2:
        raise ValueError("Huffman coding needs at least 2 positive weights")
    m = int(arr.size)

    ws: list = []
    ties: list = []
    kids: list = []
    syms: list = []
    heap = []
    for sym in range(m):
        ws.append(float(arr[sym]))
        ties.append(sym)
        kids.append(None)
        syms.append(sym)
        heap.append((ws[sym], -sym, sym))
    heapq.heapify(heap)

    while len(heap) >= 2:
        _, _, a = heapq.heappop(heap)
        _, _, b = heapq.heappop(heap)
        c = len(ws)
        ws.append(ws[a] + ws[b])
        ties.append(min(ties[a], ties[b]))
        kids.append((a, b))
        syms.append(-1)
        heapq.heappush(heap, (ws[c], -ties[c], c))

    root = heap[0][2]
    code = CodeLengths(tuple(_assign_depths(kids, syms, root, m)))
    dyadic = DyadicPmf.from_code(code)
    return code, kl_divergence(dyadic.probs, arr)


def _floor_neg_log2(q: float) -> int:
    # floor(-log2 q) via frexp: q = mant * 2**e with mant in [0.5, 1),
    # so -log2 q lies in (-e, -e + 1], integer exactly when mant == 0.5.
    mant, e = math.frexp(q)
    length = (1 - e) if mant == 0.5 else -e
    return max(length, 0)


def gcc(q: Pmf) -> tuple:
    """Greedy floor-of-log dyadic approximation of a PMF.

    Sorts q descending, assigns l_i = floor(-log2 q_i) until the running
    Kraft sum hits exactly 1 at some index k, and drops everything after.
    The accumulation uses exact integer arithmetic: the running deficit is
    always an integer multiple of the next term, so the sum can never skip
    over 1, and a floating comparison would mis-terminate for large m.

    Every kept probability satisfies 2**(-l_i) >= q_i, which bounds the
    divergence by 1 bit.  Returns (CodeLengths in original order, D bits).
    """
    arr = q.probs
    m = q.m
    order = np.argsort(-arr, kind="stable")
    lengths = [INF] * m
    total = KraftSum.zero()
    done = False
    for idx in order:
        value = float(arr[idx])
        if value <= 0.0:
            break
        length = _floor_neg_log2(value)
        total = total.plus_pow2(length)
        if total.exceeds_one:
            raise RuntimeError(
                "internal consistency error: greedy Kraft sum overshot 1"
            )
        lengths[int(idx)] = length
        if total.is_one:
            done = True
            break
    if not done:
        raise RuntimeError(
            "internal consistency error: exact Kraft equality never reached"
        )
    code = CodeLengths(tuple(lengths))
    dyadic = DyadicPmf.from_code(code)
    return code, kl_divergence(dyadic.probs, arr)
