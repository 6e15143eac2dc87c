"""Dyadic PMFs as codeword-length vectors, exact Kraft arithmetic, canonical
code trees, and the exhaustive minimum-divergence search used as a test
oracle.

A length vector with entries in {0, 1, 2, ...} u {inf} describes a full
prefix-free binary code: finite entries are leaf depths, inf marks a symbol
that was dropped (probability 0).  Fullness means the Kraft sum over finite
entries equals 1 exactly, which is verified here with integer arithmetic
rather than floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GuardExceededError
from .pmf import Pmf, as_weights

INF = math.inf

MAX_CODEWORD_LEN = 64  # default cap for standalone kraft_sum calls
MAX_TREE_LEN = 1024    # hard cap on finite lengths (2.0**-l stays exact well below this)
ENUM_MAX_SYMBOLS = 12
ENUM_MAX_DEPTH = 12


@dataclass(frozen=True)
class KraftSum:
    """Exact dyadic rational numerator / 2**exponent, kept reduced."""

    numerator: int
    exponent: int

    @classmethod
    def zero(cls) -> "KraftSum":
        return cls(0, 0)

    def plus_pow2(self, length: int) -> "KraftSum":
        """Return self + 2**(-length), exactly."""
        num, exp = self.numerator, self.exponent
        if length >= exp:
            num = (num << (length - exp)) + 1
            exp = length
        else:
            num = num + (1 << (exp - length))
        while num and num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        if num == 0:
            exp = 0
        return KraftSum(num, exp)

    @property
    def is_one(self) -> bool:
        return self.numerator == 1 and self.exponent == 0

    @property
    def exceeds_one(self) -> bool:
        return self.numerator > (1 << self.exponent)

    @property
    def value(self) -> float:
        return self.numerator / (1 << self.exponent)

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.exponent}"


def _check_length(entry) -> "int | float":
    if entry == INF:
        return INF
    if isinstance(entry, bool):
        raise ValueError("lengths must be integers or inf")
    if isinstance(entry, float):
        if not entry.is_integer():
            raise ValueError(f"length {entry!r} is not an integer or inf")
        entry = int(entry)
    if not isinstance(entry, (int, np.integer)):
        raise ValueError(f"length {entry!r} is not an integer or inf")
    if entry < 0:
        raise ValueError("lengths must be nonnegative")
    return int(entry)


def kraft_sum(lengths: Iterable, max_len: int = MAX_CODEWORD_LEN) -> KraftSum:
    """Exact sum of 2**(-l) over the finite entries of a length vector."""
    total = KraftSum.zero()
    for raw in lengths:
        entry = _check_length(raw)
        if entry == INF:
            continue
        if entry > max_len:
            raise GuardExceededError(f"length {entry} exceeds cap {max_len}")
        total = total.plus_pow2(entry)
    return total


@dataclass(frozen=True)
class CodeLengths:
    """Codeword-length vector of a full prefix-free code.

    Finite entries are nonnegative integers; inf marks dropped symbols.
    Construction verifies exact Kraft equality over the finite entries.
    """

    lengths: tuple

    def __post_init__(self):
        entries = tuple(_check_length(e) for e in self.lengths)
        if not entries:
            raise ValueError("empty length vector")
        finite = [e for e in entries if e != INF]
        if not finite:
            raise ValueError("need at least one finite length")
        total = kraft_sum(finite, max_len=MAX_TREE_LEN)
        if not total.is_one:
            raise ValueError(
                f"lengths {entries} have Kraft sum {total}, expected exactly 1"
            )
        object.__setattr__(self, "lengths", entries)

    @property
    def m(self) -> int:
        return len(self.lengths)

    @property
    def finite_count(self) -> int:
        return sum(1 for e in self.lengths if e != INF)

    def __iter__(self):
        return iter(self.lengths)

    def __getitem__(self, i):
        return self.lengths[i]

    def kept_symbols(self) -> list:
        return [i for i, e in enumerate(self.lengths) if e != INF]


@dataclass(frozen=True, eq=False)
class DyadicPmf:
    """A CodeLengths together with the PMF it induces, p_i = 2**(-l_i).

    Every finite 2**(-l) is exact in binary floating point and the total is
    verified to equal 1.0 exactly (fsum of exact dyadics rounds exactly).
    """

    code: CodeLengths
    probs: Pmf

    @classmethod
    def from_code(cls, code: CodeLengths) -> "DyadicPmf":
        arr = np.array(
            [0.0 if e == INF else 2.0 ** -e for e in code.lengths], dtype=np.float64
        )
        if math.fsum(arr.tolist()) != 1.0:
            raise ValueError("induced dyadic probabilities do not sum to exactly 1")
        return cls(code, Pmf(arr))


def canonical_codewords(code: CodeLengths) -> tuple:
    """Per-symbol codeword strings (None for dropped symbols).

    Symbols sorted by (length, original index) receive codewords of
    increasing binary value; Kraft equality makes the assignment exact.
    """
    order = sorted(code.kept_symbols(), key=lambda i: (code[i], i))
    words: list = [None] * code.m
    val = 0
    prev_len = None
    for sym in order:
        length = int(code[sym])
        if prev_len is None:
            val = 0
        else:
            val = (val + 1) << (length - prev_len)
        words[sym] = format(val, f"0{length}b") if length > 0 else ""
        prev_len = length
    return tuple(words)


@dataclass(frozen=True, eq=False)
class CodeTree:
    """Full binary code tree with a leaf-to-symbol map.

    ``children[node]`` is a (zero-child, one-child) pair; child values >= 0
    are internal node ids, values < 0 encode leaves as -(symbol + 1).
    ``root`` is 0 except for single-leaf trees, where it is the leaf code.
    """

    lengths: CodeLengths
    codewords: tuple
    children: tuple
    root: int

    @classmethod
    def from_codewords(cls, codewords: Sequence) -> "CodeTree":
        kept = [(i, w) for i, w in enumerate(codewords) if w is not None]
        if not kept:
            raise ValueError("no codewords given")
        if len(kept) == 1 and kept[0][1] == "":
            sym = kept[0][0]
            lengths = [INF] * len(codewords)
            lengths[sym] = 0
            return cls(CodeLengths(tuple(lengths)), tuple(codewords), (), -(sym + 1))

        children: list = [[None, None]]
        for sym, word in kept:
            if not word or any(c not in "01" for c in word):
                raise ValueError(f"codeword for symbol {sym} is not a nonempty bit string")
            node = 0
            for pos, c in enumerate(word):
                bit = int(c)
                child = children[node][bit]
                last = pos == len(word) - 1
                if last:
                    if child is not None:
                        raise ValueError(f"codeword for symbol {sym} conflicts with another")
                    children[node][bit] = -(sym + 1)
                else:
                    if child is None:
                        child = len(children)
                        children.append([None, None])
                        children[node][bit] = child
                    elif child < 0:
                        raise ValueError(f"codeword for symbol {sym} extends a shorter codeword")
                    node = child
        for node, (lo, hi) in enumerate(children):
            if lo is None or hi is None:
                raise ValueError("codewords do not form a full tree (Kraft sum below 1)")

        lengths = [INF] * len(codewords)
        for sym, word in kept:
            lengths[sym] = len(word)
        return cls(
            CodeLengths(tuple(lengths)),
            tuple(codewords),
            tuple((lo, hi) for lo, hi in children),
            0,
        )

    @property
    def n_leaves(self) -> int:
        return self.lengths.finite_count

    @property
    def is_single_leaf(self) -> bool:
        return self.root < 0


def canonical_tree(code: CodeLengths) -> CodeTree:
    """Deterministic code tree with canonical codeword assignment."""
    return CodeTree.from_codewords(canonical_codewords(code))


def codebook_text(tree: CodeTree) -> str:
    """Newline-delimited ``symbol_index<TAB>codeword_bits`` rows, kept symbols only."""
    rows = [
        f"{i}\t{w}" for i, w in enumerate(tree.codewords) if w is not None
    ]
    return "\n".join(rows) + "\n"


def parse_codebook(text: str) -> CodeTree:
    """Inverse of :func:`codebook_text`; accepts any full prefix-free codebook."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"codebook line {lineno}: expected 'index<TAB>bits'")
        try:
            sym = int(parts[0])
        except ValueError:
            raise ValueError(f"codebook line {lineno}: bad symbol index {parts[0]!r}") from None
        if sym < 0 or sym in entries:
            raise ValueError(f"codebook line {lineno}: bad or duplicate symbol {sym}")
        entries[sym] = parts[1]
    if not entries:
        raise ValueError("codebook is empty")
    m = max(entries) + 1
    words: list = [None] * m
    for sym, bits in entries.items():
        words[sym] = bits
    return CodeTree.from_codewords(words)


def enumerate_full_codes(m: int, l_max: int) -> Iterator[tuple]:
    """Yield every non-decreasing length multiset of a full code with at most
    m leaves and depth at most l_max, each exactly once, in lexicographic
    order.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    if m > ENUM_MAX_SYMBOLS or l_max > ENUM_MAX_DEPTH:
        raise GuardExceededError(
            f"enumeration guard: m <= {ENUM_MAX_SYMBOLS} and l_max <= {ENUM_MAX_DEPTH}"
        )

    def gen(remaining: int, min_len: int, slots: int):
        # remaining is the Kraft deficit in units of 2**(-l_max)
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for length in range(min_len, l_max + 1):
            piece = 1 << (l_max - length)
            if piece > remaining:
                continue
            if piece * slots < remaining:
                break  # larger lengths are even smaller; nothing can fill the gap
            for rest in gen(remaining - piece, length, slots - 1):
                yield (length,) + rest

    yield from gen(1 << l_max, 0, m)


@lru_cache(maxsize=None)
def _codes_table(m: int, l_max: int) -> tuple:
    return tuple(enumerate_full_codes(m, l_max))


def _descending_order(arr: np.ndarray) -> np.ndarray:
    # stable sort, descending by value, ties by original index
    return np.argsort(-arr, kind="stable")


def _multiset_divergence(multiset: tuple, xs_sorted: np.ndarray, log2_xs: np.ndarray) -> float:
    terms = []
    for j, length in enumerate(multiset):
        if xs_sorted[j] == 0.0:
            return INF
        terms.append(2.0 ** -length * (-length - log2_xs[j]))
    return math.fsum(terms)


def brute_force_min_kl(x, l_max: "int | None" = None, tie_tol: float = 1e-12):
    """Exact minimizer of D(p || x) over all dyadic PMFs of depth <= l_max.

    Enumerates every full-code length multiset and assigns sorted lengths to
    the sorted weights (an optimal code never gives a larger weight a longer
    codeword).  Ties are broken by the lexicographically smallest
    non-decreasing length vector.  Returns (CodeLengths, divergence_bits).

    The default depth cap l_max = m - 1 is exhaustive: a full binary tree
    with at most m leaves has depth at most m - 1.
    """
    arr = as_weights(x)
    m = arr.size
    if np.any(arr < 0.0):
        raise ValueError("weights must be nonnegative")
    if not np.any(arr > 0.0):
        raise ValueError("need at least one positive weight")
    if l_max is None:
        l_max = max(m - 1, 0)
    if m > ENUM_MAX_SYMBOLS or l_max > ENUM_MAX_DEPTH:
        raise GuardExceededError(
            f"oracle guard: m <= {ENUM_MAX_SYMBOLS} and l_max <= {ENUM_MAX_DEPTH}"
        )

    order = _descending_order(arr)
    xs = arr[order]
    with np.errstate(divide="ignore"):
        log2_xs = np.log2(xs)

    best_d = INF
    best_ms = None
    for ms in _codes_table(m, l_max):
        d = _multiset_divergence(ms, xs, log2_xs)
        if best_ms is None or d < best_d - tie_tol:
            best_d, best_ms = d, ms
        elif d <= best_d + tie_tol and ms < best_ms:
            best_ms = ms
            best_d = min(best_d, d)

    lengths = [INF] * m
    for j, length in enumerate(best_ms):
        lengths[int(order[j])] = length
    code = CodeLengths(tuple(lengths))
    return code, best_d


def brute_force_optima(x, l_max: "int | None" = None, tie_tol: float = 1e-12) -> list:
    """All optimal length multisets within tie_tol of the minimum divergence."""
    arr = as_weights(x)
    m = arr.size
    if l_max is None:
        l_max = max(m - 1, 0)
    if m > ENUM_MAX_SYMBOLS or l_max > ENUM_MAX_DEPTH:
        raise GuardExceededError(
            f"oracle guard: m <= {ENUM_MAX_SYMBOLS} and l_max <= {ENUM_MAX_DEPTH}"
        )
    order = _descending_order(arr)
    xs = arr[order]
    with np.errstate(divide="ignore"):
        log2_xs = np.log2(xs)
    table = _codes_table(m, l_max)
    divs = [_multiset_divergence(ms, xs, log2_xs) for ms in table]
    best = min(divs)
    return [ms for ms, d in zip(table, divs) if d <= best + tie_tol]
