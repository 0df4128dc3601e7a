"""Empirical types, Hamming geometry, and strong typicality.

The conventions used throughout the package:

* The empirical type of a word is its letter-frequency vector, kept as exact
  integer counts. All typicality tests compare scaled counts, never ratios,
  so integer arithmetic decides membership and float ties cannot flip a
  decision for block lengths up to about 1e4.

* A pair (x, y) is delta-typical for a joint pmf p when every entry satisfies
  |N(a,b) - n*p(a,b)| <= n*delta, with the exact support condition N(a,b) = 0
  wherever p(a,b) = 0. This "strong" notion is what the decoder uses; weak
  (entropy-based) typicality is deliberately not implemented.

* Hamming spheres use the strict inequality d(x, y) < n*eps, except that a
  zero-radius sphere is the center alone. The matching separation rule used
  by codebook constructions keeps words at distance >= ceil(n*eps).

The conditional typical set of a word x is the set of outputs y such that
(x, y) is jointly typical for type(x) x W. Its cardinality, and the overlap
between two such sets, are computed by exact enumeration guarded by an
explicit budget; both quantities drive the error-exponent diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetError, DegenerateTypicalitySetError

# Sequences y^n are enumerated only when |Y|^n stays at or below this.
DEFAULT_ENUMERATION_BUDGET = 2**24

# Additive guard absorbing float dust in products like n*delta and counts*W;
# deviations are integer-valued so anything far below 0.5 is safe.
_TIE_GUARD = 1e-9


@dataclass(frozen=True)
class EmpiricalType:
    """Letter counts of a word; counts sum to the block length n.

    n = 0 (empty word) is allowed so types can be built incrementally; pmf()
    requires n >= 1.
    """

    counts: tuple[int, ...]
    n: int

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("negative count")
        if sum(self.counts) != self.n:
            raise ValueError("counts do not sum to n")

    @property
    def alphabet_size(self) -> int:
        return len(self.counts)

    def pmf(self) -> np.ndarray:
        if self.n == 0:
            raise ValueError("empty type has no pmf")
        return np.asarray(self.counts, dtype=float) / self.n


@dataclass(frozen=True)
class JointType:
    """Joint letter counts of a word pair; entries sum to n."""

    counts: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        total = 0
        for row in self.counts:
            for c in row:
                if c < 0:
                    raise ValueError("negative count")
                total += c
        if total != self.n:
            raise ValueError("counts do not sum to n")

    def input_marginal(self) -> EmpiricalType:
        return EmpiricalType(tuple(sum(row) for row in self.counts), self.n)

    def output_marginal(self) -> EmpiricalType:
        cols = tuple(sum(row[b] for row in self.counts) for b in range(len(self.counts[0])))
        return EmpiricalType(cols, self.n)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)


@dataclass(frozen=True)
class TypicalityParams:
    """Strong-typicality tolerance; delta is a per-entry additive slack."""

    delta: float

    def __post_init__(self):
        if not self.delta >= 0.0:
            raise ValueError("delta must be nonnegative")


def _as_word(seq: Sequence[int] | np.ndarray, alphabet_size: int, name: str) -> np.ndarray:
    word = np.asarray(seq, dtype=np.int64)
    if word.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if word.size and (word.min() < 0 or word.max() >= alphabet_size):
        raise ValueError(f"{name} contains a letter outside [0, {alphabet_size})")
    return word


def empirical_type(sequence: Sequence[int] | np.ndarray, alphabet_size: int) -> EmpiricalType:
    """Exact letter counts of ``sequence`` over the alphabet {0..alphabet_size-1}."""
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    word = _as_word(sequence, alphabet_size, "sequence")
    counts = np.bincount(word, minlength=alphabet_size)
    return EmpiricalType(tuple(int(c) for c in counts), int(word.size))


def joint_type(
    x: Sequence[int] | np.ndarray,
    y: Sequence[int] | np.ndarray,
    input_size: int,
    output_size: int,
) -> JointType:
    """Joint counts N(a, b) of the aligned pair (x, y)."""
    xa = _as_word(x, input_size, "x")
    ya = _as_word(y, output_size, "y")
    if xa.size != ya.size:
        raise ValueError("x and y have different lengths")
    flat = np.bincount(xa * output_size + ya, minlength=input_size * output_size)
    mat = flat.reshape(input_size, output_size)
    return JointType(tuple(tuple(int(c) for c in row) for row in mat), int(xa.size))


def hamming_distance(a: Sequence[int] | np.ndarray, b: Sequence[int] | np.ndarray) -> int:
    aa = np.asarray(a)
    bb = np.asarray(b)
    if aa.shape != bb.shape or aa.ndim != 1:
        raise ValueError("words must be one-dimensional and of equal length")
    return int(np.count_nonzero(aa != bb))


def distance_threshold(n: int, epsilon: float) -> int:
    """Smallest admissible separation ceil(n*eps), robust to float dust.

    Words strictly closer than this are "too close": they fall inside each
    other's open Hamming sphere of radius n*eps.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return max(0, math.ceil(n * epsilon - _TIE_GUARD))


def hamming_sphere_size_exact(n: int, epsilon: float, alphabet_size: int) -> int:
    """Exact size of {y : d(x, y) < n*eps} around any center x.

    The zero-radius sphere is the center alone (size 1).
    """
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    thr = distance_threshold(n, epsilon)
    if thr == 0:
        return 1
    q = alphabet_size
    return sum(math.comb(n, d) * (q - 1) ** d for d in range(thr))


def hamming_sphere_size_bound(n: int, epsilon: float, alphabet_size: int) -> float:
    """log2 of the counting bound C(n, floor(n*eps)) * |X|^floor(n*eps).

    The exact sphere size never exceeds this for eps in [0, 1].
    """
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    k = int(math.floor(n * epsilon + _TIE_GUARD))
    k = min(k, n)
    return math.log2(math.comb(n, k)) + k * math.log2(alphabet_size)


def binary_entropy(p: float) -> float:
    """H2(p) in bits, with the 0 log 0 = 0 convention."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def sphere_exponent(epsilon: float, alphabet_size: int) -> float:
    """Per-symbol exponent H2(eps) + eps*log2(|X|) of the sphere-size bound.

    For eps <= 1/2 the log2 sphere bound is at most n times this value.
    """
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    return binary_entropy(epsilon) + epsilon * math.log2(alphabet_size)


def type_class_size(et: EmpiricalType) -> int:
    """Number of words with exactly these counts (multinomial coefficient)."""
    total = 1
    remaining = et.n
    for c in et.counts:
        total *= math.comb(remaining, c)
        remaining -= c
    return total


def canonical_word(et: EmpiricalType) -> np.ndarray:
    """The sorted representative of a type class: letters in ascending runs."""
    return np.repeat(np.arange(et.alphabet_size, dtype=np.int64), et.counts)


def enumerate_type_class(et: EmpiricalType) -> Iterator[tuple[int, ...]]:
    """Yield every word of the class in lexicographic order. Small n only."""

    def rec(prefix: list[int], counts: list[int], remaining: int):
        if remaining == 0:
            yield tuple(prefix)
            return
        for a in range(len(counts)):
            if counts[a] == 0:
                continue
            counts[a] -= 1
            prefix.append(a)
            yield from rec(prefix, counts, remaining - 1)
            prefix.pop()
            counts[a] += 1

    yield from rec([], list(et.counts), et.n)


def sample_type_class(et: EmpiricalType, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` words i.i.d. uniformly from the type class.

    Uniformity comes from independently shuffling the canonical multiset word.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    base = canonical_word(et)
    words = np.tile(base, (count, 1)) if count else np.empty((0, et.n), dtype=np.int64)
    if count:
        words = rng.permuted(words, axis=1)
    return words


def pairwise_hamming(words: np.ndarray, alphabet_size: int) -> np.ndarray:
    """All pairwise Hamming distances of the rows of ``words``.

    Computed as n minus the sum of per-letter indicator Gram matrices; exact
    because every product is a small integer. Memory is O(M^2).
    """
    w = np.asarray(words, dtype=np.int64)
    if w.ndim != 2:
        raise ValueError("words must be a 2-D array")
    m, n = w.shape
    agree = np.zeros((m, m), dtype=np.float64)
    for a in range(alphabet_size):
        ind = (w == a).astype(np.float64)
        agree += ind @ ind.T
    return (n - agree).astype(np.int64)


def _joint_counts_ok(counts: np.ndarray, targets: np.ndarray, ndelta: float) -> bool:
    """Shared typicality kernel: scaled-count box plus exact support condition."""
    zero = targets == 0.0
    if np.any(counts[zero] != 0):
        return False
    return bool(np.all(np.abs(counts - targets) <= ndelta + _TIE_GUARD))


def is_jointly_typical(
    x: Sequence[int] | np.ndarray,
    y: Sequence[int] | np.ndarray,
    joint_pmf: np.ndarray,
    params: TypicalityParams,
) -> bool:
    """Strong joint typicality of (x, y) with respect to ``joint_pmf``."""
    p = np.asarray(joint_pmf, dtype=float)
    if p.ndim != 2:
        raise ValueError("joint_pmf must be a matrix")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("joint_pmf must be a probability matrix")
    jt = joint_type(x, y, p.shape[0], p.shape[1])
    n = jt.n
    return _joint_counts_ok(jt.matrix().astype(float), n * p, n * params.delta)


def _conditional_targets(word: np.ndarray, channel_matrix: np.ndarray) -> np.ndarray:
    """n * p(a,b) for p = type(word) x W, computed as counts[a] * W[a, b]."""
    counts = np.bincount(word, minlength=channel_matrix.shape[0]).astype(float)
    return counts[:, None] * channel_matrix


def enumerate_conditional_typical(
    x: Sequence[int] | np.ndarray,
    channel_matrix: np.ndarray,
    params: TypicalityParams,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> set[tuple[int, ...]]:
    """Exact set of outputs jointly typical with ``x`` for type(x) x W.

    Enumerates all |Y|^n output words (blockwise, vectorized); raises
    BudgetError when |Y|^n exceeds ``budget``.
    """
    w = np.asarray(channel_matrix, dtype=float)
    if w.ndim != 2:
        raise ValueError("channel_matrix must be a matrix")
    word = _as_word(x, w.shape[0], "x")
    n = word.size
    out_size = w.shape[1]
    total = out_size**n
    if total > budget:
        raise BudgetError(
            f"enumeration budget {budget} exceeded: |Y|^n = {out_size}^{n} = {total}"
        )

    targets = _conditional_targets(word, w)
    ndelta = n * params.delta
    zero_mask = targets == 0.0
    positions = [np.flatnonzero(word == a) for a in range(w.shape[0])]

    pows = out_size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    accepted: list[np.ndarray] = []
    block = 1 << 16
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.int64)
        digits = (idx[:, None] // pows) % out_size
        ok = np.ones(idx.size, dtype=bool)
        for a in range(w.shape[0]):
            if positions[a].size == 0:
                continue
            sub = digits[:, positions[a]]
            for b in range(out_size):
                cnt = (sub == b).sum(axis=1)
                t = targets[a, b]
                if zero_mask[a, b]:
                    ok &= cnt == 0
                else:
                    ok &= np.abs(cnt - t) <= ndelta + _TIE_GUARD
        # letters of x that never occur force N(a, b) = 0, which holds trivially
        if np.any(ok):
            accepted.append(digits[ok])
    if not accepted:
        return set()
    stacked = np.concatenate(accepted, axis=0)
    return {tuple(int(v) for v in row) for row in stacked}


def intersection_ratio(
    x1: Sequence[int] | np.ndarray,
    x2: Sequence[int] | np.ndarray,
    channel_matrix: np.ndarray,
    params: TypicalityParams,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> float:
    """|G(x1) ∩ G(x2)| / |G(x1)| for conditional typical sets G.

    Both words must share one empirical type, which also makes the ratio
    symmetric in its arguments.
    """
    w = np.asarray(channel_matrix, dtype=float)
    t1 = empirical_type(x1, w.shape[0])
    t2 = empirical_type(x2, w.shape[0])
    if t1 != t2:
        raise ValueError("x1 and x2 must have the same empirical type")
    g1 = enumerate_conditional_typical(x1, w, params, budget)
    if not g1:
        raise DegenerateTypicalitySetError(
            "conditional typical set of x1 is empty; increase delta"
        )
    g2 = enumerate_conditional_typical(x2, w, params, budget)
    return len(g1 & g2) / len(g1)


def apportion_counts(pmf: Sequence[float] | np.ndarray, n: int) -> EmpiricalType:
    """Nearest n-type to ``pmf`` by largest-remainder apportionment.

    Floors n*p and hands the leftover units to the largest fractional parts,
    ties going to the lowest letter index.
    """
    p = np.asarray(pmf, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
        raise ValueError("pmf must be a probability vector")
    if n < 0:
        raise ValueError("n must be nonnegative")
    scaled = n * p
    counts = np.floor(scaled + _TIE_GUARD).astype(np.int64)
    short = n - int(counts.sum())
    if short < 0:
        # the tie guard can overshoot only when n*p sits on an integer; undo
        order = np.argsort(scaled - counts, kind="stable")
        for i in order[: -short if short else 0]:
            counts[i] -= 1
        short = 0
    if short > 0:
        frac = scaled - counts
        order = sorted(range(p.size), key=lambda i: (-frac[i], i))
        for i in order[:short]:
            counts[i] += 1
    return EmpiricalType(tuple(int(c) for c in counts), n)


def typical_words(pmf: Iterable[float], n: int, delta: float) -> Iterator[EmpiricalType]:
    """Yield every n-type within the delta box around ``pmf`` (support-exact)."""
    p = np.asarray(list(pmf), dtype=float)
    ndelta = n * delta

    def rec(counts: list[int], used: int, a: int):
        if a == p.size - 1:
            last = n - used
            counts.append(last)
            t = n * p[-1]
            if (p[-1] == 0.0 and last == 0) or (
                p[-1] > 0.0 and abs(last - t) <= ndelta + _TIE_GUARD
            ):
                yield EmpiricalType(tuple(counts), n)
            counts.pop()
            return
        t = n * p[a]
        if p[a] == 0.0:
            lo = hi = 0
        else:
            lo = max(0, math.ceil(t - ndelta - _TIE_GUARD))
            hi = min(n - used, math.floor(t + ndelta + _TIE_GUARD))
        for c in range(lo, hi + 1):
            counts.append(c)
            yield from rec(counts, used + c, a + 1)
            counts.pop()

    yield from rec([], 0, 0)
