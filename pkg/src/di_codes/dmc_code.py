"""Deterministic identification codes for DMCs.

Construction draws all codewords from a single capacity-achieving type class
and enforces pairwise Hamming separation; decoding asks whether the received
block is jointly typical with the candidate codeword under the channel law.
Decoding regions of different messages deliberately overlap: the decoder
answers one yes/no question per candidate, it never picks a unique message.

Two separation policies are provided. The "faithful" policy removes both
members of every too-close pair, mirroring the expurgation argument that
backs the achievability bound (the surviving words are exactly the sampled
words whose spheres contain no other sample). The "greedy" policy keeps a
maximal prefix-greedy subset and typically retains far more words; it trades
the clean counting argument for yield.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .capacity import entropy_bits, max_entropy_pmf
from .channels import Dmc, dmc_from_dict, dmc_to_dict, input_cost, reduce_channel
from .errors import BudgetError, ConstructionError
from .stats import SimReport
from .typicality import (
    _TIE_GUARD,
    EmpiricalType,
    TypicalityParams,
    apportion_counts,
    distance_threshold,
    empirical_type,
    is_jointly_typical,
    pairwise_hamming,
    sample_type_class,
    sphere_exponent,
)

DEFAULT_MAX_WORDS = 2**20
DEFAULT_PAIR_BUDGET = 8

# Pairwise-distance matrices are dense; cap the word count they are built for.
_MAX_PAIRWISE_WORDS = 2**14

# Monte Carlo transmissions are generated this many blocks at a time. Chunked
# generation is stream-equivalent: the concatenated chunks reproduce exactly
# the draws of one unchunked call on the same generator.
_CHUNK_ROWS = 4096


@dataclass(frozen=True, eq=False)
class DmcCodebook:
    """An identification codebook over a DMC input alphabet.

    words is an (M, n) integer array. base is the common empirical type when
    the codebook came out of the standard construction; manually assembled
    codebooks (arbitrary word lists) may leave it None. epsilon is the
    separation parameter the words were built for, delta the decoder's
    typicality tolerance.
    """

    channel: Dmc
    words: np.ndarray
    epsilon: float
    delta: float
    rate: float | None = None
    base: EmpiricalType | None = None

    def __post_init__(self):
        w = np.asarray(self.words, dtype=np.int64)
        if w.ndim != 2:
            raise ValueError("words must be an (M, n) array")
        if w.shape[1] < 1:
            raise ValueError("block length must be positive")
        if w.size and (w.min() < 0 or w.max() >= self.channel.input_size):
            raise ValueError("codeword letter outside the input alphabet")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not self.delta >= 0.0:
            raise ValueError("delta must be nonnegative")
        if self.base is not None and self.base.n != w.shape[1]:
            raise ValueError("base type length disagrees with the words")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "words", w)

    @property
    def word_count(self) -> int:
        return self.words.shape[0]

    @property
    def block_length(self) -> int:
        return self.words.shape[1]


@dataclass(frozen=True)
class ConstructionReport:
    """What the construction did and why: sizes, thresholds, and yields."""

    n: int
    rate: float
    epsilon: float
    delta: float
    mode: str
    seed: int
    backoff: float
    separation: int
    requested_words: int
    kept_words: int
    dropped_words: int
    base_counts: tuple[int, ...]
    base_entropy_bits: float
    mean_cost: float
    min_distance: int | None
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rate": self.rate,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "mode": self.mode,
            "seed": self.seed,
            "backoff": self.backoff,
            "separation": self.separation,
            "requested_words": self.requested_words,
            "kept_words": self.kept_words,
            "dropped_words": self.dropped_words,
            "base_counts": list(self.base_counts),
            "base_entropy_bits": self.base_entropy_bits,
            "mean_cost": self.mean_cost,
            "min_distance": self.min_distance,
            "notes": list(self.notes),
        }


def construction_base_type(channel: Dmc, n: int, cost_margin: float = 0.0) -> EmpiricalType:
    """The n-type all codewords share: the rounded capacity maximizer.

    Rounding can push the average cost above the ceiling by a fraction of a
    letter, so counts are repaired afterwards, moving single occurrences from
    the most expensive populated letter to the cheapest letter until the
    constraint (tightened by cost_margin) holds. Feasibility of the repaired
    type follows from constraint >= min cost, which Dmc guarantees.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if cost_margin < 0:
        raise ValueError("cost_margin must be nonnegative")
    result = max_entropy_pmf(channel.cost, channel.constraint)
    et = apportion_counts(result.maximizer, n)
    counts = np.asarray(et.counts, dtype=np.int64)
    cost = channel.cost
    ceiling = n * (channel.constraint - cost_margin)
    if ceiling < n * float(cost.min()) - _TIE_GUARD:
        raise ValueError("cost_margin leaves no feasible type")
    cheapest = int(np.argmin(cost))
    while float(counts @ cost) > ceiling + _TIE_GUARD:
        populated = np.flatnonzero(counts > 0)
        worst = populated[np.argmax(cost[populated])]
        if worst == cheapest:
            raise ValueError("cost repair stuck; constraint infeasible for any type")
        counts[worst] -= 1
        counts[cheapest] += 1
    return EmpiricalType(tuple(int(c) for c in counts), n)


def drop_close_pairs(words: np.ndarray, separation: int, alphabet_size: int) -> np.ndarray:
    """Keep-mask that removes BOTH members of every pair at distance < separation.

    This is the expurgation step of the standard construction: a word
    survives iff no other sampled word lies strictly inside its separation
    radius. Symmetric, order-independent, idempotent.
    """
    m = words.shape[0]
    if separation <= 0 or m < 2:
        return np.ones(m, dtype=bool)
    dist = pairwise_hamming(words, alphabet_size)
    close = dist < separation
    np.fill_diagonal(close, False)
    return ~close.any(axis=1)


def greedy_select(words: np.ndarray, separation: int) -> np.ndarray:
    """Keep-mask of the prefix-greedy packing: scan order, keep if far from kept."""
    m, n = words.shape
    keep = np.zeros(m, dtype=bool)
    if m == 0:
        return keep
    if separation <= 0:
        keep[:] = True
        return keep
    kept = np.empty((m, n), dtype=np.int64)
    count = 0
    for i in range(m):
        if count == 0:
            keep[i] = True
            kept[count] = words[i]
            count += 1
            continue
        d = (kept[:count] != words[i]).sum(axis=1)
        if int(d.min()) >= separation:
            keep[i] = True
            kept[count] = words[i]
            count += 1
    return keep


def build_codebook(
    channel: Dmc,
    n: int,
    rate: float,
    epsilon: float,
    delta: float,
    seed: int,
    mode: str = "faithful",
    backoff: float | None = None,
    max_words: int = DEFAULT_MAX_WORDS,
    cost_margin: float = 0.0,
) -> tuple[DmcCodebook, ConstructionReport]:
    """Sample-and-expurgate construction of an identification codebook.

    M = floor(2^(n*rate)) words are drawn i.i.d. uniformly from the base type
    class of the reduced channel, then thinned to pairwise separation
    ceil(n*epsilon) under the chosen mode. The rate must leave room below the
    type entropy: rate <= H(base) - backoff, where backoff defaults to three
    times the sphere exponent of epsilon (the slack the sphere-counting
    achievability argument consumes). Words are returned over the original
    input alphabet, spelled with the representative letter of each reduced
    class, so they are valid inputs of ``channel`` itself.

    Raises BudgetError when M would exceed max_words (or the pairwise stage
    would not fit), ConstructionError when the rate precondition fails or
    expurgation removes every word.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    if mode not in ("faithful", "greedy"):
        raise ValueError("mode must be 'faithful' or 'greedy'")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if delta < 0:
        raise ValueError("delta must be nonnegative")

    reduced, rmap = reduce_channel(channel)
    if backoff is None:
        backoff = 3.0 * sphere_exponent(epsilon, reduced.input_size)
    base_reduced = construction_base_type(reduced, n, cost_margin)
    base_entropy = entropy_bits(base_reduced.pmf())
    if rate > base_entropy - backoff + _TIE_GUARD:
        raise ConstructionError(
            f"rate {rate} exceeds the admissible ceiling "
            f"H(base) - backoff = {base_entropy:.6f} - {backoff:.6f}"
        )

    log2_m = n * rate
    if log2_m > math.log2(max_words) + _TIE_GUARD:
        raise BudgetError(
            f"word budget {max_words} exceeded: floor(2^(n*rate)) needs 2^{log2_m:.2f} words"
        )
    requested = max(1, int(math.floor(2.0**log2_m + _TIE_GUARD)))

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sampled = sample_type_class(base_reduced, requested, rng)
    separation = distance_threshold(n, epsilon)
    if mode == "faithful":
        if requested > _MAX_PAIRWISE_WORDS:
            raise BudgetError(
                f"pairwise budget {_MAX_PAIRWISE_WORDS} exceeded: {requested} words"
            )
        keep = drop_close_pairs(sampled, separation, reduced.input_size)
    else:
        keep = greedy_select(sampled, separation)
    kept_reduced = sampled[keep]
    kept = kept_reduced.shape[0]

    reps = np.asarray(rmap.representative, dtype=np.int64)
    words = reps[kept_reduced] if kept else np.empty((0, n), dtype=np.int64)

    base_counts = [0] * channel.input_size
    for c, rep in enumerate(rmap.representative):
        base_counts[rep] = base_reduced.counts[c]
    base = EmpiricalType(tuple(base_counts), n)

    min_distance = None
    if 2 <= kept <= _MAX_PAIRWISE_WORDS:
        d = pairwise_hamming(kept_reduced, reduced.input_size)
        min_distance = int(d[np.triu_indices(kept, k=1)].min())

    report = ConstructionReport(
        n=n,
        rate=rate,
        epsilon=epsilon,
        delta=delta,
        mode=mode,
        seed=seed,
        backoff=backoff,
        separation=separation,
        requested_words=requested,
        kept_words=kept,
        dropped_words=requested - kept,
        base_counts=base.counts,
        base_entropy_bits=base_entropy,
        mean_cost=float(channel.cost[words[0]].mean()) if kept else math.nan,
        min_distance=min_distance,
        notes=channel.notes,
    )
    if kept == 0:
        raise ConstructionError(
            f"expurgation removed all {requested} words at separation {separation}",
            report=report,
        )
    codebook = DmcCodebook(
        channel=channel,
        words=words,
        epsilon=epsilon,
        delta=delta,
        rate=rate,
        base=base,
    )
    return codebook, report


def _decoder_targets(word: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Scaled joint-pmf targets n*p(a,b) = N(a|word) * W[a,b] for the decoder."""
    counts = np.bincount(word, minlength=matrix.shape[0]).astype(float)
    return counts[:, None] * matrix


def identify(codebook: DmcCodebook, output: Sequence[int] | np.ndarray, candidate: int) -> bool:
    """Decoder's answer to "was message ``candidate`` sent?" for one output block.

    True iff (word, output) is jointly delta-typical for type(word) x W. The
    regions of different candidates overlap; asking every candidate can
    return several yeses by design.
    """
    if not 0 <= candidate < codebook.word_count:
        raise ValueError("candidate index out of range")
    word = codebook.words[candidate]
    joint = _decoder_targets(word, codebook.channel.matrix) / codebook.block_length
    return is_jointly_typical(word, output, joint, TypicalityParams(codebook.delta))


def _batch_typical(
    word: np.ndarray,
    outputs: np.ndarray,
    matrix: np.ndarray,
    delta: float,
) -> np.ndarray:
    """Vectorized joint-typicality decisions for many output blocks at once.

    Must agree decision-for-decision with ``identify``; the comparison uses
    the same scaled-count arithmetic and the same tie guard.
    """
    n = word.size
    targets = _decoder_targets(word, matrix)
    ndelta = n * delta
    ok = np.ones(outputs.shape[0], dtype=bool)
    for a in range(matrix.shape[0]):
        pos = np.flatnonzero(word == a)
        if pos.size == 0:
            continue
        sub = outputs[:, pos]
        for b in range(matrix.shape[1]):
            cnt = (sub == b).sum(axis=1)
            if targets[a, b] == 0.0:
                ok &= cnt == 0
            else:
                ok &= np.abs(cnt - targets[a, b]) <= ndelta + _TIE_GUARD
    return ok


def _transmit_block(matrix: np.ndarray, word: np.ndarray, rng: np.random.Generator, rows: int) -> np.ndarray:
    """``rows`` i.i.d. output blocks for ``word``; stream-equivalent to
    calling the single-block transmitter ``rows`` times on the same generator."""
    cum = np.cumsum(matrix, axis=1)
    ref = cum[word]
    u = rng.random((rows, word.size))
    return (ref[None, :, :-1] <= u[:, :, None]).sum(axis=2).astype(np.int64)


def _count_errors(
    matrix: np.ndarray,
    send_word: np.ndarray,
    test_word: np.ndarray,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    inside: bool,
) -> int:
    """Transmit send_word ``trials`` times; count outputs (not) typical for test_word."""
    errors = 0
    done = 0
    while done < trials:
        rows = min(_CHUNK_ROWS, trials - done)
        ys = _transmit_block(matrix, send_word, rng, rows)
        hits = _batch_typical(test_word, ys, matrix, delta)
        errors += int(hits.sum()) if inside else int((~hits).sum())
        done += rows
    return errors


def select_pairs(codebook: DmcCodebook, pair_budget: int = DEFAULT_PAIR_BUDGET) -> list[tuple[int, int]]:
    """Deterministic ordered pairs for type-II estimation.

    The closest pair (ties: lexicographically first) is evaluated in both
    directions first, because words at minimum separation dominate the
    overlap error; the remaining budget is filled with the cyclic pairs
    (i, i+1 mod M) in index order.
    """
    m = codebook.word_count
    if m < 2 or pair_budget < 1:
        return []
    if m > _MAX_PAIRWISE_WORDS:
        raise BudgetError(
            f"pairwise budget {_MAX_PAIRWISE_WORDS} exceeded: {m} words"
        )
    dist = pairwise_hamming(codebook.words, codebook.channel.input_size)
    np.fill_diagonal(dist, codebook.block_length + 1)
    i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
    pairs: list[tuple[int, int]] = [(int(i), int(j)), (int(j), int(i))]
    for a in range(m):
        b = (a + 1) % m
        if len(pairs) >= pair_budget:
            break
        if (a, b) not in pairs and a != b:
            pairs.append((a, b))
    return pairs[:pair_budget]


def simulate_errors(
    codebook: DmcCodebook,
    trials: int,
    seed: int,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    message_budget: int | None = None,
) -> SimReport:
    """Monte Carlo estimates of both identification error kinds.

    Every evaluated message and every evaluated ordered pair gets its own
    child stream of ``seed`` (spawned in a fixed order: messages first, then
    pairs), so enlarging one budget never perturbs the other estimates.
    message_budget = None evaluates every message; an integer evaluates an
    evenly spaced subset of that size.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    m = codebook.word_count
    if m < 1:
        raise ValueError("codebook is empty")
    if message_budget is None or message_budget >= m:
        messages = list(range(m))
    elif message_budget < 1:
        raise ValueError("message_budget must be positive")
    else:
        messages = sorted({int(v) for v in np.linspace(0, m - 1, message_budget).round()})
    pairs = select_pairs(codebook, pair_budget)

    streams = np.random.SeedSequence(seed).spawn(len(messages) + len(pairs))
    matrix = codebook.channel.matrix
    delta = codebook.delta

    pe1_errors = []
    for k, i in enumerate(messages):
        rng = np.random.default_rng(streams[k])
        word = codebook.words[i]
        pe1_errors.append(
            _count_errors(matrix, word, word, delta, trials, rng, inside=False)
        )
    pe2_errors = []
    for k, (i, j) in enumerate(pairs):
        rng = np.random.default_rng(streams[len(messages) + k])
        pe2_errors.append(
            _count_errors(
                matrix, codebook.words[i], codebook.words[j], delta, trials, rng, inside=True
            )
        )
    return SimReport(
        trials=trials,
        seed=seed,
        pe1_index=tuple(messages),
        pe1_errors=tuple(pe1_errors),
        pe2_pairs=tuple(pairs),
        pe2_errors=tuple(pe2_errors),
    )


def same_codeword_conflict(codebook: DmcCodebook, i: int, j: int, trials: int, seed: int) -> dict:
    """Demonstrate that two equal codewords cannot both be identified reliably.

    When u_i = u_j the decoding regions coincide, so on every single output
    block exactly one of the two error events {miss i} and {accept j} occurs:
    the empirical estimates satisfy pe1 + pe2 = 1 identically, not just in
    expectation. Evaluated on one shared stream of outputs to expose the
    per-sample complement.
    """
    if not (0 <= i < codebook.word_count and 0 <= j < codebook.word_count):
        raise ValueError("message index out of range")
    if i == j:
        raise ValueError("i and j must be distinct messages")
    if not np.array_equal(codebook.words[i], codebook.words[j]):
        raise ValueError("messages do not share a codeword")
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    matrix = codebook.channel.matrix
    word = codebook.words[i]
    inside = 0
    done = 0
    while done < trials:
        rows = min(_CHUNK_ROWS, trials - done)
        ys = _transmit_block(matrix, word, rng, rows)
        inside += int(_batch_typical(word, ys, matrix, codebook.delta).sum())
        done += rows
    pe1 = (trials - inside) / trials
    pe2 = inside / trials
    return {
        "i": i,
        "j": j,
        "trials": trials,
        "seed": seed,
        "regions_identical": True,
        "pe1_estimate": pe1,
        "pe2_estimate": pe2,
        "sum": pe1 + pe2,
    }


def validate_codebook(codebook: DmcCodebook) -> dict:
    """Structural checks: common type, cost feasibility, pairwise separation."""
    words = codebook.words
    m, n = words.shape
    channel = codebook.channel
    same_type = True
    ref = codebook.base or (empirical_type(words[0], channel.input_size) if m else None)
    for k in range(m):
        if empirical_type(words[k], channel.input_size) != ref:
            same_type = False
            break
    cost_ok = all(
        input_cost(channel, words[k]) <= channel.constraint + _TIE_GUARD for k in range(m)
    )
    separation = distance_threshold(n, codebook.epsilon)
    min_distance = None
    separated = True
    if 2 <= m <= _MAX_PAIRWISE_WORDS:
        d = pairwise_hamming(words, channel.input_size)
        min_distance = int(d[np.triu_indices(m, k=1)].min())
        separated = min_distance >= separation
    return {
        "word_count": m,
        "block_length": n,
        "same_type": same_type,
        "cost_feasible": cost_ok,
        "separation": separation,
        "min_distance": min_distance,
        "separated": separated,
    }


def codebook_to_dict(codebook: DmcCodebook) -> dict:
    return {
        "channel": dmc_to_dict(codebook.channel),
        "epsilon": codebook.epsilon,
        "delta": codebook.delta,
        "rate": codebook.rate,
        "base_counts": list(codebook.base.counts) if codebook.base else None,
        "words": codebook.words.tolist(),
    }


def codebook_from_dict(data: dict) -> DmcCodebook:
    channel = dmc_from_dict(data["channel"])
    words = np.asarray(data["words"], dtype=np.int64)
    base = None
    if data.get("base_counts") is not None:
        base = EmpiricalType(tuple(int(c) for c in data["base_counts"]), int(words.shape[1]))
    return DmcCodebook(
        channel=channel,
        words=words,
        epsilon=float(data["epsilon"]),
        delta=float(data["delta"]),
        rate=None if data.get("rate") is None else float(data["rate"]),
        base=base,
    )
