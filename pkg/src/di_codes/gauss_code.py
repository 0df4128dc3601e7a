"""Deterministic identification over the Gaussian channel via sphere packing.

Geometry is handled in normalized coordinates u = x / sqrt(n), where the
power constraint ||x||^2 <= n * power becomes ||u|| <= sqrt(power) and the
noise variance per normalized coordinate is sigma2 / n. Codeword centers are
packed into the ball of radius r1 = sqrt(power) - sqrt(eps) at pairwise
distance 2 * r0 with r0 = sqrt(eps), so every protection sphere of radius r0
stays inside the power ball.

A greedy random packing is grown until saturation: candidates are drawn
uniformly from the r1-ball and kept when far enough from all kept centers;
once probe_budget consecutive candidates have been rejected, the packing is
declared saturated. A saturated packing covers the r1-ball with 2*r0-balls,
which forces the count L >= (r1 / (2 * r0))^n; that volume bound is the
quantity the construction is checked against. Neighbor searches go through a
k-d tree: the tail of the saturation run is millions of rejected candidates,
and a dense distance matrix against every kept center would dominate the
runtime long before memory became the problem.

The decoder thresholds the empirical noise energy: accept candidate j iff
(1/n) * ||y - x_j||^2 <= sigma2 + delta. Chebyshev-style reference bounds for
both error kinds (variance of the chi-square statistic plus, for type II, the
cross term between noise and center separation) are provided for comparison
against the simulated rates; they assume the coupling eps >= 3 * delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .channels import GaussChannel, gauss_from_dict, gauss_to_dict
from .errors import ConstructionError
from .stats import SimReport

DEFAULT_PROBE_BUDGET = 10**5
DEFAULT_PROBE_TRIALS = 4096
DEFAULT_PAIR_BUDGET = 8

# Candidates are drawn from the stream in fixed-size batches; because the
# batch size never adapts, the candidate sequence depends only on the seed,
# no matter where the construction stops.
_BATCH = 1024
_PENDING_LIMIT = 512

# Noise blocks per simulation chunk are sized to about this many scalars.
_CHUNK_SCALARS = 2**22


@dataclass(frozen=True, eq=False)
class GaussCodebook:
    """Packed identification code for the Gaussian channel.

    centers holds normalized codewords (rows, in the r1-ball); the physical
    codeword of message j is sqrt(n) * centers[j]. epsilon is the packing
    parameter (r0 = sqrt(epsilon)), delta the decoder's energy slack.
    """

    channel: GaussChannel
    centers: np.ndarray
    epsilon: float
    delta: float

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError("centers must be an (L, n) array")
        if not 0.0 < self.epsilon < self.channel.power:
            raise ValueError("epsilon must lie strictly between 0 and the power")
        if not self.delta >= 0.0:
            raise ValueError("delta must be nonnegative")
        if c.size and float((c * c).sum(axis=1).max()) > self.channel.power + 1e-9:
            raise ValueError("a center violates the power constraint")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def center_count(self) -> int:
        return self.centers.shape[0]

    @property
    def block_length(self) -> int:
        return self.centers.shape[1]

    def codeword(self, j: int) -> np.ndarray:
        """Physical (unnormalized) codeword of message j."""
        if not 0 <= j < self.center_count:
            raise ValueError("message index out of range")
        return math.sqrt(self.block_length) * self.centers[j]


@dataclass(frozen=True)
class SaturationCertificate:
    """Evidence about how the packing stopped and how full the ball is.

    stop_reason is "saturation" (probe_budget consecutive rejections) or
    "center_cap" (max_centers reached first). The probe pass re-tests
    coverage with fresh candidates from an independent stream: probe_covered
    counts those landing within 2*r0 of a kept center. The volume bound
    applies to genuinely saturated packings; a capped run reports
    saturated_at_tolerance = False and the bound comparison is moot.
    """

    center_count: int
    stop_reason: str
    consecutive_rejections: int
    candidates_processed: int
    probe_trials: int
    probe_covered: int
    lower_bound: float
    seed: int

    @property
    def saturated_at_tolerance(self) -> bool:
        return self.stop_reason == "saturation"

    @property
    def probe_coverage(self) -> float:
        return self.probe_covered / self.probe_trials if self.probe_trials else math.nan

    @property
    def meets_packing_bound(self) -> bool:
        return self.center_count >= self.lower_bound

    def to_dict(self) -> dict:
        return {
            "center_count": self.center_count,
            "stop_reason": self.stop_reason,
            "saturated_at_tolerance": self.saturated_at_tolerance,
            "consecutive_rejections": self.consecutive_rejections,
            "candidates_processed": self.candidates_processed,
            "probe_trials": self.probe_trials,
            "probe_covered": self.probe_covered,
            "probe_coverage": self.probe_coverage,
            "lower_bound": self.lower_bound,
            "meets_packing_bound": self.meets_packing_bound,
            "seed": self.seed,
        }


def packing_radii(power: float, epsilon: float) -> tuple[float, float]:
    """(r0, r1): protection radius and usable ball radius, normalized units."""
    if not power > 0:
        raise ValueError("power must be positive")
    if not 0.0 < epsilon < power:
        raise ValueError("epsilon must lie strictly between 0 and power")
    return math.sqrt(epsilon), math.sqrt(power) - math.sqrt(epsilon)


def packing_lower_bound(power: float, epsilon: float, n: int) -> float:
    """Center count every saturated packing must reach: (r1 / (2 r0))^n.

    Exceeds 1 only when r1 > 2 r0; for larger epsilon the bound is trivially
    satisfied by any nonempty packing.
    """
    if n < 1:
        raise ValueError("n must be positive")
    r0, r1 = packing_radii(power, epsilon)
    exponent = n * (math.log2(r1 / r0) - 1.0)
    if exponent > 1023.0:
        return math.inf
    return 2.0 ** exponent


def _sample_ball(rng: np.random.Generator, count: int, n: int, radius: float) -> np.ndarray:
    """i.i.d. uniform points in the n-ball: Gaussian direction, radial U^(1/n)."""
    g = rng.standard_normal((count, n))
    norms = np.sqrt((g * g).sum(axis=1))
    norms[norms == 0.0] = 1.0
    u = rng.random(count)
    return g * (radius * u ** (1.0 / n) / norms)[:, None]


def build_gauss_codebook(
    channel: GaussChannel,
    n: int,
    epsilon: float,
    delta: float,
    seed: int,
    probe_budget: int = DEFAULT_PROBE_BUDGET,
    max_centers: int | None = None,
    probe_trials: int = DEFAULT_PROBE_TRIALS,
) -> tuple[GaussCodebook, SaturationCertificate]:
    """Grow a greedy random packing until saturation (or the center cap).

    Uses two child streams of ``seed`` in fixed order: one for construction
    candidates, one for the certificate's probe pass. Candidate batches have
    a fixed size, so results are reproducible bit for bit regardless of where
    the run stops. In high dimensions saturation is unreachable in any
    reasonable time; pass max_centers to cap the packing (the certificate
    then says so instead of claiming saturation).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if probe_budget < 1:
        raise ValueError("probe_budget must be positive")
    if max_centers is not None and max_centers < 1:
        raise ValueError("max_centers must be positive when given")
    if probe_trials < 0:
        raise ValueError("probe_trials must be nonnegative")
    r0, r1 = packing_radii(channel.power, epsilon)
    if r1 <= 0:
        raise ConstructionError("epsilon leaves no room inside the power ball")
    min_d = 2.0 * r0
    min_d2 = min_d * min_d

    cand_stream, probe_stream = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(cand_stream)

    kept_buf = np.empty((_BATCH, n))
    kept_count = 0
    tree: cKDTree | None = None
    tree_count = 0  # centers covered by the tree; newer ones scanned densely
    rejections = 0
    processed = 0
    stop_reason = None
    while stop_reason is None:
        batch = _sample_ball(rng, _BATCH, n, r1)
        if tree is not None:
            near, _ = tree.query(batch, k=1, distance_upper_bound=min_d)
            far_old = near >= min_d
        else:
            far_old = np.ones(_BATCH, dtype=bool)
        # Only candidates clearing the indexed centers need individual
        # treatment; the rejected runs between them advance the counters
        # arithmetically, with the same outcome as a candidate-by-candidate
        # scan. Rebuilding the tree after every accepting batch would swamp
        # the run, so accepts pile up in a pending block that each survivor
        # is checked against until the block is large enough to fold in.
        pos = 0
        for s in np.flatnonzero(far_old):
            s = int(s)
            run = s - pos
            if rejections + run >= probe_budget:
                processed += probe_budget - rejections
                rejections = probe_budget
                stop_reason = "saturation"
                break
            rejections += run
            processed += run + 1
            pos = s + 1
            ok = True
            if kept_count > tree_count:
                diff = kept_buf[tree_count:kept_count] - batch[s]
                ok = float((diff * diff).sum(axis=1).min()) >= min_d2
            if ok:
                if kept_count == kept_buf.shape[0]:
                    kept_buf = np.concatenate([kept_buf, np.empty_like(kept_buf)])
                kept_buf[kept_count] = batch[s]
                kept_count += 1
                rejections = 0
                if max_centers is not None and kept_count >= max_centers:
                    stop_reason = "center_cap"
                    break
            else:
                rejections += 1
                if rejections >= probe_budget:
                    stop_reason = "saturation"
                    break
        else:
            run = _BATCH - pos
            if rejections + run >= probe_budget:
                processed += probe_budget - rejections
                rejections = probe_budget
                stop_reason = "saturation"
            else:
                rejections += run
                processed += run
        if kept_count - tree_count >= _PENDING_LIMIT:
            tree = cKDTree(kept_buf[:kept_count])
            tree_count = kept_count

    centers = kept_buf[:kept_count].copy()
    codebook = GaussCodebook(channel=channel, centers=centers, epsilon=epsilon, delta=delta)

    probe_rng = np.random.default_rng(probe_stream)
    covered = 0
    if probe_trials and centers.size:
        final_tree = cKDTree(centers)
        done = 0
        block = max(1, _CHUNK_SCALARS // max(n, 1))
        while done < probe_trials:
            rows = min(block, probe_trials - done)
            pts = _sample_ball(probe_rng, rows, n, r1)
            d, _ = final_tree.query(pts, k=1, distance_upper_bound=min_d)
            covered += int((d < min_d).sum())
            done += rows

    certificate = SaturationCertificate(
        center_count=centers.shape[0],
        stop_reason=stop_reason,
        consecutive_rejections=rejections,
        candidates_processed=processed,
        probe_trials=probe_trials,
        probe_covered=covered,
        lower_bound=packing_lower_bound(channel.power, epsilon, n),
        seed=seed,
    )
    return codebook, certificate


def gauss_identify(codebook: GaussCodebook, output: Sequence[float] | np.ndarray, candidate: int) -> bool:
    """Energy-threshold decoder: accept iff (1/n)||y - x_j||^2 <= sigma2 + delta."""
    y = np.asarray(output, dtype=np.float64)
    n = codebook.block_length
    if y.shape != (n,):
        raise ValueError("output length disagrees with the codebook")
    diff = y - codebook.codeword(candidate)
    return float(diff @ diff) / n <= codebook.channel.sigma2 + codebook.delta


def chebyshev_references(channel: GaussChannel, n: int, delta: float) -> tuple[float, float]:
    """(pe1_ref, pe2_ref): variance bounds on both error kinds.

    pe1_ref bounds the chance the noise energy statistic leaves its delta
    window; the max of the two standard variance expressions is taken so the
    reference is an upper bound under either convention. pe2_ref adds the
    noise-times-separation cross term, valid under the eps >= 3*delta
    coupling between packing and decoder slack.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not delta > 0:
        raise ValueError("delta must be positive")
    s2 = channel.sigma2
    pe1 = max(s2, 2.0 * s2 * s2) / (n * delta * delta)
    pe2 = pe1 + 16.0 * s2 * channel.power / (n * delta * delta)
    return pe1, pe2


def min_center_distance(codebook: GaussCodebook) -> float:
    """Smallest pairwise Euclidean distance between normalized centers."""
    if codebook.center_count < 2:
        return math.inf
    tree = cKDTree(codebook.centers)
    d, _ = tree.query(codebook.centers, k=2)
    return float(d[:, 1].min())


def _select_pairs_euclid(codebook: GaussCodebook, pair_budget: int) -> list[tuple[int, int]]:
    """Closest pair in both directions, then cyclic fill; same policy as the DMC side."""
    m = codebook.center_count
    if m < 2 or pair_budget < 1:
        return []
    tree = cKDTree(codebook.centers)
    d, idx = tree.query(codebook.centers, k=2)
    i = int(np.argmin(d[:, 1]))
    j = int(idx[i, 1])
    a, b = (i, j) if i < j else (j, i)
    pairs: list[tuple[int, int]] = [(a, b), (b, a)]
    for p in range(m):
        q = (p + 1) % m
        if len(pairs) >= pair_budget:
            break
        if (p, q) not in pairs and p != q:
            pairs.append((p, q))
    return pairs[:pair_budget]


def _count_gauss_errors(
    channel: GaussChannel,
    x_send: np.ndarray,
    x_test: np.ndarray,
    delta: float,
    trials: int,
    rng: np.random.Generator,
    inside: bool,
) -> int:
    """Transmit x_send ``trials`` times; count outputs in(side) x_test's region.

    Chunked noise generation is stream-equivalent to one unchunked draw."""
    n = x_send.size
    threshold = channel.sigma2 + delta
    sigma = math.sqrt(channel.sigma2)
    shift = x_send - x_test
    errors = 0
    done = 0
    block = max(1, _CHUNK_SCALARS // n)
    while done < trials:
        rows = min(block, trials - done)
        z = sigma * rng.standard_normal((rows, n))
        diff = z + shift
        stat = (diff * diff).sum(axis=1) / n
        hits = stat <= threshold
        errors += int(hits.sum()) if inside else int((~hits).sum())
        done += rows
    return errors


def simulate_gauss_errors(
    codebook: GaussCodebook,
    trials: int,
    seed: int,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    message_budget: int | None = None,
) -> SimReport:
    """Monte Carlo error estimates with the same stream discipline as the DMC
    simulator: one child stream per evaluated message, then one per pair.

    The report carries the Chebyshev reference bounds for this (n, delta) so
    callers can compare the empirical rates against the analytic envelope.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    m = codebook.center_count
    if m < 1:
        raise ValueError("codebook is empty")
    if message_budget is None or message_budget >= m:
        messages = list(range(m))
    elif message_budget < 1:
        raise ValueError("message_budget must be positive")
    else:
        messages = sorted({int(v) for v in np.linspace(0, m - 1, message_budget).round()})
    pairs = _select_pairs_euclid(codebook, pair_budget)

    streams = np.random.SeedSequence(seed).spawn(len(messages) + len(pairs))
    pe1_errors = []
    for k, i in enumerate(messages):
        rng = np.random.default_rng(streams[k])
        x = codebook.codeword(i)
        pe1_errors.append(
            _count_gauss_errors(codebook.channel, x, x, codebook.delta, trials, rng, inside=False)
        )
    pe2_errors = []
    for k, (i, j) in enumerate(pairs):
        rng = np.random.default_rng(streams[len(messages) + k])
        pe2_errors.append(
            _count_gauss_errors(
                codebook.channel,
                codebook.codeword(i),
                codebook.codeword(j),
                codebook.delta,
                trials,
                rng,
                inside=True,
            )
        )
    ref1, ref2 = chebyshev_references(codebook.channel, codebook.block_length, codebook.delta)
    return SimReport(
        trials=trials,
        seed=seed,
        pe1_index=tuple(messages),
        pe1_errors=tuple(pe1_errors),
        pe2_pairs=tuple(pairs),
        pe2_errors=tuple(pe2_errors),
        chebyshev_pe1=ref1,
        chebyshev_pe2=ref2,
    )


def gauss_codebook_to_dict(codebook: GaussCodebook) -> dict:
    return {
        "channel": gauss_to_dict(codebook.channel),
        "epsilon": codebook.epsilon,
        "delta": codebook.delta,
        "centers": codebook.centers.tolist(),
    }


def gauss_codebook_from_dict(data: dict) -> GaussCodebook:
    return GaussCodebook(
        channel=gauss_from_dict(data["channel"]),
        centers=np.asarray(data["centers"], dtype=np.float64),
        epsilon=float(data["epsilon"]),
        delta=float(data["delta"]),
    )
