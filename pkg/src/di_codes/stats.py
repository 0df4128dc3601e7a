"""Small statistics helpers used by the simulators and the acceptance suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

# 95% two-sided normal quantile used for every interval in this package.
WILSON_Z = 1.96


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Preferred over the normal approximation because error-rate estimates here
    are routinely near 0 or 1, where Wald intervals collapse.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


def proportion_se(p_hat: float, trials: int) -> float:
    """Standard error of a binomial proportion estimate."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)


def nonincreasing_within_ci(estimates: list[float], trials: int, z: float = WILSON_Z) -> bool:
    """True iff each successive estimate is not significantly above its predecessor.

    "Significantly" means the Wilson lower bound of the later point exceeds the
    Wilson upper bound of the earlier one.
    """
    for prev, nxt in zip(estimates, estimates[1:]):
        prev_hi = wilson_interval(round(prev * trials), trials, z)[1]
        nxt_lo = wilson_interval(round(nxt * trials), trials, z)[0]
        if nxt_lo > prev_hi:
            return False
    return True


@dataclass(frozen=True)
class SimReport:
    """Empirical identification-error estimates from one Monte Carlo run.

    pe1 entries are per evaluated message i: the fraction of transmissions of
    u_i whose output fell outside the decoding region of i. pe2 entries are
    per evaluated ordered pair (i, j), i != j: the fraction of transmissions
    of u_i whose output fell inside the region of j. The Chebyshev fields are
    analytic reference bounds (distance decoder only); None where no such
    bound applies.
    """

    trials: int
    seed: int
    pe1_index: tuple[int, ...]
    pe1_errors: tuple[int, ...]
    pe2_pairs: tuple[tuple[int, int], ...]
    pe2_errors: tuple[int, ...]
    chebyshev_pe1: float | None = None
    chebyshev_pe2: float | None = None

    def __post_init__(self):
        if self.trials <= 0:
            raise ValueError("trials must be positive")
        if len(self.pe1_index) != len(self.pe1_errors):
            raise ValueError("pe1 lengths disagree")
        if len(self.pe2_pairs) != len(self.pe2_errors):
            raise ValueError("pe2 lengths disagree")
        for e in self.pe1_errors + self.pe2_errors:
            if not 0 <= e <= self.trials:
                raise ValueError("error count out of range")

    @property
    def pe1_estimates(self) -> tuple[float, ...]:
        return tuple(e / self.trials for e in self.pe1_errors)

    @property
    def pe2_estimates(self) -> tuple[float, ...]:
        return tuple(e / self.trials for e in self.pe2_errors)

    @property
    def pe1_max(self) -> float:
        return max(self.pe1_estimates, default=0.0)

    @property
    def pe2_max(self) -> float:
        return max(self.pe2_estimates, default=0.0)

    def to_dict(self) -> dict:
        pe1 = [
            {
                "message": i,
                "errors": e,
                "estimate": e / self.trials,
                "wilson": list(wilson_interval(e, self.trials)),
            }
            for i, e in zip(self.pe1_index, self.pe1_errors)
        ]
        pe2 = [
            {
                "sender": i,
                "target": j,
                "errors": e,
                "estimate": e / self.trials,
                "wilson": list(wilson_interval(e, self.trials)),
            }
            for (i, j), e in zip(self.pe2_pairs, self.pe2_errors)
        ]
        out = {
            "trials": self.trials,
            "seed": self.seed,
            "pe1": pe1,
            "pe2": pe2,
            "pe1_max": self.pe1_max,
            "pe2_max": self.pe2_max,
        }
        if self.chebyshev_pe1 is not None or self.chebyshev_pe2 is not None:
            out["chebyshev"] = {"pe1": self.chebyshev_pe1, "pe2": self.chebyshev_pe2}
        return out
