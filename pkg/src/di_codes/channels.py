"""Channel models: finite DMCs with input costs, and the power-constrained AWGN channel.

A DMC carries a per-letter cost vector and an average-cost ceiling. Channels
whose transition matrix contains identical rows are handled through
``reduce_channel``, which merges duplicate rows and keeps the cheapest letter
of each class as its representative; replacing letters by their representatives
changes nothing an output observer (or decoder) can see, so error quantities
computed on the reduced channel match the original ones exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InfeasibleConstraintError

# Two rows are the same letter "seen from the output" when they agree entrywise
# to this tolerance.
ROW_MERGE_TOL = 1e-12


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dmc:
    """Discrete memoryless channel with an input-cost constraint.

    matrix is row-stochastic (input_size x output_size); cost is the
    nonnegative per-letter cost vector; constraint is the average-cost ceiling.
    A ceiling above the maximum letter cost is clamped (recorded in notes);
    a ceiling below the minimum letter cost leaves no usable input and is
    rejected. Instances are immutable.
    """

    matrix: np.ndarray
    cost: np.ndarray
    constraint: float
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
            raise ValueError("matrix must be a nonempty 2-D array")
        if np.any(mat < -1e-12):
            raise ValueError("matrix entries must be nonnegative")
        mat = np.clip(mat, 0.0, None)
        row_sums = mat.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > 1e-12):
            raise ValueError("matrix rows must sum to 1 within 1e-12")
        cost = np.asarray(self.cost, dtype=np.float64)
        if cost.shape != (mat.shape[0],):
            raise ValueError("cost must have one entry per input letter")
        if np.any(cost < 0):
            raise ValueError("letter costs must be nonnegative")
        notes = tuple(self.notes)
        a = float(self.constraint)
        if not math.isfinite(a):
            raise ValueError("constraint must be finite")
        cmin = float(cost.min())
        cmax = float(cost.max())
        if a < cmin:
            raise InfeasibleConstraintError(
                f"constraint {a} is below the cheapest letter cost {cmin}; no input is usable"
            )
        if a > cmax:
            notes += (f"constraint {a} clamped to the maximum letter cost {cmax}",)
            a = cmax
        if cmin > 0.0:
            notes += ("no zero-cost letter; cheapest letter costs " + repr(cmin),)
        object.__setattr__(self, "matrix", _freeze(mat))
        object.__setattr__(self, "cost", _freeze(cost))
        object.__setattr__(self, "constraint", a)
        object.__setattr__(self, "notes", notes)

    @property
    def input_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class ReductionMap:
    """Letter-to-class assignment produced by ``reduce_channel``.

    class_of[x] is the reduced-letter index of original letter x;
    representative[c] is the original letter whose row represents class c.
    """

    class_of: tuple[int, ...]
    representative: tuple[int, ...]

    def __post_init__(self):
        if sorted(set(self.class_of)) != list(range(len(self.representative))):
            raise ValueError("class indices must be 0..k-1 and all used")
        for c, rep in enumerate(self.representative):
            if self.class_of[rep] != c:
                raise ValueError("representative letters must belong to their class")


@dataclass(frozen=True)
class GaussChannel:
    """Additive white Gaussian noise channel with a block power constraint.

    sigma2 is the per-symbol noise variance; power bounds the average input
    energy: a block x of length n must satisfy ||x||^2 <= n * power.
    """

    sigma2: float
    power: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")
        if not self.power > 0:
            raise ValueError("power must be positive")


def bsc(crossover: float, cost: Sequence[float] = (0.0, 1.0), constraint: float = 1.0) -> Dmc:
    """Binary symmetric channel with flip probability ``crossover``."""
    if not 0.0 <= crossover <= 1.0:
        raise ValueError("crossover must lie in [0, 1]")
    p = float(crossover)
    matrix = np.array([[1.0 - p, p], [p, 1.0 - p]])
    return Dmc(matrix=matrix, cost=np.asarray(cost, dtype=float), constraint=constraint)


def reduce_channel(channel: Dmc) -> tuple[Dmc, ReductionMap]:
    """Merge duplicate rows; representative = cheapest letter (ties: lowest index).

    Classes are numbered by first occurrence, so reduction is deterministic and
    idempotent: reducing a reduced channel yields the identity map.
    """
    mat = channel.matrix
    cost = channel.cost
    class_rows: list[np.ndarray] = []
    class_of: list[int] = []
    members: list[list[int]] = []
    for x in range(channel.input_size):
        row = mat[x]
        for c, ref in enumerate(class_rows):
            if np.all(np.abs(row - ref) <= ROW_MERGE_TOL):
                class_of.append(c)
                members[c].append(x)
                break
        else:
            class_of.append(len(class_rows))
            class_rows.append(row)
            members.append([x])
    reps: list[int] = []
    for group in members:
        best = min(group, key=lambda x: (cost[x], x))
        reps.append(best)
    reduced = Dmc(
        matrix=mat[reps].copy(),
        cost=cost[list(reps)].copy(),
        constraint=channel.constraint,
        notes=channel.notes,
    )
    return reduced, ReductionMap(tuple(class_of), tuple(reps))


def transmit_dmc(channel: Dmc, codeword: Sequence[int] | np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sample one channel output block for ``codeword`` (inverse-cdf per symbol)."""
    word = np.asarray(codeword, dtype=np.int64)
    if word.ndim != 1:
        raise ValueError("codeword must be one-dimensional")
    if word.size and (word.min() < 0 or word.max() >= channel.input_size):
        raise ValueError("codeword letter outside the input alphabet")
    cum = np.cumsum(channel.matrix, axis=1)
    rows = cum[word]
    u = rng.random(word.size)
    return (rows[:, :-1] <= u[:, None]).sum(axis=1).astype(np.int64)


def transmit_gauss(channel: GaussChannel, codeword: Sequence[float] | np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise to a power-feasible input block."""
    x = np.asarray(codeword, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("codeword must be a nonempty vector")
    energy = float(x @ x)
    if energy > channel.power * x.size + 1e-9:
        raise ValueError(
            f"codeword energy {energy} exceeds the power budget {channel.power * x.size}"
        )
    return x + math.sqrt(channel.sigma2) * rng.standard_normal(x.size)


def input_cost(channel: Dmc, codeword: Sequence[int] | np.ndarray) -> float:
    """Average per-letter cost of ``codeword``."""
    word = np.asarray(codeword, dtype=np.int64)
    if word.ndim != 1 or word.size == 0:
        raise ValueError("codeword must be a nonempty vector")
    if word.min() < 0 or word.max() >= channel.input_size:
        raise ValueError("codeword letter outside the input alphabet")
    return float(channel.cost[word].mean())


def dmc_to_dict(channel: Dmc) -> dict:
    return {
        "input_size": channel.input_size,
        "output_size": channel.output_size,
        "matrix": channel.matrix.tolist(),
        "cost": channel.cost.tolist(),
        "constraint": channel.constraint,
    }


def dmc_from_dict(data: dict) -> Dmc:
    matrix = np.asarray(data["matrix"], dtype=float)
    if matrix.shape != (int(data["input_size"]), int(data["output_size"])):
        raise ValueError("matrix shape disagrees with input_size/output_size")
    return Dmc(matrix=matrix, cost=np.asarray(data["cost"], dtype=float), constraint=float(data["constraint"]))


def gauss_to_dict(channel: GaussChannel) -> dict:
    return {"sigma2": channel.sigma2, "power": channel.power}


def gauss_from_dict(data: dict) -> GaussChannel:
    return GaussChannel(sigma2=float(data["sigma2"]), power=float(data["power"]))
