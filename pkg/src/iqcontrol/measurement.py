"""Projective measurements: Born probabilities, seeded sampling, collapse.

A measurement is defined by a partition of the basis labels 1..N into
blocks; each block is one outcome (the projector onto its span).  Shot k
of a multi-shot run draws from a generator seeded by (master seed, k),
so runs are reproducible and shots are order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .amplification import GoodSubspace
from .core import StateVector
from .errors import DimensionMismatchError, MeasurementGuardError

IMPOSSIBLE_BLOCK_TOL = 1e-15

__all__ = [
    "MeasurementPartition",
    "MeasurementOutcome",
    "born_probabilities",
    "sample_collapse",
    "measurement_histogram",
]


@dataclass(frozen=True)
class MeasurementPartition:
    """Disjoint nonempty blocks of basis labels covering 1..N exactly."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks or any(not b for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        n = len(flat)
        if sorted(flat) != list(range(1, n + 1)):
            raise ValueError(
                f"blocks must partition 1..N exactly, got labels {sorted(set(flat))}"
            )

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.blocks)

    @classmethod
    def binary(cls, good: GoodSubspace) -> "MeasurementPartition":
        """Two blocks: the good indices and their complement."""
        rest = tuple(sorted(set(range(1, good.dim + 1)) - good.indices))
        return cls((tuple(sorted(good.indices)), rest))

    @classmethod
    def per_index(cls, dim: int) -> "MeasurementPartition":
        return cls(tuple((i,) for i in range(1, dim + 1)))


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One sampled outcome: which block fired and the collapsed state.

    ``block_index`` is the 0-based position in ``partition.blocks``;
    ``block`` is the 1-based label set itself.
    """

    block_index: int
    block: tuple[int, ...]
    probability: float
    collapsed: StateVector


def born_probabilities(state: StateVector, partition: MeasurementPartition) -> np.ndarray:
    """Per-block probabilities: sum of |c_i|^2 over each block."""
    if partition.dim != state.dim:
        raise DimensionMismatchError(
            f"partition covers {partition.dim} labels, state has {state.dim}"
        )
    pops = state.populations()
    return np.array([sum(pops[i - 1] for i in block) for block in partition.blocks])


def _shot_rng(seed: int, shot: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(shot),))
    return np.random.default_rng(ss)


def _select_block(probs: np.ndarray, u: float) -> int:
    """Index of the block whose cumulative interval contains u.

    Zero-width intervals are unselectable; if float edge effects land on
    one anyway, that is the numerically impossible branch and it raises.
    """
    cum = np.cumsum(probs)
    idx = int(np.searchsorted(cum, u, side="right"))
    idx = min(idx, len(probs) - 1)
    if probs[idx] < IMPOSSIBLE_BLOCK_TOL:
        raise MeasurementGuardError(
            f"sampled block {idx} has probability {probs[idx]:.3e} < {IMPOSSIBLE_BLOCK_TOL:g}"
        )
    return idx


def _collapse(state: StateVector, block: tuple[int, ...], probability: float) -> StateVector:
    mask = np.zeros(state.dim, dtype=bool)
    for i in block:
        mask[i - 1] = True
    projected = np.where(mask, state.amplitudes, 0.0)
    return StateVector(projected / np.sqrt(probability))


def sample_collapse(
    state: StateVector,
    partition: MeasurementPartition,
    seed: int,
    shot: int = 0,
) -> MeasurementOutcome:
    """Draw one outcome by the Born rule and collapse onto its block.

    Deterministic in (state, partition, seed, shot): the generator is
    derived from the seed and the shot index only.
    """
    probs = born_probabilities(state, partition)
    u = float(_shot_rng(seed, shot).random())
    idx = _select_block(probs, u)
    block = partition.blocks[idx]
    p = float(probs[idx])
    return MeasurementOutcome(
        block_index=idx,
        block=block,
        probability=p,
        collapsed=_collapse(state, block, p),
    )


def measurement_histogram(
    state: StateVector,
    partition: MeasurementPartition,
    seed: int,
    shots: int,
) -> list[int]:
    """Outcome counts per block over ``shots`` independent draws.

    Shot k draws exactly what ``sample_collapse(..., shot=k)`` would, so
    histograms and single-shot runs agree outcome by outcome.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = born_probabilities(state, partition)
    counts = [0] * len(partition.blocks)
    for k in range(shots):
        u = float(_shot_rng(seed, k).random())
        counts[_select_block(probs, u)] += 1
    return counts
