"""Monte-Carlo sampling of radiative cascades over the two-ladder rate graph.

A trajectory starts in one dressed state and hops between the branches,
waiting an exponential time set by the current state's total rate and
choosing the next level in proportion to the partial rates, until it
reaches a dark state (or a jump cap).  Times are in units of
``1/gamma0``.

Randomness comes from a counter-based generator keyed as
``seed + (stream << 64)``, so trajectory ``i`` of an ensemble (stream
``i``) is reproducible bit for bit on any platform and independent of
how many trajectories run concurrently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ladder import DressedState, TransitionRecord
from .overlaps import ModelParams
from .rates import total_rate

__all__ = [
    "Trajectory",
    "SpectrumHistogram",
    "sample_trajectory",
    "sample_ensemble",
    "emission_spectrum",
    "write_trajectory_log",
]

_MAX_SEED = 2**64


@dataclass(frozen=True)
class Trajectory:
    """One sampled cascade.

    ``jumps`` holds ``(time, record)`` pairs with strictly increasing
    absolute times; consecutive records chain.  ``truncated`` marks a
    trajectory stopped by the jump cap rather than by reaching a dark
    state.
    """

    seed: int
    stream: int
    start: DressedState
    jumps: tuple[tuple[float, TransitionRecord], ...]
    truncated: bool = False


@dataclass(frozen=True, eq=False)
class SpectrumHistogram:
    """Photon-frequency histogram normalized to the total photon count.

    ``bin_edges`` has one more entry than ``weights``; bins are centered
    on multiples of the bin width so comb lines do not straddle edges.
    """

    bin_edges: np.ndarray
    weights: np.ndarray
    counts: np.ndarray
    total_photons: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


@dataclass(frozen=True)
class _JumpKernel:
    total: float
    records: tuple[TransitionRecord, ...]
    cumulative: np.ndarray = field(compare=False)


@lru_cache(maxsize=4096)
def _jump_kernel(state: DressedState, params: ModelParams) -> _JumpKernel:
    table = total_rate(state, params)
    live = tuple(t for t in table.transitions if t.rate_over_gamma0 > 0.0)
    if not live:
        return _JumpKernel(0.0, (), np.empty(0))
    rates = np.array([t.rate_over_gamma0 for t in live])
    cumulative = np.cumsum(rates)
    total = float(cumulative[-1])
    cumulative /= total
    cumulative[-1] = 1.0
    return _JumpKernel(total, live, cumulative)


def _checked_seed(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value < _MAX_SEED:
        raise ValueError(f"0 <= {name} < 2**64 required, got {value}")
    return value


def sample_trajectory(
    start: DressedState,
    params: ModelParams,
    seed: int,
    max_jumps: int = 1000,
    stream: int = 0,
) -> Trajectory:
    """Sample one cascade, deterministically for a given (seed, stream)."""
    seed = _checked_seed(seed, "seed")
    stream = _checked_seed(stream, "stream")
    if isinstance(max_jumps, bool) or not isinstance(max_jumps, int) or max_jumps < 1:
        raise ValueError(f"max_jumps must be an integer >= 1, got {max_jumps!r}")

    rng = np.random.Generator(np.random.Philox(key=seed + (stream << 64)))
    state = start
    time = 0.0
    jumps: list[tuple[float, TransitionRecord]] = []
    truncated = False
    while True:
        kernel = _jump_kernel(state, params)
        if kernel.total <= 0.0:
            break
        if len(jumps) >= max_jumps:
            truncated = True
            break
        time += rng.exponential(1.0 / kernel.total)
        pick = int(np.searchsorted(kernel.cumulative, rng.random(), side="right"))
        record = kernel.records[min(pick, len(kernel.records) - 1)]
        jumps.append((time, record))
        state = record.final
    return Trajectory(
        seed=seed, stream=stream, start=start, jumps=tuple(jumps), truncated=truncated
    )


def sample_ensemble(
    start: DressedState,
    params: ModelParams,
    seed: int,
    n_trajectories: int,
    max_jumps: int = 1000,
    threads: int = 1,
) -> list[Trajectory]:
    """Sample ``n_trajectories`` cascades on streams ``0..n-1``.

    Results are identical for any thread count; threading only overlaps
    the table building and sampling work.
    """
    if n_trajectories < 0:
        raise ValueError("n_trajectories must be >= 0")
    streams = range(n_trajectories)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(
                pool.map(
                    lambda s: sample_trajectory(start, params, seed, max_jumps, s),
                    streams,
                )
            )
    return [sample_trajectory(start, params, seed, max_jumps, s) for s in streams]


def emission_spectrum(trajectories, bin_width: float) -> SpectrumHistogram:
    """Histogram of all emitted photon frequencies, normalized to count 1.

    Bin ``k`` is centered on ``k * bin_width``.  Frequencies are in the
    units carried by the transition records (the bare transition
    frequency for tables built by this package).
    """
    bin_width = float(bin_width)
    if not (math.isfinite(bin_width) and bin_width > 0.0):
        raise ValueError(f"bin_width must be > 0, got {bin_width!r}")
    freqs = np.array(
        [rec.photon_freq for traj in trajectories for _, rec in traj.jumps]
    )
    if freqs.size == 0:
        return SpectrumHistogram(
            bin_edges=np.empty(0),
            weights=np.empty(0),
            counts=np.empty(0, dtype=np.int64),
            total_photons=0,
        )
    ks = np.rint(freqs / bin_width).astype(np.int64)
    k_lo, k_hi = int(ks.min()), int(ks.max())
    counts = np.bincount(ks - k_lo, minlength=k_hi - k_lo + 1)
    edges = (np.arange(k_lo, k_hi + 2) - 0.5) * bin_width
    return SpectrumHistogram(
        bin_edges=edges,
        weights=counts / freqs.size,
        counts=counts,
        total_photons=int(freqs.size),
    )


def write_trajectory_log(trajectories, path, delimiter: str = ",") -> None:
    """Write one line per jump: trajectory id, jump index, time, states, photon.

    Floats are written with ``repr`` so the log round-trips exactly.
    """
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            "# trajectory_id,jump_index,time,from_branch,from_n,"
            "to_branch,to_n,photon_freq\n".replace(",", delimiter)
        )
        for traj_id, traj in enumerate(trajectories):
            for jump_index, (time, rec) in enumerate(traj.jumps):
                row = (
                    str(traj_id),
                    str(jump_index),
                    repr(time),
                    rec.initial.branch,
                    str(rec.initial.n),
                    rec.final.branch,
                    str(rec.final.n),
                    repr(rec.photon_freq),
                )
                handle.write(delimiter.join(row) + "\n")
