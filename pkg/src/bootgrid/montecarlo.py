"""Fill-probability estimation and critical-threshold search.

A trial fills when the closure of a p-random configuration occupies the
whole grid.  Trial ``i`` of a run draws one uniform per cell from
substream ``(seed, domain, i)`` and thresholds it at p, which has two
consequences used throughout the tests:

* determinism: results depend only on (inputs, seed), never on chunking
  or the number of worker threads;
* coupling: for p1 < p2 on the same seed, every trial's p1 configuration
  is a subset of its p2 configuration, so the fill indicator is monotone
  trial by trial, not just on average.

The threshold p_c(L) is located by bisection on p of the coupled fill
curve, which is a nondecreasing step function once the seed is fixed.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .lattice import Configuration, GridSpec
from .rng import Stream, derive_seed
from .rules import Rule, RuleFamily, closure_batch, closure_fast, make_rule

_STREAM_DOMAIN = 0x66696C6C

EXACT_MAX_CELLS = 20

# Grids up to this many cells are closed in stacked batches; larger ones go
# through the queue closure one trial at a time.
_BATCH_CELL_LIMIT = 4096


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error and provenance."""

    mean: float
    stderr: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"an estimate needs at least one trial, got {self.trials}")
        if self.stderr < 0.0:
            raise ValueError(f"stderr must be nonnegative, got {self.stderr}")


@dataclass(frozen=True)
class SweepRow:
    """One (family, dims, p) cell of a sweep table."""

    family: str
    dims: tuple[int, ...]
    p: float
    mean: float
    stderr: float
    trials: int
    seed: int


def _chunk_size(cells: int) -> int:
    return max(1, min(4096, (1 << 16) // max(cells, 1)))


def _trial_block_successes(
    rule: Rule, grid: GridSpec, p: float, root: Stream, start: int, m: int
) -> int:
    """Number of filling trials among trial indices [start, start+m)."""
    cells = grid.cells
    u = root.uniform_block(start, m, cells)
    occ = (u < p).reshape((m,) + grid.shape)
    if cells <= _BATCH_CELL_LIMIT:
        closed = closure_batch(occ, rule, periodic=grid.periodic)
        return int(closed.reshape(m, -1).all(axis=1).sum())
    successes = 0
    for i in range(m):
        cfg = Configuration(grid, occ[i])
        successes += closure_fast(cfg, rule).is_full()
    return successes


def fill_probability(
    rule: Rule,
    grid: GridSpec,
    p: float,
    trials: int,
    seed: int,
    threads: int = 1,
) -> Estimate:
    """Fraction of trials whose closure is the full grid."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    root = Stream((seed, _STREAM_DOMAIN))
    chunk = _chunk_size(grid.cells)
    starts = [(s, min(chunk, trials - s)) for s in range(0, trials, chunk)]
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(
                pool.map(lambda sm: _trial_block_successes(rule, grid, p, root, *sm), starts)
            )
        successes = sum(counts)
    else:
        successes = sum(_trial_block_successes(rule, grid, p, root, s, m) for s, m in starts)
    mean = successes / trials
    stderr = (mean * (1.0 - mean) / trials) ** 0.5
    return Estimate(mean=mean, stderr=stderr, trials=trials, seed=seed)


def fill_success_counts(rule: Rule, grid: GridSpec) -> np.ndarray:
    """counts[k] = number of k-cell subsets whose closure is the full grid.

    Exhaustive over all 2^cells subsets; refused above EXACT_MAX_CELLS.
    Cell ``i`` of the grid (flat order) corresponds to bit ``i`` of the
    subset index.
    """
    cells = grid.cells
    if cells > EXACT_MAX_CELLS:
        raise ValueError(f"exact enumeration supports at most {EXACT_MAX_CELLS} cells, got {cells}")
    total = 1 << cells
    counts = np.zeros(cells + 1, dtype=np.int64)
    chunk = min(total, 1 << 18)
    for base in range(0, total, chunk):
        idx = np.arange(base, base + chunk, dtype=np.uint32)
        bits = ((idx[:, None] >> np.arange(cells, dtype=np.uint32)[None, :]) & 1).astype(bool)
        occ = bits.reshape((chunk,) + grid.shape)
        closed = closure_batch(occ, rule, periodic=grid.periodic)
        full = closed.reshape(chunk, -1).all(axis=1)
        k = bits.sum(axis=1, dtype=np.int64)
        counts += np.bincount(k[full], minlength=cells + 1)
    return counts


def fill_probability_exact(rule: Rule, grid: GridSpec, p: float) -> float:
    """Exact fill probability: sum over filling subsets of p^k (1-p)^(n-k)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    counts = fill_success_counts(rule, grid)
    n = grid.cells
    total = 0.0
    for k, ck in enumerate(counts.tolist()):
        if ck:
            total += ck * p**k * (1.0 - p) ** (n - k)
    return total


def estimate_pc(
    rule: Rule,
    grid: GridSpec,
    target: float = 0.5,
    p_tolerance: float = 1e-3,
    trials_per_probe: int = 2000,
    seed: int = 0,
    threads: int = 1,
) -> Estimate:
    """Bisection for the density where the fill probability crosses ``target``.

    Every probe reuses the same seed, so all probes share one coupled set
    of per-trial uniforms and the measured fill curve is exactly
    nondecreasing in p.  The returned mean is the bracket midpoint and the
    stderr is the bracket half-width (Monte Carlo noise moves the crossing
    itself by about sqrt(target(1-target)/trials) in fill units).
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie strictly between 0 and 1, got {target}")
    if p_tolerance <= 0.0:
        raise ValueError(f"p_tolerance must be positive, got {p_tolerance}")
    lo, hi = 0.0, 1.0
    total_trials = 0
    while hi - lo > p_tolerance:
        mid = 0.5 * (lo + hi)
        est = fill_probability(rule, grid, mid, trials_per_probe, seed, threads)
        total_trials += est.trials
        if est.mean >= target:
            hi = mid
        else:
            lo = mid
    return Estimate(
        mean=0.5 * (lo + hi),
        stderr=0.5 * (hi - lo),
        trials=max(total_trials, 1),
        seed=seed,
    )


def sweep(
    family: RuleFamily,
    dims_list: list[tuple[int, ...]],
    p_list: list[float],
    trials: int,
    seed: int,
    boundary: str = "open",
    threads: int = 1,
) -> list[SweepRow]:
    """Fill estimates over a (dims x p) grid, one row per combination.

    Each dims entry gets its own derived seed, shared across all p values
    so the rows of one grid size are coupled and nondecreasing in p.
    """
    if not dims_list or not p_list:
        raise ValueError("dims_list and p_list must be nonempty")
    rule = make_rule(family)
    rows = []
    for di, dims in enumerate(dims_list):
        grid = GridSpec(dims, boundary)
        row_seed = derive_seed(seed, di)
        for p in p_list:
            est = fill_probability(rule, grid, p, trials, row_seed, threads)
            rows.append(
                SweepRow(
                    family=family.name,
                    dims=tuple(dims),
                    p=p,
                    mean=est.mean,
                    stderr=est.stderr,
                    trials=est.trials,
                    seed=row_seed,
                )
            )
    return rows
