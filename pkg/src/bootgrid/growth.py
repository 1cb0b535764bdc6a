"""Rectangle-growth experiments for the anisotropic (1,2) rule.

Two concrete, enumerable growth events are measured exactly and by Monte
Carlo:

* ``east_column``: a fully occupied 2-wide, n-tall rectangle sits next to
  one column of n random helper cells.  The event is that the closure
  occupies the whole helper column.
* ``north_rows``: a fully occupied x-wide, 2-tall rectangle sits below two
  rows of x random helper cells each.  The event is that the closure
  occupies the whole first helper row.

Exact probabilities come from exhaustive enumeration of every helper
configuration.  The enumerator simulates 64 configurations per machine
word: each helper cell becomes a bitplane over configurations and the
update rule is evaluated with bitwise arithmetic.  Closed around a full
rectangle, the dynamics never leave the helper region, so only helper
cells need planes; the rectangle contributes fixed neighbour counts.
Tests check the reduced dynamics against full-grid closures cell by cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, exp, expm1, log1p

import numpy as np

from .montecarlo import Estimate
from .rng import Stream

COLUMN_MAX_HEIGHT = 20
ROW_MAX_WIDTH = 12

_STREAM_DOMAIN = 0x67726F77  # distinct from the fill-probability domain


@dataclass(frozen=True)
class GrowthEventSpec:
    """Which growth event to sample and its rectangle size."""

    direction: str  # "east_column" or "north_rows"
    size: int  # rectangle height n (east_column) or width x (north_rows)

    def __post_init__(self):
        if self.direction not in ("east_column", "north_rows"):
            raise ValueError(f"unknown growth direction {self.direction!r}")
        if self.size < 1:
            raise ValueError(f"size must be >= 1, got {self.size}")

    @property
    def helper_depth(self) -> int:
        return 1 if self.direction == "east_column" else 2

    @property
    def helper_cells(self) -> int:
        return self.size * self.helper_depth


@dataclass(frozen=True)
class GrowthPolynomial:
    """Event probability as an exact polynomial in p.

    ``coeffs[k]`` multiplies p**k.  Counting arguments over helper subsets
    always produce integer coefficients; they are stored as Fractions so
    evaluation can stay exact when wanted.
    """

    coeffs: tuple[Fraction, ...]

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, p: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * p + float(c)
        return acc

    def evaluate_exact(self, p: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * p + c
        return acc

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)


def _counts_to_polynomial(success_by_k: np.ndarray, m: int) -> GrowthPolynomial:
    """Expand sum_k c_k p^k (1-p)^(m-k) into monomial coefficients."""
    coeffs = [0] * (m + 1)
    for k, ck in enumerate(success_by_k.tolist()):
        if ck == 0:
            continue
        for j in range(m - k + 1):
            coeffs[k + j] += ck * comb(m - k, j) * (-1) ** j
    return GrowthPolynomial(tuple(Fraction(c) for c in coeffs))


# ---------------------------------------------------------------------------
# Bit-parallel helper-region dynamics (64 configurations per uint64 word)
# ---------------------------------------------------------------------------


def _ge2_of5(a, b, c, d, e):
    s1 = a ^ b
    c1 = a & b
    s2 = c ^ d
    c2 = c & d
    return c1 | c2 | (s1 & s2) | (e & (s1 | s2))


def _ge3_of5(a, b, c, d, e):
    ab = a ^ b
    t1 = (a & b) | (c & ab)
    s1 = ab ^ c
    sd = s1 ^ d
    t2 = (s1 & d) | (e & sd)
    s2 = sd ^ e
    return (t1 & t2) | (s2 & (t1 | t2))


def _col_neighbour(planes: np.ndarray, shift: int) -> np.ndarray:
    """Neighbour plane at column index + shift, zero outside the strip.
    ``planes`` is (..., columns, words)."""
    out = np.zeros_like(planes)
    if shift > 0:
        out[..., :-shift, :] = planes[..., shift:, :]
    elif shift < 0:
        out[..., -shift:, :] = planes[..., :shift, :]
    return out


def _index_bitplanes(idx: np.ndarray, n_cells: int) -> np.ndarray:
    """Plane h holds bit h of every configuration index, packed 64 per word."""
    words = idx.size // 64
    planes = np.empty((n_cells, words), dtype=np.uint64)
    for h in range(n_cells):
        bits = ((idx >> np.uint32(h)) & np.uint32(1)).astype(np.uint8)
        planes[h] = np.packbits(bits, bitorder="little").view(np.uint64)
    return planes


def _plane_to_bool(plane: np.ndarray) -> np.ndarray:
    return np.unpackbits(plane.view(np.uint8), bitorder="little").astype(bool)


def _popcount_u32(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint32)
    v = v - ((v >> np.uint32(1)) & np.uint32(0x55555555))
    v = (v & np.uint32(0x33333333)) + ((v >> np.uint32(2)) & np.uint32(0x33333333))
    v = (v + (v >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    return ((v * np.uint32(0x01010101)) >> np.uint32(24)).astype(np.int64)


def _run_column_planes(planes: np.ndarray) -> np.ndarray:
    """Helper-column dynamics, planes shaped (n, words).

    Every helper cell has both west neighbours inside the full rectangle,
    so under the (1,2) threshold it turns occupied as soon as one of its
    in-column neighbours is occupied: plain nearest-neighbour spreading.
    Returns the all-cells-occupied plane.
    """
    p = planes.copy()
    n = p.shape[0]
    while True:
        grown = p.copy()
        grown[:-1] |= p[1:]
        grown[1:] |= p[:-1]
        if not (grown ^ p).any():
            break
        p = grown
    full = p[0].copy()
    for i in range(1, n):
        full &= p[i]
    return full


def _run_row_planes(planes: np.ndarray) -> np.ndarray:
    """Two-helper-row dynamics, planes shaped (2, x, words).

    Row 0 is the first row north of the full rectangle: its south
    neighbour is always occupied, so the threshold-3 rule fires on >= 2 of
    {W1, W2, E1, E2, N}.  Row 1 has nothing above it and fires on >= 3 of
    {W1, W2, E1, E2, S}.  Returns the row-0-full plane.
    """
    p = planes.copy()
    x = p.shape[1]
    while True:
        e1 = _col_neighbour(p, 1)
        w1 = _col_neighbour(p, -1)
        e2 = _col_neighbour(p, 2)
        w2 = _col_neighbour(p, -2)
        pred0 = _ge2_of5(w1[0], e1[0], w2[0], e2[0], p[1])
        pred1 = _ge3_of5(w1[1], e1[1], w2[1], e2[1], p[0])
        new0 = p[0] | pred0
        new1 = p[1] | pred1
        if not ((new0 ^ p[0]).any() or (new1 ^ p[1]).any()):
            break
        p[0] = new0
        p[1] = new1
    full = p[0, 0].copy()
    for c in range(1, x):
        full &= p[0, c]
    return full


def _enumerate_success_counts(spec: GrowthEventSpec, chunk_bits: int = 24) -> np.ndarray:
    """success_by_k[k] = number of k-cell helper subsets whose closure
    realises the growth event.  Exhaustive over all 2^cells subsets."""
    n_cells = spec.helper_cells
    total = 1 << n_cells
    chunk = 1 << chunk_bits
    out = np.zeros(n_cells + 1, dtype=np.int64)
    for base in range(0, total, chunk):
        idx = np.arange(base, min(base + chunk, total), dtype=np.uint32)
        valid = idx.size
        pad = (-valid) % 64
        padded = np.concatenate([idx, np.zeros(pad, dtype=np.uint32)]) if pad else idx
        planes = _index_bitplanes(padded, n_cells)
        if spec.direction == "east_column":
            full = _run_column_planes(planes)
        else:
            full = _run_row_planes(planes.reshape(2, spec.size, -1))
        succ = _plane_to_bool(full)[:valid]
        k = _popcount_u32(idx)
        out += np.bincount(k[succ], minlength=n_cells + 1)
    return out


def column_growth_polynomial(n: int) -> GrowthPolynomial:
    """Exact probability that a 2 x n occupied rectangle absorbs its full
    east helper column, as a polynomial in p.  Equals 1 - (1-p)^n."""
    if not 1 <= n <= COLUMN_MAX_HEIGHT:
        raise ValueError(f"column enumeration supports 1 <= n <= {COLUMN_MAX_HEIGHT}, got {n}")
    counts = _enumerate_success_counts(GrowthEventSpec("east_column", n))
    return _counts_to_polynomial(counts, n)


def row_growth_polynomial(x: int) -> GrowthPolynomial:
    """Exact probability that an x-wide, 2-tall occupied rectangle absorbs
    its full first north helper row, as a polynomial in p."""
    if not 1 <= x <= ROW_MAX_WIDTH:
        raise ValueError(f"row enumeration supports 1 <= x <= {ROW_MAX_WIDTH}, got {x}")
    counts = _enumerate_success_counts(GrowthEventSpec("north_rows", x))
    return _counts_to_polynomial(counts, 2 * x)


def growth_polynomial(spec: GrowthEventSpec) -> GrowthPolynomial:
    if spec.direction == "east_column":
        return column_growth_polynomial(spec.size)
    return row_growth_polynomial(spec.size)


def estimate_growth_mc(spec: GrowthEventSpec, p: float, trials: int, seed: int) -> Estimate:
    """Monte Carlo estimate of the same event as the exact polynomial.

    Helper cell ``c`` of trial ``i`` uses uniform ``c`` of substream
    ``(seed, domain, i)``, so results do not depend on how trials are
    chunked.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n_cells = spec.helper_cells
    root = Stream((seed, _STREAM_DOMAIN))
    successes = 0
    chunk = 1 << 16
    for start in range(0, trials, chunk):
        m = min(chunk, trials - start)
        u = root.uniform_block(start, m, n_cells)
        occ = u < p
        pad = (-m) % 64
        if pad:
            occ = np.vstack([occ, np.zeros((pad, n_cells), dtype=bool)])
        planes = np.empty((n_cells, occ.shape[0] // 64), dtype=np.uint64)
        for h in range(n_cells):
            planes[h] = np.packbits(occ[:, h], bitorder="little").view(np.uint64)
        if spec.direction == "east_column":
            full = _run_column_planes(planes)
        else:
            full = _run_row_planes(planes.reshape(2, spec.size, -1))
        succ = _plane_to_bool(full)[: occ.shape[0]]
        if pad:
            succ = succ[:-pad]
        successes += int(succ[:m].sum())
    mean = successes / trials
    stderr = (mean * (1.0 - mean) / trials) ** 0.5
    return Estimate(mean=mean, stderr=stderr, trials=trials, seed=seed)


def horizontal_step_probability(p: float, n: float) -> float:
    """Probability that a height-n rectangle completes one full horizontal
    growth stage.

    A single column is absorbed with probability 1 - (1-p)^n; a stage
    spans the gap between consecutive stage widths x_n = exp(n*p)/p, so
    the stage succeeds with probability (1 - (1-p)^n)^(x_{n+1} - x_n).
    With this stage geometry the value tends to 1/e as p -> 0 at a fixed
    relative stage position.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n * p > 700.0:
        raise OverflowError(
            f"exp(n*p) with n*p = {n * p:.3g} overflows a float; stage width is not representable"
        )
    # width gap x_{n+1} - x_n = expm1(p) * exp(n*p) / p
    gap = expm1(p) * exp(n * p) / p
    # miss probability of one column, q = (1-p)^n, computed in log space
    log_q = n * log1p(-p)
    if log_q > -1e-15:
        return 0.0  # (1-p)^n is 1 to machine precision: no seeds to grow on
    log_hit = log1p(-exp(log_q))
    return exp(gap * log_hit)


def stage_width(p: float, n: float) -> float:
    """The horizontal stage width x_n = exp(n*p)/p used above."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    if n * p > 700.0:
        raise OverflowError(f"exp(n*p) with n*p = {n * p:.3g} overflows a float")
    return exp(n * p) / p
