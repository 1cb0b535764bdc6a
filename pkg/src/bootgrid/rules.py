"""Monotone growth rules, synchronous stepping and closure computation.

Two rule kinds cover every supported family:

* ``threshold`` - an empty cell becomes occupied when at least ``theta``
  of its stencil offsets point at occupied cells.  Offsets are counted
  with multiplicity, which only matters on periodic grids small enough
  for two offsets to wrap onto the same cell.
* ``modified`` - an empty cell becomes occupied when every lattice axis
  has at least one occupied neighbour at distance one.  This is a
  conjunction per axis and is deliberately not encoded as a threshold.

The closure (the fixed point of repeated stepping) is provided twice:
``closure_naive`` iterates the synchronous step until nothing changes,
and ``closure_fast`` runs a work-queue algorithm that touches each cell a
bounded number of times.  They agree bit for bit; the naive form is the
oracle the fast one is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Configuration, GridSpec

FAMILY_KINDS = ("standard", "modified", "one_two", "one_b", "duarte", "abc")

# Queue waves bigger than cells/_DENSE_WAVE_DIVISOR use dense shifted adds
# instead of scatter updates; both apply identical increments.
_DENSE_WAVE_DIVISOR = 24


@dataclass(frozen=True)
class RuleFamily:
    """A named rule family with its integer parameters."""

    kind: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind in ("standard", "modified"):
            (d,) = self.params
            if d not in (1, 2, 3):
                raise ValueError(f"{self.kind} dimension must be 1..3, got {d}")
        elif self.kind == "one_b":
            (b,) = self.params
            if b < 1:
                raise ValueError(f"one_b requires b >= 1, got {b}")
        elif self.kind == "abc":
            a, b, c = self.params
            if not (1 <= a <= b <= c):
                raise ValueError(f"abc requires 1 <= a <= b <= c, got {self.params}")
        elif self.params:
            raise ValueError(f"{self.kind} takes no parameters")

    @staticmethod
    def standard(d: int) -> "RuleFamily":
        return RuleFamily("standard", (d,))

    @staticmethod
    def modified(d: int) -> "RuleFamily":
        return RuleFamily("modified", (d,))

    @staticmethod
    def one_two() -> "RuleFamily":
        return RuleFamily("one_two")

    @staticmethod
    def one_b(b: int) -> "RuleFamily":
        return RuleFamily("one_b", (b,))

    @staticmethod
    def duarte() -> "RuleFamily":
        return RuleFamily("duarte")

    @staticmethod
    def abc(a: int, b: int, c: int) -> "RuleFamily":
        return RuleFamily("abc", (a, b, c))

    @staticmethod
    def parse(name: str) -> "RuleFamily":
        """Parse a CLI family name: standard2, standard3, modified2,
        modified3, 12, 1b:<b>, duarte, abc:<a>,<b>,<c>."""
        name = name.strip()
        if name in ("standard1", "standard2", "standard3"):
            return RuleFamily.standard(int(name[-1]))
        if name in ("modified1", "modified2", "modified3"):
            return RuleFamily.modified(int(name[-1]))
        if name == "12":
            return RuleFamily.one_two()
        if name.startswith("1b:"):
            return RuleFamily.one_b(int(name[3:]))
        if name == "duarte":
            return RuleFamily.duarte()
        if name.startswith("abc:"):
            parts = name[4:].split(",")
            if len(parts) != 3:
                raise ValueError(f"abc family needs three parameters, got {name!r}")
            return RuleFamily.abc(*(int(tok) for tok in parts))
        raise ValueError(f"unknown rule family {name!r}")

    @property
    def name(self) -> str:
        if self.kind == "standard":
            return f"standard{self.params[0]}"
        if self.kind == "modified":
            return f"modified{self.params[0]}"
        if self.kind == "one_two":
            return "12"
        if self.kind == "one_b":
            return f"1b:{self.params[0]}"
        if self.kind == "duarte":
            return "duarte"
        return "abc:" + ",".join(str(v) for v in self.params)

    @property
    def dimension(self) -> int:
        if self.kind in ("standard", "modified"):
            return self.params[0]
        if self.kind == "abc":
            return 3
        return 2


@dataclass(frozen=True)
class Rule:
    """A concrete local growth predicate.

    ``offsets`` are neighbour positions relative to the cell, as (x, y[, z])
    tuples.  For ``threshold`` rules the predicate is
    ``occupied offsets >= theta``; for ``modified`` the offsets are the unit
    vectors and the predicate is per-axis.
    """

    kind: str
    dimension: int
    offsets: tuple[tuple[int, ...], ...]
    theta: int

    def __post_init__(self):
        if self.kind not in ("threshold", "modified"):
            raise ValueError(f"rule kind must be threshold or modified, got {self.kind!r}")
        seen = set()
        for off in self.offsets:
            if len(off) != self.dimension:
                raise ValueError(f"offset {off} does not match dimension {self.dimension}")
            if all(v == 0 for v in off):
                raise ValueError("stencil offsets must be nonzero")
            if off in seen:
                raise ValueError(f"duplicate stencil offset {off}")
            seen.add(off)
        if self.kind == "threshold" and not 1 <= self.theta <= len(self.offsets):
            raise ValueError(f"theta {self.theta} outside 1..{len(self.offsets)}")


def _axis_units(d: int) -> list[tuple[int, ...]]:
    units = []
    for axis in range(d):
        for sign in (1, -1):
            off = [0] * d
            off[axis] = sign
            units.append(tuple(off))
    return units


def make_rule(family: RuleFamily) -> Rule:
    """Build the concrete rule for a family."""
    if family.kind == "standard":
        d = family.params[0]
        return Rule("threshold", d, tuple(_axis_units(d)), d)
    if family.kind == "modified":
        d = family.params[0]
        return Rule("modified", d, tuple(_axis_units(d)), d)
    if family.kind == "one_two":
        return make_rule(RuleFamily.one_b(2))
    if family.kind == "one_b":
        b = family.params[0]
        offsets = [(i, 0) for i in range(1, b + 1)] + [(-i, 0) for i in range(1, b + 1)]
        offsets += [(0, 1), (0, -1)]
        return Rule("threshold", 2, tuple(offsets), b + 1)
    if family.kind == "duarte":
        return Rule("threshold", 2, ((0, 1), (1, 0), (0, -1)), 2)
    if family.kind == "abc":
        a, b, c = family.params
        offsets = [(s * i, 0, 0) for i in range(1, a + 1) for s in (1, -1)]
        offsets += [(0, s * j, 0) for j in range(1, b + 1) for s in (1, -1)]
        offsets += [(0, 0, s * k) for k in range(1, c + 1) for s in (1, -1)]
        return Rule("threshold", 3, tuple(offsets), a + b + c)
    raise ValueError(f"unknown family kind {family.kind!r}")


def _check_dimensions(config: Configuration, rule: Rule) -> None:
    if config.grid.ndim != rule.dimension:
        raise ValueError(
            f"rule dimension {rule.dimension} does not match grid dimension {config.grid.ndim}"
        )


def _shifted_into(out: np.ndarray, src: np.ndarray, offset: tuple[int, ...], periodic: bool):
    """Add src values at cell+offset into out (out[c] += src[c + offset]).

    Works on arrays whose trailing axes are [z, y, x]; leading axes (such
    as a batch axis) are untouched.  Offset component i applies to the
    i-th axis counted from the end.
    """
    nd = out.ndim
    if periodic:
        view = src
        for i, v in enumerate(offset):
            if v:
                view = np.roll(view, -v, axis=nd - 1 - i)
        out += view
        return
    src_idx = [slice(None)] * nd
    dst_idx = [slice(None)] * nd
    for i, v in enumerate(offset):
        axis = nd - 1 - i
        n = out.shape[axis]
        if v == 0:
            continue
        if abs(v) >= n:
            return
        if v > 0:
            src_idx[axis] = slice(v, None)
            dst_idx[axis] = slice(None, n - v)
        else:
            src_idx[axis] = slice(None, v)
            dst_idx[axis] = slice(-v, None)
    out[tuple(dst_idx)] += src[tuple(src_idx)]


def _neighbour_counts(occ: np.ndarray, rule: Rule, periodic: bool) -> np.ndarray:
    counts = np.zeros(occ.shape, dtype=np.uint8)
    occ8 = occ.view(np.uint8) if occ.dtype == bool else occ
    for off in rule.offsets:
        _shifted_into(counts, occ8, off, periodic)
    return counts


def _modified_predicate(occ: np.ndarray, rule: Rule, periodic: bool) -> np.ndarray:
    d = rule.dimension
    pred = None
    occ8 = occ.view(np.uint8) if occ.dtype == bool else occ
    for axis in range(d):
        plus = [0] * d
        plus[axis] = 1
        sat = np.zeros(occ.shape, dtype=np.uint8)
        _shifted_into(sat, occ8, tuple(plus), periodic)
        plus[axis] = -1
        _shifted_into(sat, occ8, tuple(plus), periodic)
        axis_ok = sat > 0
        pred = axis_ok if pred is None else (pred & axis_ok)
    return pred


def step(config: Configuration, rule: Rule) -> tuple[Configuration, int]:
    """One synchronous update.  Returns the new configuration and the
    number of newly occupied cells."""
    _check_dimensions(config, rule)
    occ = config.cells
    periodic = config.grid.periodic
    if rule.kind == "threshold":
        pred = _neighbour_counts(occ, rule, periodic) >= rule.theta
    else:
        pred = _modified_predicate(occ, rule, periodic)
    new = pred & ~occ
    changed = int(np.count_nonzero(new))
    return Configuration(config.grid, occ | new), changed


def is_stable(config: Configuration, rule: Rule) -> bool:
    """True iff one step changes nothing."""
    _, changed = step(config, rule)
    return changed == 0


def closure_naive(config: Configuration, rule: Rule) -> Configuration:
    """Iterate the synchronous step until it stops changing."""
    current = config
    while True:
        current, changed = step(current, rule)
        if changed == 0:
            return current


class _FlatGeometry:
    """Flat-index coordinate arithmetic for the queue closure."""

    def __init__(self, grid: GridSpec):
        self.dims = grid.dims
        self.periodic = grid.periodic
        self.strides = [1]
        for d in grid.dims[:-1]:
            self.strides.append(self.strides[-1] * d)

    def coords(self, flat: np.ndarray) -> list[np.ndarray]:
        out = []
        rest = flat
        for d in self.dims[:-1]:
            out.append(rest % d)
            rest = rest // d
        out.append(rest)
        return out

    def targets(self, coords: list[np.ndarray], offset: tuple[int, ...]) -> np.ndarray:
        """Flat indices of cell+offset, dropping out-of-range cells on open
        grids and wrapping on periodic ones."""
        if self.periodic:
            flat = None
            for c, v, d, s in zip(coords, offset, self.dims, self.strides):
                t = (c + v) % d if v else c
                flat = t * s if flat is None else flat + t * s
            return flat
        mask = None
        for c, v, d in zip(coords, offset, self.dims):
            if v:
                m = (c + v >= 0) & (c + v < d)
                mask = m if mask is None else (mask & m)
        flat = None
        for c, v, s in zip(coords, offset, self.strides):
            t = c + v if v else c
            flat = t * s if flat is None else flat + t * s
        return flat if mask is None else flat[mask]


def _wave_counts_threshold(
    occ_flat, counts, wave_flat, wave_dense, geom, rule, shape, periodic
) -> np.ndarray:
    """Apply one wave's reverse-stencil increments; return candidate cells
    that reached the threshold."""
    cells = occ_flat.size
    if wave_dense is not None:
        # Dense wave: identical increments computed with shifted adds.
        contrib = np.zeros(shape, dtype=np.uint8)
        wave8 = wave_dense.view(np.uint8)
        for off in rule.offsets:
            _shifted_into(contrib, wave8, off, periodic)
        counts += contrib.reshape(-1)
        cand = np.flatnonzero((counts >= rule.theta) & ~occ_flat)
        return cand
    coords = geom.coords(wave_flat)
    all_targets = []
    for off in rule.offsets:
        # A cell at c sees the wave cell f when f = c + off, so c = f - off.
        t = geom.targets(coords, tuple(-v for v in off))
        if t.size:
            t = t[~occ_flat[t]]
        if t.size:
            np.add.at(counts, t, 1)
            all_targets.append(t)
    if not all_targets:
        return np.empty(0, dtype=np.int64)
    t = np.concatenate(all_targets)
    sat = counts[t] >= rule.theta
    return np.unique(t[sat])


def _wave_flags_modified(
    occ_flat, axis_flags, axis_count, wave_flat, geom, rule
) -> np.ndarray:
    d = rule.dimension
    coords = geom.coords(wave_flat)
    completed = []
    for axis in range(d):
        off = [0] * d
        targets = []
        for sign in (1, -1):
            off[axis] = sign
            t = geom.targets(coords, tuple(off))
            if t.size:
                targets.append(t)
        off[axis] = 0
        if not targets:
            continue
        t = np.concatenate(targets)
        t = t[~occ_flat[t] & ~axis_flags[axis][t]]
        if not t.size:
            continue
        u = np.unique(t)
        axis_flags[axis][u] = True
        axis_count[u] += 1
        completed.append(u[axis_count[u] == d])
    if not completed:
        return np.empty(0, dtype=np.int64)
    return np.unique(np.concatenate(completed))


def closure_fast(config: Configuration, rule: Rule) -> Configuration:
    """Work-queue closure, identical output to :func:`closure_naive`.

    Per-empty-cell state is kept (an occupied-neighbour counter for
    threshold rules, per-axis flags plus a satisfied-axis counter for the
    modified rule).  The queue starts with the initially occupied cells;
    when a cell becomes occupied the state of every cell whose
    neighbourhood contains it is updated and cells reaching the predicate
    join the next wave.  Each cell is enqueued at most once, so total work
    is O(cells x stencil size).  Large waves apply their increments with
    dense shifted adds rather than scatters; the increments are the same.
    """
    _check_dimensions(config, rule)
    grid = config.grid
    cells = grid.cells
    shape = grid.shape
    periodic = grid.periodic
    geom = _FlatGeometry(grid)

    occ_nd = config.cells.copy()
    occ_flat = occ_nd.reshape(-1)

    if rule.kind == "threshold":
        counts = np.zeros(cells, dtype=np.uint8)
    else:
        axis_flags = [np.zeros(cells, dtype=bool) for _ in range(rule.dimension)]
        axis_count = np.zeros(cells, dtype=np.uint8)

    wave_flat = np.flatnonzero(occ_flat)
    wave_is_whole_initial = True
    while wave_flat.size:
        if rule.kind == "threshold":
            dense = None
            if wave_flat.size > cells // _DENSE_WAVE_DIVISOR:
                if wave_is_whole_initial:
                    dense = occ_nd.copy()
                else:
                    dense = np.zeros(shape, dtype=bool)
                    dense.reshape(-1)[wave_flat] = True
            cand = _wave_counts_threshold(
                occ_flat, counts, wave_flat, dense, geom, rule, shape, periodic
            )
        else:
            cand = _wave_flags_modified(occ_flat, axis_flags, axis_count, wave_flat, geom, rule)
        occ_flat[cand] = True
        wave_flat = cand
        wave_is_whole_initial = False
    return Configuration(grid, occ_nd)


def closure(config: Configuration, rule: Rule) -> Configuration:
    """Alias for the production closure."""
    return closure_fast(config, rule)


def closure_batch(occ: np.ndarray, rule: Rule, periodic: bool = False) -> np.ndarray:
    """Closure of many stacked configurations at once.

    ``occ`` has shape (m, *grid shape) and is not modified.  Slice ``i`` of
    the result equals ``closure_naive`` of slice ``i``; the batch form just
    amortises the numpy overhead when the grids are small.
    """
    occ = occ.astype(bool)
    while True:
        if rule.kind == "threshold":
            counts = np.zeros(occ.shape, dtype=np.uint8)
            occ8 = occ.view(np.uint8)
            for off in rule.offsets:
                _shifted_into(counts, occ8, off, periodic)
            pred = counts >= rule.theta
        else:
            pred = _modified_predicate(occ, rule, periodic)
        new = pred & ~occ
        if not new.any():
            return occ
        occ |= new
