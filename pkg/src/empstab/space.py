"""The 1D phase space: circle R/Z or unit interval, with a uniform cell grid.

Everything downstream lives on a grid of N half-open cells [i/N, (i+1)/N).
Balls are genuine metric balls: an arc (possibly wrapping) on the circle, a
clipped subinterval on [0,1].  Overlaps of balls with cells are computed in
closed form, so kernel rows built from them are exact up to float rounding.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError


class Topology(Enum):
    CIRCLE = "circle"
    INTERVAL = "interval"


def distance(topology, a, b):
    """Metric distance between points; vectorized over numpy inputs."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    if topology is Topology.CIRCLE:
        d = d % 1.0
        d = np.minimum(d, 1.0 - d)
    return d if d.ndim else float(d)


def wrap(topology, x):
    """Reduce points back into the space (mod 1 or clip to [0,1])."""
    x = np.asarray(x, dtype=float)
    if topology is Topology.CIRCLE:
        x = x % 1.0
    else:
        x = np.clip(x, 0.0, 1.0)
    return x if x.ndim else float(x)


@dataclass(frozen=True)
class IntervalSet:
    """A union of at most two disjoint segments of [0,1] (a ball's trace).

    ``segments`` is a tuple of (lo, hi) pairs with 0 <= lo < hi <= 1; a
    wrapping circle arc is stored as its two pieces.
    """

    segments: tuple
    length: float


def ball(topology, center, radius):
    """Open ball B_radius(center) intersected with the space, as an IntervalSet.

    On the circle the radius must stay below 1/2 so the ball is a proper arc
    (length exactly 2*radius).  On the interval the ball is truncated at the
    endpoints and its length is min(center+radius,1) - max(center-radius,0).
    """
    if topology is Topology.CIRCLE:
        if not 0.0 < radius < 0.5:
            raise ParameterError(
                f"circle ball radius must lie in (0, 1/2), got {radius}"
            )
        c = center % 1.0
        lo, hi = c - radius, c + radius
        if lo < 0.0:
            segs = ((lo + 1.0, 1.0), (0.0, hi))
        elif hi > 1.0:
            segs = ((lo, 1.0), (0.0, hi - 1.0))
        else:
            segs = ((lo, hi),)
        length = sum(b - a for a, b in segs)
        return IntervalSet(segs, length)

    if not 0.0 < radius < 1.0:
        raise ParameterError(
            f"interval ball radius must lie in (0, 1), got {radius}"
        )
    if not 0.0 <= center <= 1.0:
        raise ParameterError(f"center {center} outside [0, 1]")
    lo = max(center - radius, 0.0)
    hi = min(center + radius, 1.0)
    return IntervalSet(((lo, hi),), hi - lo)


@dataclass(frozen=True)
class Grid:
    """Uniform partition of the space into n_cells half-open cells."""

    topology: Topology
    n_cells: int

    def __post_init__(self):
        if self.n_cells < 1:
            raise ParameterError(f"n_cells must be >= 1, got {self.n_cells}")

    @property
    def delta(self):
        return 1.0 / self.n_cells

    @property
    def centers(self):
        return (np.arange(self.n_cells) + 0.5) * self.delta

    def cell_of(self, x):
        """Index of the cell containing x; vectorized."""
        idx = np.floor(np.asarray(x, dtype=float) * self.n_cells).astype(np.int64)
        if self.topology is Topology.CIRCLE:
            idx = idx % self.n_cells
        else:
            idx = np.clip(idx, 0, self.n_cells - 1)
        return idx if idx.ndim else int(idx)


def _segment_overlaps(grid, lo, hi):
    """Per-cell overlap lengths of one segment [lo, hi) with the grid cells.

    Returns (indices, lengths); exact up to rounding since cell edges are
    i/N computed identically on both sides of each boundary.
    """
    n = grid.n_cells
    delta = grid.delta
    i0 = min(max(int(np.floor(lo * n)), 0), n - 1)
    i1 = min(max(int(np.ceil(hi * n)) - 1, i0), n - 1)
    idx = np.arange(i0, i1 + 1)
    left = np.maximum(lo, idx * delta)
    right = np.minimum(hi, (idx + 1) * delta)
    lengths = np.maximum(right - left, 0.0)
    keep = lengths > 0.0
    return idx[keep], lengths[keep]


def cell_overlap(grid, interval_set):
    """Vector of per-cell Lebesgue overlaps with an IntervalSet.

    The entries sum to interval_set.length to within ~1e-15 per segment and
    each entry is at most one cell width.
    """
    out = np.zeros(grid.n_cells)
    for lo, hi in interval_set.segments:
        idx, lengths = _segment_overlaps(grid, lo, hi)
        out[idx] += lengths
    return out


def sparse_cell_overlap(grid, interval_set):
    """Like cell_overlap but returns (indices, lengths) without the dense vector."""
    parts = [_segment_overlaps(grid, lo, hi) for lo, hi in interval_set.segments]
    idx = np.concatenate([p[0] for p in parts])
    lengths = np.concatenate([p[1] for p in parts])
    return idx, lengths
