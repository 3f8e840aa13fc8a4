"""Grid-supported probability measures and the Wasserstein-1 metric.

A GridMeasure is a nonnegative weight vector over the cells of one grid,
normalized to total mass 1.  Wasserstein-1 between two such measures (mass
sitting at cell centers) has a closed form: with D_i the difference of the
weight cumsums,

    interval:  W1 = delta * sum_i |D_i|
    circle:    W1 = delta * min_t sum_i |D_i - t| = delta * sum_i |D_i - median(D)|

The circle minimizer over the rotation offset t is the (uniform-weight)
median of the D_i.  Both formulas are the exact optimal-transport cost for
lattice-supported measures; tests check them against an LP oracle.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, ParameterError
from .space import Grid, Topology

NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class GridMeasure:
    """Probability vector over the cells of a grid."""

    grid: Grid
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.shape != (self.grid.n_cells,):
            raise ParameterError(
                f"weights shape {w.shape} does not match grid with {self.grid.n_cells} cells"
            )
        if np.any(w < 0.0):
            raise ParameterError("negative weights")
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
            raise ParameterError(f"weights sum to {w.sum()!r}, not 1")

    def integrate(self, values):
        """Integral of an observable sampled at cell centers."""
        return float(self.weights @ np.asarray(values, dtype=float))


def normalized(grid, weights):
    """Build a GridMeasure from nonnegative weights, renormalizing the total."""
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0.0:
        raise ParameterError("cannot normalize an all-zero weight vector")
    return GridMeasure(grid, w / total)


def dirac(grid, x):
    """All mass on the cell containing x."""
    w = np.zeros(grid.n_cells)
    w[grid.cell_of(x)] = 1.0
    return GridMeasure(grid, w)


def lebesgue(grid):
    """Normalized Lebesgue measure: uniform weights 1/N."""
    return GridMeasure(grid, np.full(grid.n_cells, 1.0 / grid.n_cells))


def _check_same_grid(mu, nu):
    if mu.grid != nu.grid:
        raise GridMismatchError("measures live on different grids")


def w1_weights(topology, delta, diff_rows):
    """W1 for one or many weight-difference rows; returns scalar or vector.

    ``diff_rows`` holds mu_weights - nu_weights in its last axis.
    """
    diff_rows = np.atleast_2d(np.asarray(diff_rows, dtype=float))
    cums = np.cumsum(diff_rows, axis=1)
    if topology is Topology.CIRCLE:
        t = np.median(cums, axis=1, keepdims=True)
        vals = delta * np.abs(cums - t).sum(axis=1)
    else:
        vals = delta * np.abs(cums).sum(axis=1)
    return vals if vals.size > 1 else float(vals[0])


def wasserstein1(mu, nu):
    """Wasserstein-1 distance between two measures on the same grid."""
    _check_same_grid(mu, nu)
    return w1_weights(mu.grid.topology, mu.grid.delta, mu.weights - nu.weights)


def w1_rows_to_weights(grid, rows, target_weights):
    """Vector of W1 distances from each row of ``rows`` to one weight vector."""
    return np.atleast_1d(
        w1_weights(grid.topology, grid.delta, np.asarray(rows) - target_weights)
    )


@dataclass(frozen=True)
class MeasureSet:
    """A finite family of measures (all on one grid)."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        grids = {m.grid for m in self.members}
        if len(grids) > 1:
            raise GridMismatchError("MeasureSet members live on different grids")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def dist_to_set(mu, measure_set):
    """min over the set members of W1(mu, member)."""
    if len(measure_set) == 0:
        raise ParameterError("distance to an empty measure set")
    return min(wasserstein1(mu, member) for member in measure_set)


def w1_rows_to_set(grid, rows, measure_set):
    """Row-wise min-over-members W1 distances (vectorized dist_to_set)."""
    if len(measure_set) == 0:
        raise ParameterError("distance to an empty measure set")
    dists = np.stack(
        [w1_rows_to_weights(grid, rows, m.weights) for m in measure_set]
    )
    return dists.min(axis=0)


def cluster_measures(samples, radius):
    """Greedy agglomeration of measures within W1 ``radius``.

    Samples are scanned in order; one joins the first cluster whose current
    representative (running mean of its members) is within ``radius``,
    otherwise it founds a new cluster.  Returns the representatives.
    """
    if radius <= 0.0:
        raise ParameterError(f"cluster radius must be positive, got {radius}")
    samples = list(samples)
    if not samples:
        return MeasureSet(())
    grid = samples[0].grid
    sums = []
    counts = []
    for m in samples:
        _check_same_grid(samples[0], m)
        placed = False
        for k in range(len(sums)):
            rep = sums[k] / counts[k]
            if w1_weights(grid.topology, grid.delta, m.weights - rep) < radius:
                sums[k] = sums[k] + m.weights
                counts[k] += 1
                placed = True
                break
        if not placed:
            sums.append(m.weights.copy())
            counts.append(1)
    reps = tuple(normalized(grid, s / c) for s, c in zip(sums, counts))
    return MeasureSet(reps)


def measure_to_rows(mu):
    """CSV rows (cell_index, cell_center, weight) for serialization."""
    centers = mu.grid.centers
    return [(i, centers[i], mu.weights[i]) for i in range(mu.grid.n_cells)]
