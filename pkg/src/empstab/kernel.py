"""Ball-noise transition kernel and its transfer operators on the grid.

Row i of the kernel is the transition law out of cell center c_i: uniform
mass on the ball of radius eps around f(c_i), converted to cell masses by
exact arc/segment overlap and normalized by the ball length.  The dual
operator pushes measures forward (mu -> mu K); the primal one averages
observables (phi -> K phi).  Cesaro averages of dual powers of a Dirac give
the finite-time noisy occupation law of a single initial state.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import GridMismatchError, ParameterError
from .measures import GridMeasure, dirac, normalized
from .space import Grid, ball, sparse_cell_overlap

MASS_DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class Observable:
    """An observable sampled at the cell centers of a grid."""

    grid: Grid
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n_cells,):
            raise ParameterError("observable length does not match grid")
        if not np.all(np.isfinite(v)):
            raise ParameterError("observable has non-finite values")


def observable_from_function(grid, fn, name=""):
    return Observable(grid, np.asarray(fn(grid.centers), dtype=float), name)


@dataclass(frozen=True)
class NoiseKernel:
    """Row-stochastic cell-to-cell matrix for one (map, grid, eps)."""

    grid: Grid
    map: object
    epsilon: float
    rows: sp.csr_matrix

    @property
    def rows_transpose(self):
        # cached CSR transpose for fast dense pushforward batches
        if not hasattr(self, "_rows_t"):
            object.__setattr__(self, "_rows_t", self.rows.T.tocsr())
        return self._rows_t

    def row_measure(self, i):
        """Row i as a GridMeasure (the law of one noisy step out of cell i)."""
        return normalized(self.grid, self.rows.getrow(i).toarray().ravel())


def build_kernel(grid, map_spec, epsilon):
    """Exact Ulam-style kernel: row i = overlaps of B_eps(f(c_i)) / ball length."""
    if map_spec.topology is not grid.topology:
        raise ParameterError("map topology does not match grid topology")
    n = grid.n_cells
    centers_image = map_spec(grid.centers)
    indptr = np.zeros(n + 1, dtype=np.int64)
    all_idx = []
    all_mass = []
    for i in range(n):
        b = ball(grid.topology, float(centers_image[i]), epsilon)
        idx, lengths = sparse_cell_overlap(grid, b)
        all_idx.append(idx)
        all_mass.append(lengths / b.length)
        indptr[i + 1] = indptr[i] + len(idx)
    rows = sp.csr_matrix(
        (np.concatenate(all_mass), np.concatenate(all_idx), indptr), shape=(n, n)
    )
    return NoiseKernel(grid=grid, map=map_spec, epsilon=epsilon, rows=rows)


def _renormalize(weights):
    total = weights.sum()
    if abs(total - 1.0) > MASS_DRIFT_TOL:
        weights = weights / total
    return weights


def push_forward(kernel, mu):
    """Dual operator: (mu K)_j = sum_i mu_i rows[i][j].  Mass preserved."""
    if mu.grid != kernel.grid:
        raise GridMismatchError("measure grid does not match kernel grid")
    w = _renormalize(kernel.rows.T @ mu.weights)
    return GridMeasure(kernel.grid, w)


def apply_to_observable(kernel, phi):
    """Primal operator: (K phi)_i = sum_j rows[i][j] phi_j."""
    if phi.grid != kernel.grid:
        raise GridMismatchError("observable grid does not match kernel grid")
    return Observable(kernel.grid, kernel.rows @ phi.values, phi.name)


def empiric_stochastic_probability(kernel, x, n):
    """Cesaro average (1/n) sum_{j=1..n} of the first n pushforwards of delta_x."""
    if n < 1:
        raise ParameterError(f"horizon n must be >= 1, got {n}")
    v = dirac(kernel.grid, x).weights
    acc = np.zeros_like(v)
    for _ in range(n):
        v = _renormalize(kernel.rows.T @ v)
        acc += v
    return GridMeasure(kernel.grid, _renormalize(acc / n))


def cesaro_rows(kernel, cells, horizons):
    """Noisy occupation laws for many initial cells at several horizons.

    Evolves the one-hot columns of the given cells jointly and accumulates
    their Cesaro sums, snapshotting at each horizon.  Returns
    {n: array(len(cells), N)} whose row k is the occupation law of an orbit
    started in cells[k], i.e. the matrix power Cesaro average restricted to
    the requested rows.
    """
    horizons = sorted(set(int(n) for n in horizons))
    if horizons[0] < 1:
        raise ParameterError("horizons must be >= 1")
    cells = np.asarray(cells, dtype=np.int64)
    n_cells = kernel.grid.n_cells
    cols = np.zeros((n_cells, len(cells)))
    cols[cells, np.arange(len(cells))] = 1.0
    acc = np.zeros_like(cols)
    out = {}
    rows_t = kernel.rows_transpose
    for j in range(1, horizons[-1] + 1):
        cols = rows_t @ cols
        totals = cols.sum(axis=0)
        if np.any(np.abs(totals - 1.0) > MASS_DRIFT_TOL):
            cols = cols / totals
        acc += cols
        if j in horizons:
            out[j] = (acc / j).T.copy()
    return out


def zero_noise_orbit_cells(map_spec, grid, x, n, jitter=0.0, seed=0):
    """Cell indices of f(x), ..., f^n(x), optionally with a tiny dither.

    ``jitter`` adds an independent uniform perturbation of that amplitude
    after each step (wrapped/clipped back into the space).  It exists because
    binary-exact maps such as 2x mod 1 collapse any float64 orbit onto a
    dyadic fixed point within ~50 iterations; a dither far below the cell
    width restores the statistics of typical orbits without moving any mass
    at grid resolution.
    """
    from .orbits import iterate_cells  # local import to avoid a cycle

    return iterate_cells(map_spec, grid, np.array([x], dtype=float), n, jitter, seed)[0]


def empiric_probability_zero_noise(map_spec, grid, x, n, jitter=0.0, seed=0):
    """Atomic empiric measure: mass 1/n on the cell of each f^j(x), j = 1..n."""
    if n < 1:
        raise ParameterError(f"horizon n must be >= 1, got {n}")
    cells = zero_noise_orbit_cells(map_spec, grid, x, n, jitter, seed)
    w = np.bincount(cells, minlength=grid.n_cells).astype(float)
    return GridMeasure(grid, w / n)


def expected_value_observable(kernel, phi, n, initial):
    """E(phi at step n) = integral of K^n phi against the initial distribution."""
    if phi.grid != kernel.grid or initial.grid != kernel.grid:
        raise GridMismatchError("grids do not match")
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    values = phi.values
    for _ in range(n):
        values = kernel.rows @ values
    return float(initial.weights @ values)


def export_kernel_triplets(kernel):
    """Sparse triplet rows (row, col, mass) in row-major order."""
    coo = kernel.rows.tocoo()
    order = np.lexsort((coo.col, coo.row))
    return list(zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()))


def row_sum_deviation(kernel):
    """max_i |row sum - 1|: the basic stochasticity audit."""
    sums = np.asarray(kernel.rows.sum(axis=1)).ravel()
    return float(np.abs(sums - 1.0).max())
