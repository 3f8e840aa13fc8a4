"""Pesin-formula check: Lyapunov integral vs an independent entropy estimate.

The Lyapunov side is midpoint quadrature of log|f'| against a grid measure.
The entropy side deliberately avoids the discretized operator: orbits started
at Lebesgue-random points are coded by the map's branch partition (a
generating partition for full-branch expanding maps) and the metric entropy
is read off the increments H_m - H_{m-1} of the empirical block entropies.
Agreement of the two sides within a small residual is the numerical rendering
of the entropy formula for the physical measure of an expanding circle map.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ParameterError,
    SingularityError,
    UndersamplingError,
    UnsupportedOperationError,
)
from .maps import log_abs_derivative
from .measures import wasserstein1, lebesgue
from .orbits import symbol_stream
from .space import Topology
from .stability import Schedule, scan_details

MIN_BLOCK_COUNT = 10  # an observed block seen fewer times marks its depth unreliable


@dataclass(frozen=True)
class PesinReport:
    """Both sides of the entropy formula for one detected measure."""

    map_name: str
    measure_label: str
    lyapunov_integral: float
    entropy_estimate: float
    residual: float
    block_depths: tuple
    block_table: tuple  # rows (m, H_m, H_m - H_{m-1})
    w1_to_lebesgue: float
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "map": self.map_name,
            "measure": self.measure_label,
            "lyapunov_integral": self.lyapunov_integral,
            "entropy_estimate": self.entropy_estimate,
            "residual": self.residual,
            "block_depths": list(self.block_depths),
            "w1_to_lebesgue": self.w1_to_lebesgue,
            "notes": self.notes,
        }


def lyapunov_integral(map_spec, mu):
    """Midpoint quadrature of log|f'| against a grid measure."""
    if map_spec.derivative is None:
        raise UnsupportedOperationError(f"map '{map_spec.name}' has no derivative")
    centers = mu.grid.centers
    deriv = np.abs(np.asarray(map_spec.derivative(centers), dtype=float))
    carrying = mu.weights > 0.0
    if np.any(deriv[carrying] == 0.0):
        raise SingularityError("|f'| vanishes on a cell carrying mass")
    vals = np.zeros_like(deriv)
    vals[carrying] = np.log(deriv[carrying])
    return float(mu.weights @ vals)


def block_entropies(map_spec, x_samples, orbit_length, max_depth, jitter=1e-12, seed=0):
    """Empirical block entropies H_1..H_max_depth (nats) from pooled symbol streams.

    Returns (H, reliable) where reliable[m] is False once some observed
    m-block occurs fewer than MIN_BLOCK_COUNT times.
    """
    if map_spec.branch_partition is None or not map_spec.expanding:
        raise UnsupportedOperationError(
            f"map '{map_spec.name}' is not an expanding map with a branch partition"
        )
    n_symbols = len(map_spec.branch_partition)
    syms = symbol_stream(map_spec, x_samples, orbit_length, jitter, seed).astype(np.int64)
    entropies = {}
    reliable = {}
    codes = np.zeros_like(syms)
    for m in range(1, max_depth + 1):
        # rolling base-k code of the m-block starting at each position
        codes = codes[:, :-1] * n_symbols + syms[:, m - 1:] if m > 1 else syms.copy()
        counts = np.bincount(codes.ravel(), minlength=n_symbols ** m)
        observed = counts[counts > 0]
        p = observed / observed.sum()
        entropies[m] = float(-(p * np.log(p)).sum())
        reliable[m] = bool(observed.min() >= MIN_BLOCK_COUNT)
    return entropies, reliable


def block_entropy_estimate(map_spec, grid, x_samples, orbit_length, depths,
                           jitter=1e-12, seed=0):
    """Entropy rate in nats: plateau of H_m - H_{m-1} over the deepest depths.

    The estimate is the median increment over the deepest three reliable
    requested depths.  If any requested depth is undersampled the call fails
    with the largest reliable depth attached, so callers can retry shallower.
    """
    depths = sorted(set(int(m) for m in depths))
    if depths[0] < 1:
        raise ParameterError("block depths must be >= 1")
    x_samples = np.asarray(x_samples, dtype=float)
    entropies, reliable = block_entropies(
        map_spec, x_samples, int(orbit_length), depths[-1], jitter, seed
    )
    bad = [m for m in depths if not reliable[m]]
    if bad:
        ok = [m for m in range(1, depths[-1] + 1) if reliable[m]]
        largest = max(ok) if ok else 0
        raise UndersamplingError(
            f"depth(s) {bad} undersampled (some observed block count < {MIN_BLOCK_COUNT}); "
            f"largest reliable depth is {largest}",
            largest_reliable_depth=largest,
        )
    increments = {m: entropies[m] - entropies.get(m - 1, 0.0) for m in depths}
    deepest = depths[-3:]
    estimate = float(np.median([increments[m] for m in deepest]))
    table = tuple((m, entropies[m], increments[m]) for m in depths)
    return estimate, table


def pesin_check(map_spec, grid, schedule=None, orbit_length=1_000_000,
                depths=range(4, 11), n_samples=8, seed=0):
    """Residual of the entropy formula for each detected stable measure.

    Runs the pseudo-physical scan to locate the stable measure(s), integrates
    log|f'| against each, and compares with the orbit-coded entropy estimate.
    The estimator samples Lebesgue-typical orbits, so it checks the formula
    for the physical cluster only; that caveat rides along in the notes.
    """
    if map_spec.topology is not Topology.CIRCLE or not map_spec.expanding:
        raise UnsupportedOperationError(
            f"entropy-formula check needs an expanding circle map, got '{map_spec.name}'"
        )
    schedule = schedule or Schedule()
    measures, details = scan_details(map_spec, grid, schedule)
    if len(measures) == 0:
        raise ParameterError("scan found no stable measure to check")

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x7065]))
    x_samples = rng.random(n_samples)
    depths = sorted(set(int(m) for m in depths))
    notes = {}
    try:
        estimate, table = block_entropy_estimate(
            map_spec, grid, x_samples, orbit_length, depths, schedule.jitter, seed
        )
        used_depths = tuple(depths)
    except UndersamplingError as err:
        largest = err.largest_reliable_depth
        if largest < max(2, depths[0]):
            raise
        used_depths = tuple(m for m in depths if m <= largest)
        if len(used_depths) < 2:
            used_depths = tuple(range(max(2, largest - 2), largest + 1))
        estimate, table = block_entropy_estimate(
            map_spec, grid, x_samples, orbit_length, used_depths, schedule.jitter, seed
        )
        notes["depth_truncated_to"] = largest

    leb = lebesgue(grid)
    reports = []
    for k, mu in enumerate(measures):
        lam = lyapunov_integral(map_spec, mu)
        reports.append(PesinReport(
            map_name=map_spec.name,
            measure_label=f"scan_cluster_{k}",
            lyapunov_integral=lam,
            entropy_estimate=estimate,
            residual=estimate - lam,
            block_depths=used_depths,
            block_table=table,
            w1_to_lebesgue=wasserstein1(mu, leb),
            notes=dict(notes, basin_fraction=details["basin_fractions"][k],
                       estimator="lebesgue-typical orbits; checks the physical cluster"),
        ))
    return reports
