"""Finite-schedule stability verdicts: basins, C-sets, p-omega limits, scans.

The asymptotic quantifier chains ("for all rho > 0 there is N such that for
all n >= N there is eps0 > 0 ...") are evaluated over finite schedules: a
decreasing list of tolerances rho, an increasing list of horizons n, a
decreasing list of noise levels eps, and a uniform grid of G initial states.
A point satisfies the noisy criterion at (rho, n) when the smallest scheduled
noise level passes, and the witness records how large the passing eps0 can be
taken; "for all n large enough" becomes "on some suffix of the horizon list".

Initial-state grids carry an irrational offset so that no scan point sits
exactly on a periodic point, a branch boundary, or another atypical rational.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import ParameterError
from .kernel import build_kernel, cesaro_rows
from .measures import (
    GridMeasure,
    MeasureSet,
    cluster_measures,
    normalized,
    w1_rows_to_weights,
    w1_weights,
)
from .orbits import orbit_histograms
from .space import Grid, Topology

# fractional offset applied to scan grids; (sqrt(5)-1)/2, nothing magic
# beyond being far from every low-denominator rational
GRID_OFFSET = (math.sqrt(5.0) - 1.0) / 2.0

Target = Union[GridMeasure, MeasureSet]


@dataclass(frozen=True)
class Schedule:
    """Finite truncation lists for the stability quantifiers."""

    rho_list: tuple = (0.1, 0.05, 0.02)
    n_list: tuple = (200, 500, 1000)
    eps_list: tuple = (0.05, 0.02, 0.01, 0.005)
    grid_size: int = 512
    cluster_radius: float = 0.03
    jitter: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rho_list", tuple(float(r) for r in self.rho_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        for name, vals in (("rho_list", self.rho_list), ("n_list", self.n_list), ("eps_list", self.eps_list)):
            if len(vals) == 0:
                raise ParameterError(f"{name} must be non-empty")
        if list(self.rho_list) != sorted(self.rho_list, reverse=True):
            raise ParameterError("rho_list must be decreasing")
        if list(self.n_list) != sorted(self.n_list) or len(set(self.n_list)) != len(self.n_list):
            raise ParameterError("n_list must be strictly increasing")
        if list(self.eps_list) != sorted(self.eps_list, reverse=True):
            raise ParameterError("eps_list must be decreasing")
        if self.grid_size < 1:
            raise ParameterError("grid_size must be >= 1")
        if min(self.n_list) < 1 or min(self.rho_list) <= 0 or min(self.eps_list) <= 0:
            raise ParameterError("schedule entries must be positive")

    @property
    def rho_min(self):
        return self.rho_list[-1]

    @property
    def n_max(self):
        return self.n_list[-1]

    @property
    def eps_min(self):
        return self.eps_list[-1]

    def x_grid(self):
        """G equally spaced initial states, offset away from rational points."""
        return (np.arange(self.grid_size) + GRID_OFFSET) / self.grid_size

    def to_dict(self):
        return {
            "rho_list": list(self.rho_list),
            "n_list": list(self.n_list),
            "eps_list": list(self.eps_list),
            "grid_size": self.grid_size,
            "cluster_radius": self.cluster_radius,
            "jitter": self.jitter,
            "seed": self.seed,
        }


def _target_members(target):
    if isinstance(target, GridMeasure):
        return (target,)
    if len(target) == 0:
        raise ParameterError("empty measure set as stability target")
    return tuple(target)


def _rows_distance(grid, rows, target):
    """Row-wise W1 distance to a measure, or min-distance to a measure set."""
    members = _target_members(target)
    d = np.stack([w1_rows_to_weights(grid, rows, m.weights) for m in members])
    return d.min(axis=0)


def _tail_start(ok):
    """Smallest index T with ok[T:] all true, or None if even the last fails."""
    ok = np.asarray(ok, dtype=bool)
    if not ok[-1]:
        return None
    false_idx = np.flatnonzero(~ok)
    return 0 if false_idx.size == 0 else int(false_idx[-1]) + 1


@dataclass(frozen=True)
class BasinReport:
    """Grid-indexed membership of a basin at a finite schedule."""

    target_label: str
    x_grid: np.ndarray
    membership: np.ndarray
    lebesgue_fraction: float
    schedule: Schedule
    kind: str = "strong"
    rho_pass_fractions: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "target": self.target_label,
            "kind": self.kind,
            "lebesgue_fraction": self.lebesgue_fraction,
            "n_points": int(self.membership.size),
            "n_members": int(self.membership.sum()),
            "rho_pass_fractions": {str(k): v for k, v in self.rho_pass_fractions.items()},
            "schedule": self.schedule.to_dict(),
        }


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the noisy stability criterion for a measure or measure set."""

    stable: bool
    globally_stable: bool
    basin_fraction: float
    witness_epsilon: dict
    failures: list
    membership: np.ndarray
    target_label: str
    schedule: Schedule
    pass_fraction: float
    minimality_ok: Optional[bool] = None
    redundant_members: tuple = ()

    def to_dict(self):
        return {
            "target": self.target_label,
            "stable": bool(self.stable),
            "globally_stable": bool(self.globally_stable),
            "basin_fraction": self.basin_fraction,
            "pass_fraction": self.pass_fraction,
            "witness_epsilon": {f"rho={r},n={n}": w for (r, n), w in self.witness_epsilon.items()},
            "failures": self.failures,
            "minimality": (
                None if self.minimality_ok is None
                else ("probe-passed" if self.minimality_ok else "probe-failed")
            ),
            "redundant_members": list(self.redundant_members),
            "schedule": self.schedule.to_dict(),
        }


def c_set(map_spec, grid, target, n, rho, x_grid, jitter=0.0, seed=0):
    """Boolean vector: W1 (or set distance) of the n-step empiric measure < rho."""
    if n < 1 or rho <= 0.0:
        raise ParameterError("need n >= 1 and rho > 0")
    rows = orbit_histograms(map_spec, grid, x_grid, [n], jitter, seed)[n]
    return _rows_distance(grid, rows, target) < rho


def _zero_noise_distances(map_spec, grid, target, schedule):
    """Distance matrix (len(n_list), G) of empiric measures to the target."""
    hists = orbit_histograms(
        map_spec, grid, schedule.x_grid(), schedule.n_list,
        schedule.jitter, schedule.seed,
    )
    return np.stack([_rows_distance(grid, hists[n], target) for n in schedule.n_list])


def _membership_from_distances(dist_matrix, rho_list):
    """Per-x: for every rho there is a horizon suffix below rho throughout."""
    n_levels, n_points = dist_matrix.shape
    member = np.ones(n_points, dtype=bool)
    per_rho = {}
    for rho in rho_list:
        ok = dist_matrix < rho
        # a non-empty all-true suffix over the horizon list exists iff the
        # last horizon passes
        member_rho = ok[-1]
        per_rho[rho] = member_rho
        member &= member_rho
    return member, per_rho


def strong_basin(map_spec, grid, target, schedule, label="measure"):
    """Zero-noise basin of statistical attraction via the C-set characterization."""
    dist = _zero_noise_distances(map_spec, grid, target, schedule)
    member, per_rho = _membership_from_distances(dist, schedule.rho_list)
    return BasinReport(
        target_label=label,
        x_grid=schedule.x_grid(),
        membership=member,
        lebesgue_fraction=float(member.mean()),
        schedule=schedule,
        kind="strong",
        rho_pass_fractions={rho: float(v.mean()) for rho, v in per_rho.items()},
    )


def _noisy_distance_tensor(map_spec, grid, target, schedule):
    """D[eps][member][n-index] = per-x distances of noisy occupation laws.

    Cesaro laws for all scan cells are evolved jointly per noise level, so
    the cost per eps is one sparse-dense power sweep up to n_max.
    """
    members = _target_members(target)
    cells = grid.cell_of(schedule.x_grid())
    tensor = {}
    for eps in schedule.eps_list:
        kernel = build_kernel(grid, map_spec, eps)
        rows_by_n = cesaro_rows(kernel, cells, schedule.n_list)
        tensor[eps] = np.stack([
            np.stack([w1_rows_to_weights(grid, rows_by_n[n], m.weights)
                      for m in members])
            for n in schedule.n_list
        ])  # shape (len(n_list), len(members), G)
    return tensor


def _set_distance(tensor_eps, member_mask=None):
    """Min over (selected) members: (len(n_list), G).

    An empty selection uses the empty-set convention dist = +inf.
    """
    if member_mask is not None:
        if not member_mask.any():
            n_levels, _, n_points = tensor_eps.shape
            return np.full((n_levels, n_points), np.inf)
        return tensor_eps[:, member_mask, :].min(axis=1)
    return tensor_eps.min(axis=1)


def noisy_basin(map_spec, grid, target, schedule, label="measure"):
    """Basin of the noisy criterion: smallest scheduled eps must pass at a suffix."""
    tensor = _noisy_distance_tensor(map_spec, grid, target, schedule)
    dist_min_eps = _set_distance(tensor[schedule.eps_min])
    member, per_rho = _membership_from_distances(dist_min_eps, schedule.rho_list)
    return BasinReport(
        target_label=label,
        x_grid=schedule.x_grid(),
        membership=member,
        lebesgue_fraction=float(member.mean()),
        schedule=schedule,
        kind="noisy",
        rho_pass_fractions={rho: float(v.mean()) for rho, v in per_rho.items()},
    )


def _witnesses(tensor, schedule, member_vec, member_mask=None):
    """Largest eps0 per (rho, n) passing uniformly over the passing set."""
    out = {}
    if not member_vec.any():
        for rho in schedule.rho_list:
            for n in schedule.n_list:
                out[(rho, n)] = None
        return out
    for rho in schedule.rho_list:
        for idx_n, n in enumerate(schedule.n_list):
            ok_suffix = True
            witness = None
            # eps_list is decreasing; scan from the smallest upward
            for eps in reversed(schedule.eps_list):
                d = _set_distance(tensor[eps], member_mask)[idx_n][member_vec]
                if ok_suffix and np.all(d < rho):
                    witness = eps
                else:
                    ok_suffix = False
            out[(rho, n)] = witness
    return out


def _collect_failures(schedule, dist_min_eps, member_vec, x_grid, limit=32):
    fails = []
    bad = np.flatnonzero(~member_vec)
    for x_idx in bad[:limit]:
        fails.append({
            "x": float(x_grid[x_idx]),
            "rho": schedule.rho_min,
            "n": schedule.n_max,
            "epsilon": schedule.eps_min,
            "distance": float(dist_min_eps[-1, x_idx]),
        })
    return fails


def empiric_stability_verdict(map_spec, grid, target, schedule,
                              pass_fraction=0.02, label="measure"):
    """Noisy stability verdict for a single measure."""
    if not 0.0 < pass_fraction <= 1.0:
        raise ParameterError("pass_fraction must lie in (0, 1]")
    if not isinstance(target, GridMeasure):
        raise ParameterError("use set_stability_verdict for measure sets")
    tensor = _noisy_distance_tensor(map_spec, grid, target, schedule)
    dist_min_eps = _set_distance(tensor[schedule.eps_min])
    member, _ = _membership_from_distances(dist_min_eps, schedule.rho_list)
    g = schedule.grid_size
    n_members = int(member.sum())
    stable = n_members >= math.ceil(pass_fraction * g)
    globally_stable = stable and n_members >= g - 1
    return StabilityVerdict(
        stable=stable,
        globally_stable=globally_stable,
        basin_fraction=n_members / g,
        witness_epsilon=_witnesses(tensor, schedule, member),
        failures=_collect_failures(schedule, dist_min_eps, member, schedule.x_grid()),
        membership=member,
        target_label=label,
        schedule=schedule,
        pass_fraction=pass_fraction,
    )


def set_stability_verdict(map_spec, grid, measure_set, schedule,
                          pass_fraction=0.02, label="set"):
    """Noisy stability verdict for a measure set, with the minimality probe.

    Condition (a) is the set-distance analogue of the single-measure verdict.
    The probe for condition (b) removes, member by member, the W1 ball of
    radius rho_min around that member and re-evaluates the passing set; a
    member whose removal does not lose at least one grid point is redundant.
    """
    if not isinstance(measure_set, MeasureSet):
        raise ParameterError("measure_set must be a MeasureSet")
    members = _target_members(measure_set)
    tensor = _noisy_distance_tensor(map_spec, grid, measure_set, schedule)
    dist_min_eps = _set_distance(tensor[schedule.eps_min])
    member_vec, _ = _membership_from_distances(dist_min_eps, schedule.rho_list)
    g = schedule.grid_size
    n_pass = int(member_vec.sum())
    cond_a = n_pass >= math.ceil(pass_fraction * g)

    # pairwise W1 between members, for the ball-removal probe
    k = len(members)
    pair = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            pair[i, j] = pair[j, i] = w1_weights(
                grid.topology, grid.delta, members[i].weights - members[j].weights
            )
    redundant = []
    for j in range(k):
        keep = pair[j] >= schedule.rho_min
        keep[j] = False
        reduced_dist = _set_distance(tensor[schedule.eps_min], keep)
        reduced_member, _ = _membership_from_distances(reduced_dist, schedule.rho_list)
        if int(reduced_member.sum()) >= n_pass:
            redundant.append(j)
    minimality_ok = len(redundant) == 0

    # Boundary slack for the full-measure call: a point that fails at the
    # smallest scheduled eps is excused when its zero-noise statistics commit
    # to the set (its eps0 simply lies below the schedule; in the limit the
    # noisy and zero-noise basins coincide a.e.).  Points near basin
    # boundaries, where finite noise mixes the competing attractors, are the
    # archetype.
    zero_dist = _zero_noise_distances(map_spec, grid, measure_set, schedule)
    zero_member, _ = _membership_from_distances(zero_dist, schedule.rho_list)
    excused = int((member_vec | zero_member).sum())

    stable = cond_a and minimality_ok
    globally_stable = stable and excused >= g - 1
    return StabilityVerdict(
        stable=stable,
        globally_stable=globally_stable,
        basin_fraction=n_pass / g,
        witness_epsilon=_witnesses(tensor, schedule, member_vec),
        failures=_collect_failures(schedule, dist_min_eps, member_vec, schedule.x_grid()),
        membership=member_vec,
        target_label=label,
        schedule=schedule,
        pass_fraction=pass_fraction,
        minimality_ok=minimality_ok,
        redundant_members=tuple(redundant),
    )


def pomega_estimate(map_spec, grid, x, n_list, cluster_radius=0.03,
                    jitter=1e-12, seed=0):
    """Cluster late-horizon empiric measures of one orbit.

    Approximates the limit set of the empiric measures; two or more
    well-separated clusters signal possible non-convergence (historic
    behavior) rather than a resolved limit.
    """
    n_list = sorted(set(int(n) for n in n_list))
    hists = orbit_histograms(map_spec, grid, np.array([float(x)]), n_list, jitter, seed)
    measures = [GridMeasure(grid, hists[n][0]) for n in n_list]
    return cluster_measures(measures, cluster_radius)


def zero_noise_push_forward(map_spec, grid, mu):
    """Grid-level pushforward by f alone: each cell's mass moves to cell(f(center))."""
    dest = grid.cell_of(map_spec(grid.centers))
    w = np.bincount(dest, weights=mu.weights, minlength=grid.n_cells)
    return GridMeasure(grid, w)


def invariance_defect(map_spec, grid, mu):
    """W1 between a measure and its zero-noise pushforward."""
    nu = zero_noise_push_forward(map_spec, grid, mu)
    return w1_weights(grid.topology, grid.delta, nu.weights - mu.weights)


def scan_details(map_spec, grid, schedule, user_candidates=None):
    """Estimate the pseudo-physical set; returns (MeasureSet, diagnostics).

    Candidates come from per-orbit p-omega cluster representatives pooled over
    the scan grid and merged, unless a user list is supplied.  A candidate
    survives if it is invariant at grid resolution (pushforward moves it by
    less than two cell widths) and if at least one scan point's empiric
    measures approach it within the smallest scheduled rho.
    """
    xg = schedule.x_grid()
    hists = orbit_histograms(map_spec, grid, xg, schedule.n_list,
                             schedule.jitter, schedule.seed)
    details = {"dropped": []}

    if user_candidates is not None:
        pool = list(_target_members(user_candidates))
    else:
        pool = []
        stacked = {n: hists[n] for n in schedule.n_list}
        for k in range(schedule.grid_size):
            per_x = [GridMeasure(grid, stacked[n][k]) for n in schedule.n_list]
            pool.extend(cluster_measures(per_x, schedule.cluster_radius))
        pool = list(cluster_measures(pool, schedule.cluster_radius))

    # min-over-horizons distance of every (x, candidate) pair
    survivors = []
    coverage = []
    two_delta = 2.0 * grid.delta
    min_count = 1  # coverage fraction >= 1/G means at least one scan point
    for cand in pool:
        defect = invariance_defect(map_spec, grid, cand)
        if defect >= two_delta:
            details["dropped"].append({"reason": "invariance", "defect": float(defect)})
            continue
        d = np.stack([
            w1_rows_to_weights(grid, hists[n], cand.weights) for n in schedule.n_list
        ]).min(axis=0)
        covered = int((d < schedule.rho_min).sum())
        if covered < min_count:
            details["dropped"].append({"reason": "coverage", "covered": covered})
            continue
        survivors.append(cand)
        coverage.append(covered / schedule.grid_size)

    # final merge pass: survivors closer than the cluster radius collapse
    if survivors:
        merged = cluster_measures(survivors, schedule.cluster_radius)
        if len(merged) < len(survivors):
            survivors = list(merged)
            coverage = []
            for cand in survivors:
                d = np.stack([
                    w1_rows_to_weights(grid, hists[n], cand.weights)
                    for n in schedule.n_list
                ]).min(axis=0)
                coverage.append(float((d < schedule.rho_min).mean()))

    # strong-basin fraction per survivor, from the same orbit data
    basin_fractions = []
    for cand in survivors:
        dist = np.stack([
            w1_rows_to_weights(grid, hists[n], cand.weights) for n in schedule.n_list
        ])
        member, _ = _membership_from_distances(dist, schedule.rho_list)
        basin_fractions.append(float(member.mean()))

    details["coverage"] = [float(c) for c in coverage]
    details["basin_fractions"] = basin_fractions
    details["n_candidates"] = len(pool)
    return MeasureSet(tuple(survivors)), details


def pseudo_physical_scan(map_spec, grid, schedule, user_candidates=None):
    """Estimated set of pseudo-physical measures (see scan_details)."""
    measures, _ = scan_details(map_spec, grid, schedule, user_candidates)
    return measures
