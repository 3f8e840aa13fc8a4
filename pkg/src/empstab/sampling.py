"""Monte Carlo realization of the ball-noise Markov chain.

This is the sampling oracle for the operator pipeline: the chain moves from x
to a uniform draw on B_eps(f(x)) intersected with the space, which is exactly
the law the kernel rows encode.  Pooled histograms of sampled orbits must
therefore converge to the operator-computed occupation measures.

Reproducibility contract: orbit number k drawn with seed s uses the stream
SeedSequence([s, k]), so a batch of orbits is reproducible regardless of how
it is scheduled.  The vectorized batch sampler advances all orbits in
lockstep off a single stream SeedSequence([s, "batch"]); it is bitwise
reproducible too, just not orbit-for-orbit identical to the per-orbit API.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .measures import GridMeasure
from .space import Topology, ball

_BATCH_STREAM = 0x6261
_ORBIT_STREAM = 0x6F72


@dataclass(frozen=True)
class NoisyOrbit:
    """One sampled noisy trajectory x_0 .. x_n."""

    states: np.ndarray
    epsilon: float
    seed: int
    orbit_index: int = 0


def _step_batch(map_spec, xs, epsilon, rng):
    ys = map_spec.eval(xs)
    u = rng.random(size=ys.shape)
    if map_spec.topology is Topology.CIRCLE:
        return (ys - epsilon + 2.0 * epsilon * u) % 1.0
    ys = np.clip(ys, 0.0, 1.0)
    lo = np.maximum(ys - epsilon, 0.0)
    hi = np.minimum(ys + epsilon, 1.0)
    return lo + (hi - lo) * u


def sample_noisy_orbit(map_spec, x0, epsilon, n, seed, orbit_index=0):
    """Sample one noisy orbit of length n from x0, deterministic in (seed, orbit_index)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if map_spec.topology is Topology.CIRCLE:
        if not 0.0 < epsilon < 0.5:
            raise ParameterError(f"circle noise level must lie in (0, 1/2), got {epsilon}")
    elif not 0.0 < epsilon < 1.0:
        raise ParameterError(f"interval noise level must lie in (0, 1), got {epsilon}")
    rng = np.random.default_rng(
        np.random.SeedSequence([int(seed), _ORBIT_STREAM, int(orbit_index)])
    )
    states = np.empty(n + 1)
    states[0] = x0
    x = np.array([float(x0)])
    for k in range(1, n + 1):
        x = _step_batch(map_spec, x, epsilon, rng)
        states[k] = x[0]
    return NoisyOrbit(states=states, epsilon=epsilon, seed=seed, orbit_index=orbit_index)


def occupation_measure(orbits, grid, skip_initial=True):
    """Pooled, normalized cell histogram of the orbit states.

    ``skip_initial`` drops each x_0, matching occupation laws whose time
    average starts at the first noisy step.
    """
    orbits = list(orbits)
    if not orbits:
        raise ParameterError("no orbits given")
    start = 1 if skip_initial else 0
    pooled = np.concatenate([o.states[start:] for o in orbits])
    counts = np.bincount(grid.cell_of(pooled), minlength=grid.n_cells).astype(float)
    return GridMeasure(grid, counts / counts.sum())


def sample_occupation(map_spec, grid, x0, epsilon, n, n_orbits, seed, skip_initial=True):
    """Occupation measure of n_orbits noisy orbits, advanced in lockstep.

    Statistically identical to pooling sample_noisy_orbit results but runs
    each step vectorized across the whole batch.
    """
    if n < 1 or n_orbits < 1:
        raise ParameterError("n and n_orbits must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _BATCH_STREAM]))
    xs = np.full(n_orbits, float(x0))
    counts = np.zeros(grid.n_cells)
    if not skip_initial:
        counts += np.bincount(grid.cell_of(xs), minlength=grid.n_cells)
    for _ in range(n):
        xs = _step_batch(map_spec, xs, epsilon, rng)
        counts += np.bincount(grid.cell_of(xs), minlength=grid.n_cells)
    return GridMeasure(grid, counts / counts.sum())


def orbit_rows(orbit):
    """CSV rows (step, x) for one orbit."""
    return [(k, float(x)) for k, x in enumerate(orbit.states)]
