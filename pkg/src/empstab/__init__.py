"""Numerical laboratory for finite-time stochastic stability of 1D maps.

A map f on the circle or the unit interval is perturbed by noise that is
uniform on the ball of radius eps around f(x).  The package discretizes the
resulting Markov kernel on a uniform grid (Ulam style), evolves empiric
occupation measures both by operator pushforwards and by direct Monte Carlo
sampling, measures everything in Wasserstein-1, and renders finite-schedule
verdicts on which invariant measures (or sets of measures) the noisy
statistics single out as the noise level goes to zero.
"""

__version__ = "0.1.0"

from .space import Topology, Grid, ball, cell_overlap, distance
from .maps import MapSpec, builtin_catalog, get_map, piecewise_linear_map
from .measures import (
    GridMeasure,
    MeasureSet,
    dirac,
    lebesgue,
    wasserstein1,
    dist_to_set,
    cluster_measures,
)
from .kernel import (
    Observable,
    NoiseKernel,
    build_kernel,
    push_forward,
    apply_to_observable,
    empiric_stochastic_probability,
    empiric_probability_zero_noise,
    expected_value_observable,
)
from .sampling import NoisyOrbit, sample_noisy_orbit, occupation_measure, sample_occupation
from .stability import (
    Schedule,
    BasinReport,
    StabilityVerdict,
    c_set,
    pomega_estimate,
    strong_basin,
    empiric_stability_verdict,
    pseudo_physical_scan,
    set_stability_verdict,
)
from .entropy import PesinReport, lyapunov_integral, block_entropy_estimate, pesin_check
