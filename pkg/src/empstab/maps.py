"""Catalog of deterministic 1D maps and their derivatives.

Evaluators are closed-form numpy expressions, pure and vectorized, so both
exact kernel construction and long orbit iteration stay cheap.  A map that is
declared expanding carries a branch partition (breakpoints of its full
monotone branches) used as the generating partition by the entropy estimator.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, SingularityError, UnsupportedOperationError
from .space import Topology, wrap


@dataclass(frozen=True)
class MapSpec:
    """A continuous map of the circle or interval with optional derivative."""

    name: str
    topology: Topology
    eval: Callable
    derivative: Optional[Callable] = None
    params: dict = field(default_factory=dict)
    branch_partition: Optional[tuple] = None
    expanding: bool = False

    def __call__(self, x):
        return wrap(self.topology, self.eval(np.asarray(x, dtype=float)))


def eval_map(map_spec, x):
    """Apply the map and reduce the result back into the space."""
    return map_spec(x)


def log_abs_derivative(map_spec, x):
    """log|f'(x)|; vectorized.  Raises if the derivative is missing or zero."""
    if map_spec.derivative is None:
        raise UnsupportedOperationError(f"map '{map_spec.name}' has no derivative")
    d = np.abs(np.asarray(map_spec.derivative(np.asarray(x, dtype=float))))
    if np.any(d == 0.0):
        raise SingularityError(f"|f'| vanishes for map '{map_spec.name}'")
    out = np.log(d)
    return out if out.ndim else float(out)


def doubling_map():
    return MapSpec(
        name="doubling",
        topology=Topology.CIRCLE,
        eval=lambda x: 2.0 * x,
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
        branch_partition=(0.0, 0.5),
        expanding=True,
    )


def triple_map():
    return MapSpec(
        name="triple",
        topology=Topology.CIRCLE,
        eval=lambda x: 3.0 * x,
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), 3.0),
        branch_partition=(0.0, 1.0 / 3.0, 2.0 / 3.0),
        expanding=True,
    )


def expanding_perturbed_map(alpha=0.1):
    # expanding needs min f' = 2 - 2*pi*alpha > 1, i.e. |alpha| < 1/(2*pi)
    if abs(alpha) >= 1.0 / (2.0 * math.pi):
        raise ParameterError(f"alpha must satisfy |alpha| < 1/(2*pi), got {alpha}")
    two_pi = 2.0 * math.pi
    return MapSpec(
        name="expanding_perturbed",
        topology=Topology.CIRCLE,
        eval=lambda x: 2.0 * x + alpha * np.sin(two_pi * x),
        derivative=lambda x: 2.0 + alpha * two_pi * np.cos(two_pi * x),
        params={"alpha": alpha},
        # the lift passes through (0.5, 1) exactly, so both branches are full
        branch_partition=(0.0, 0.5),
        expanding=True,
    )


def single_sink_map():
    return MapSpec(
        name="single_sink",
        topology=Topology.INTERVAL,
        eval=lambda x: 0.5 * x,
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), 0.5),
    )


def two_sink_map():
    # fixed points where sin(4*pi*x) = 0: sinks at 1/4 and 3/4 with
    # f' = 1 - 0.4*pi, sources at 0 and 1/2 with f' = 1 + 0.4*pi
    four_pi = 4.0 * math.pi
    return MapSpec(
        name="two_sink",
        topology=Topology.CIRCLE,
        eval=lambda x: x + 0.1 * np.sin(four_pi * x),
        derivative=lambda x: 1.0 + 0.1 * four_pi * np.cos(four_pi * x),
    )


def tent_map():
    return MapSpec(
        name="tent",
        topology=Topology.INTERVAL,
        eval=lambda x: 1.0 - np.abs(1.0 - 2.0 * x),
        derivative=lambda x: np.where(np.asarray(x, dtype=float) < 0.5, 2.0, -2.0),
        branch_partition=(0.0, 0.5),
        expanding=True,
    )


def piecewise_linear_map(points, topology, name="custom"):
    """Map defined by linear interpolation through [(x0,y0), ..., (xk,yk)].

    Breakpoints must be increasing with x0 = 0 and xk = 1.  On the circle the
    endpoint images must wrap consistently: yk - y0 must be an integer (the
    degree of the lift).
    """
    pts = [(float(a), float(b)) for a, b in points]
    if len(pts) < 2:
        raise ParameterError("need at least two breakpoints")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(np.diff(xs) <= 0):
        raise ParameterError("breakpoint x-coordinates must be strictly increasing")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise ParameterError("breakpoints must start at x=0 and end at x=1")
    if topology is Topology.CIRCLE and abs((ys[-1] - ys[0]) - round(ys[-1] - ys[0])) > 1e-9:
        raise ParameterError("circle map endpoints must satisfy y_k = y_0 + integer")
    slopes = np.diff(ys) / np.diff(xs)

    def _eval(x):
        return np.interp(np.asarray(x, dtype=float), xs, ys)

    def _deriv(x):
        x = np.asarray(x, dtype=float)
        seg = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[seg]

    return MapSpec(
        name=name,
        topology=topology,
        eval=_eval,
        derivative=_deriv,
        params={"points": tuple(pts)},
        branch_partition=tuple(xs[:-1]),
        expanding=bool(np.all(np.abs(slopes) > 1.0)),
    )


def builtin_catalog():
    """All built-in maps, in a fixed order."""
    return [
        doubling_map(),
        triple_map(),
        expanding_perturbed_map(),
        single_sink_map(),
        two_sink_map(),
        tent_map(),
    ]


def get_map(name, **params):
    """Look up a catalog map by name, forwarding optional parameters."""
    factories = {
        "doubling": doubling_map,
        "triple": triple_map,
        "expanding_perturbed": expanding_perturbed_map,
        "single_sink": single_sink_map,
        "two_sink": two_sink_map,
        "tent": tent_map,
    }
    if name not in factories:
        raise ParameterError(
            f"unknown map '{name}'; available: {sorted(factories)} or a custom piecewise map"
        )
    return factories[name](**params)
