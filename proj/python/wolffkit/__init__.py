"""Python front end for the wolffkit core.

Measures and compact sets are the same JSON documents the CLI reads, given
either as dicts or as JSON text. Parameter sets are dicts with the keys
N, p, q1, q2, alpha, beta, R.
"""

import json
import math

from . import _wolffkit
from ._wolffkit import ConfigError, NumericalError, ParameterError

__all__ = [
    "ConfigError",
    "NumericalError",
    "ParameterError",
    "capacity",
    "check",
    "growth_exponent",
    "pde",
    "potential",
    "solve_system",
]


def _doc(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def _params(params):
    if isinstance(params, str):
        return params
    lines = []
    for key, value in params.items():
        if isinstance(value, float) and math.isinf(value):
            value = "inf"
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def potential(measure, points, kind="wolff", alpha=1.0, p=2.0, R=math.inf, s=1.0):
    """Potential of `measure` at each point of `points`."""
    return _wolffkit.potential(_doc(measure), kind, alpha, p, R, s, [list(map(float, x)) for x in points])


def capacity(compact_set, alpha, p, kernel="riesz", grid=8, max_iter=600, tol=2e-3):
    """Two-sided capacity bounds: dict with lower, upper, gap, iterations, feasible."""
    return _wolffkit.capacity(_doc(compact_set), kernel, alpha, p, grid, max_iter, tol)


def check(condition, measure, params, seed=0):
    """Run growth|ball|pointwise|capacity|product; returns the report dict."""
    return json.loads(_wolffkit.check(condition, _doc(measure), _params(params), seed))


def solve_system(measure, params, epsilon=1e-3, max_iter=200, tol=1e-8):
    return _wolffkit.solve_system(_doc(measure), _params(params), epsilon, max_iter, tol)


def pde(measure, p, N=3, q1=1.0, q2=1.0, R_dom=1.0, linear=False):
    return _wolffkit.pde(_doc(measure), N, p, q1, q2, R_dom, linear)


def growth_exponent(params):
    return _wolffkit.growth_exponent(_params(params))
