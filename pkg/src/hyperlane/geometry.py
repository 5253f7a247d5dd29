"""Geodesic polar coordinates on the Poincare ball and radial quadrature.

A radial function on H^N is a function of the geodesic distance ``t`` from
the pole.  In the ball model the same point sits at Euclidean radius
``rho = tanh(t / 2)``, and the Riemannian volume element in polar form is
``(sinh t)^(N-1) dt dS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError

# Past this distance the float64 round trip t -> rho -> t loses more than
# 1e-12 relative: 1 - rho shrinks like 2 exp(-t) while its spacing stays
# fixed.  Use mpmath values for larger t.
FLOAT_ROUNDTRIP_LIMIT = 12.0

_WEIGHT_SWITCH = 20.0


def _is_mp(x):
    return type(x).__module__.startswith("mpmath")


def _check_dim(N):
    if int(N) != N or N < 3:
        raise DomainError(f"dimension N must be an integer >= 3, got {N!r}")


def ball_radius_from_geodesic(t):
    """Euclidean radius in the Poincare ball of the point at distance ``t``.

    Takes float64 input (scalar or array) or an ``mpmath.mpf``, which is
    evaluated at the current mpmath precision.  In float64 the result is clamped below 1,
    and distances past ``FLOAT_ROUNDTRIP_LIMIT`` come back from
    :func:`geodesic_from_ball_radius` with growing relative error.
    """
    if _is_mp(t):
        import mpmath
        if not mpmath.isfinite(t) or t < 0:
            raise DomainError(f"geodesic distance must be finite and >= 0, got {t}")
        return mpmath.tanh(t / 2)
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"geodesic distance must be finite and >= 0, got {t!r}")
    rho = np.minimum(np.tanh(arr / 2.0), np.nextafter(1.0, 0.0))
    return float(rho) if rho.ndim == 0 else rho


def geodesic_from_ball_radius(rho):
    """Inverse of :func:`ball_radius_from_geodesic`: ``2 artanh(rho)``."""
    if _is_mp(rho):
        import mpmath
        if not (0 <= rho < 1):
            raise DomainError(f"ball radius must lie in [0, 1), got {rho}")
        return 2 * mpmath.atanh(rho)
    arr = np.asarray(rho, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr >= 1):
        raise DomainError(f"ball radius must lie in [0, 1), got {rho!r}")
    t = 2.0 * np.arctanh(arr)
    return float(t) if t.ndim == 0 else t


def weight_k(t, N):
    """Radial volume weight ``(sinh t)^(N-1)``.

    For ``t > 20`` the power is taken in log space,
    ``exp((N-1) * log sinh t)``, so the result overflows only when the true
    value does.
    """
    _check_dim(N)
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("weight_k needs finite t >= 0")
    out = np.empty_like(arr)
    small = arr <= _WEIGHT_SWITCH
    out[small] = np.sinh(arr[small]) ** (N - 1)
    big = ~small
    if np.any(big):
        tb = arr[big]
        log_sinh = tb + np.log1p(-np.exp(-2.0 * tb)) - math.log(2.0)
        with np.errstate(over="ignore"):
            out[big] = np.exp((N - 1) * log_sinh)
    return float(out) if out.ndim == 0 else out


def sphere_area(N):
    """Surface area of the unit sphere S^(N-1) in R^N."""
    _check_dim(N)
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    """Samples of a radial profile on strictly increasing distances."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1:
            raise InputError("nodes must be one-dimensional")
        if values.shape[0] != nodes.shape[0]:
            raise InputError(
                f"values length {values.shape[0]} != nodes length {nodes.shape[0]}")
        if nodes.size and nodes[0] < 0:
            raise InputError("first node must be >= 0")
        if np.any(np.diff(nodes) <= 0):
            raise InputError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)


def trapezoid_richardson(x, y):
    """Composite trapezoid on non-uniform nodes with one Richardson pass.

    Consecutive interval pairs are integrated twice, once with both
    intervals and once as a single coarse interval; the two estimates are
    combined as ``fine + (fine - coarse) / 3``.  A trailing unpaired
    interval keeps its plain trapezoid value.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size - 1
    m = n // 2
    x0, x1, x2 = x[0:2 * m:2], x[1:2 * m:2], x[2:2 * m + 1:2]
    y0, y1, y2 = y[0:2 * m:2], y[1:2 * m:2], y[2:2 * m + 1:2]
    fine = 0.5 * (x1 - x0) * (y0 + y1) + 0.5 * (x2 - x1) * (y1 + y2)
    coarse = 0.5 * (x2 - x0) * (y0 + y2)
    total = float(np.sum(fine + (fine - coarse) / 3.0))
    if n % 2:
        total += 0.5 * (x[-1] - x[-2]) * (y[-1] + y[-2])
    return total


def radial_integral(grid, N, tail_rate=None):
    """``omega_{N-1} * integral of k(t) f(t) dt`` over the grid span.

    Parameters
    ----------
    grid : RadialGrid
        Nodes ``t_i`` and samples ``f(t_i)``.
    N : int
        Dimension of H^N.
    tail_rate : float, optional
        Negative exponential rate ``lam`` of the weighted integrand
        ``k f ~ C exp(lam t)`` beyond the last node.  When given, the tail
        ``(k f)(T) / (-lam)`` is added instead of truncating at ``T``.
    """
    _check_dim(N)
    if grid.nodes.size < 3:
        raise InputError("radial_integral needs at least 3 nodes")
    if not np.all(np.isfinite(grid.values)):
        raise InputError("radial_integral got non-finite samples")
    kf = weight_k(grid.nodes, N) * grid.values
    total = trapezoid_richardson(grid.nodes, kf)
    if tail_rate is not None:
        if not tail_rate < 0:
            raise InputError(f"tail_rate must be negative, got {tail_rate}")
        total += kf[-1] / (-tail_rate)
    return sphere_area(N) * total
