"""Differential operators attached to valuation coefficients.

The density route evaluates the valuation polynomial on the restricted
second-derivative form of each slot; for degree 2 there is an independent
spectral route through the Laplacian and the squared Hopf derivative that the
tests play against the polynomial route.
"""

from weakref import WeakKeyDictionary

import numpy as np

from .bodies import as_sphere_function, restricted_hessian_batch, SupportFn
from .errors import UnsupportedSmoothness
from .forms import ValuationCoeffs, p_mu_batch, p_mu_pol_batch
from .geometry import adapted_frames_batch
from .util import unit_ball_volume


def _restricted_at_points(fn, points):
    frames = adapted_frames_batch(points)
    H = fn.ext_hess(points)
    R = np.einsum("nai,nij,nbj->nab", frames, H, frames, optimize=True)
    return 0.5 * (R + np.swapaxes(R, -1, -2))


def d_mu(coeffs, f, u, f2=None):
    """Density of the (mixed) area measure at a sphere point.

    Degree 2 takes a single function; degree 3 takes two (pass the same
    function twice for the diagonal).
    """
    f = as_sphere_function(f)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if coeffs.degree == 2:
        if f2 is not None:
            raise ValueError("degree 2 takes a single argument")
        R = _restricted_at_points(f, u)
        out = p_mu_batch(coeffs, R)
    else:
        if f2 is None:
            raise ValueError("degree 3 needs two arguments (pass f twice)")
        f2 = as_sphere_function(f2)
        R1 = _restricted_at_points(f, u)
        R2 = _restricted_at_points(f2, u)
        out = p_mu_pol_batch(coeffs, R1, R2)
    return float(out[0]) if out.size == 1 else out


def d_mu_spectral(coeffs, f, u):
    """Degree-2 density via analytic Laplacian and Hopf second derivative."""
    if coeffs.degree != 2:
        raise ValueError("spectral route implemented for degree 2")
    f = as_sphere_function(f)
    if not getattr(f, "has_spectral", False):
        raise UnsupportedSmoothness("function has no analytic spectral data")
    u = np.atleast_2d(np.asarray(u, dtype=float))
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    out = (
        2 * n * (c1 - c0) * f.jnjn(u)
        + (2 * c0 - c1) * f.laplacian(u)
        + (2 * (n - 1) * c0 + c1) * f.value(u)
    ) / unit_ball_volume(2 * n - 2)
    return float(out[0]) if out.size == 1 else out


def d_mu_B(coeffs, f, u):
    """Degree-3 density against the unit ball in the second slot."""
    if coeffs.degree != 3:
        raise ValueError("ball operator exists for degree 3")
    f = as_sphere_function(f)
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if getattr(f, "has_spectral", False):
        n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
        a = (n - 1) * ((2 * n - 3) * c1 - 2 * (n - 2) * c0)
        b = 2 * (n - 2) * c0 - (n - 3) * c1
        out = (
            (a - b) * f.jnjn(u)
            + b * f.laplacian(u)
            + (a + 2 * (n - 1) * b) * f.value(u)
        ) / unit_ball_volume(2 * n - 3)
        return float(out[0]) if out.size == 1 else out
    d = 2 * coeffs.n - 1
    R1 = np.eye(d)[None]
    R2 = _restricted_at_points(f, u)
    out = p_mu_pol_batch(coeffs, R1, R2)
    return float(out[0]) if out.size == 1 else out


def area_measure_density(coeffs, K, u, K2=None):
    """Density of the (mixed) area measure of smooth bodies at u."""
    if coeffs.degree == 2:
        if K2 is not None:
            raise ValueError("degree 2 takes a single body")
        return d_mu(coeffs, K, u)
    return d_mu(coeffs, K, u, K2 if K2 is not None else K)


# ---------------------------------------------------------------------------
# grid evaluation


def grid_restricted(slot, grid):
    """Cached restricted-Hessian stack of a body/function over a grid."""
    fn = as_sphere_function(slot)
    cache = grid._cache.setdefault("restricted", WeakKeyDictionary())
    key = fn.body if isinstance(fn, SupportFn) else fn
    if key not in cache:
        if isinstance(fn, SupportFn):
            R = restricted_hessian_batch(fn.body, grid)
        else:
            if not fn.has_hessian:
                raise UnsupportedSmoothness("slot has no second derivatives")
            R = _restricted_at_points(fn, grid.nodes)
        cache[key] = R
    return cache[key]


def grid_values(slot, grid):
    fn = as_sphere_function(slot)
    cache = grid._cache.setdefault("values", WeakKeyDictionary())
    key = fn.body if isinstance(fn, SupportFn) else fn
    if key not in cache:
        cache[key] = fn.value(grid.nodes)
    return cache[key]


def valuation_operator_route(coeffs, slots, grid):
    """Evaluate the polarized valuation by quadrature against the density.

    Degree 2: (1/2) integral of f * density(g); degree 3: (1/3) integral of
    f * density(g, h).  Only the first slot may lack second derivatives.
    Returns (value, standard_error).
    """
    slots = list(slots)
    if len(slots) != coeffs.degree:
        raise ValueError(f"need {coeffs.degree} slots")
    if grid.n != coeffs.n:
        raise ValueError("grid and coefficients live in different dimensions")
    vals = grid_values(slots[0], grid)
    if coeffs.degree == 2:
        dens = p_mu_batch(coeffs, grid_restricted(slots[1], grid))
    else:
        dens = p_mu_pol_batch(
            coeffs, grid_restricted(slots[1], grid), grid_restricted(slots[2], grid)
        )
    integrand = vals * dens if dens.shape == vals.shape else vals * np.broadcast_to(
        dens, vals.shape
    )
    total, se = grid.integrate(integrand)
    return total / coeffs.degree, se / coeffs.degree
