"""User-facing valuation layer: the theta-parametrized families, Klain
functions, and the two independent evaluation routes (Grassmannian orbit
averages and operator quadrature)."""

import math
from dataclasses import dataclass

import numpy as np

from .bodies import (
    ConvexBody,
    MinkowskiCombo,
    Polytope,
    as_sphere_function,
    minkowski,
    proj_area_batch,
    proj_vol3_batch,
)
from .errors import UnsupportedDimension, UnsupportedSmoothness
from .forms import ValuationCoeffs
from .geometry import kahler_angle_sq, sample_orbit_frames
from .operators import valuation_operator_route
from .util import double_factorial


def phi_coeffs(cos2theta, n):
    """Coefficients of the 2-plane orbit average with squared-cosine angle u."""
    if not 0.0 <= cos2theta <= 1.0:
        raise ValueError("cos2theta must lie in [0, 1]")
    if n < 2:
        raise UnsupportedDimension("need n >= 2")
    u = cos2theta
    c0 = (2 * n - 1 - u) / (4 * n * (n - 1))
    c1 = (1 + u) / (2 * n)
    return ValuationCoeffs(degree=2, c0=c0, c1=c1, n=n)


def psi_coeffs_ratio(cos2theta, n):
    """Unnormalized (c0, c1) pair for the 3-plane family; valid for n >= 2."""
    if not 0.0 <= cos2theta <= 1.0:
        raise ValueError("cos2theta must lie in [0, 1]")
    u = cos2theta
    return (2 * n - 3 - u, 2 * (n - 2) * (1 + u / 3.0))


def psi_prefactor(n):
    if n < 3:
        raise UnsupportedDimension("the 3-plane family needs n >= 3")
    return 2 ** (n - 2) * math.factorial(n - 3) / (n * math.pi * double_factorial(2 * n - 3))


def psi_coeffs(cos2theta, n):
    """Coefficients of the 3-plane orbit average with squared-cosine angle u."""
    r0, r1 = psi_coeffs_ratio(cos2theta, n)
    pref = psi_prefactor(n)
    return ValuationCoeffs(degree=3, c0=pref * r0, c1=pref * r1, n=n)


@dataclass(frozen=True)
class UnitaryValuation:
    """Degree-2 or -3 valuation with optional family provenance."""

    coeffs: ValuationCoeffs
    family: str = "raw"  # "phi_theta" | "psi_theta" | "raw"
    cos2theta: float | None = None

    def __post_init__(self):
        if self.family not in ("phi_theta", "psi_theta", "raw"):
            raise ValueError("unknown family tag")
        if self.family == "psi_theta" and self.coeffs.n < 3:
            raise UnsupportedDimension("psi needs n >= 3")
        if self.family != "raw" and self.cos2theta is None:
            raise ValueError("family-tagged valuations must store cos2theta")

    @property
    def degree(self):
        return self.coeffs.degree

    @property
    def n(self):
        return self.coeffs.n


def phi_valuation(cos2theta, n):
    return UnitaryValuation(phi_coeffs(cos2theta, n), "phi_theta", cos2theta)


def psi_valuation(cos2theta, n):
    return UnitaryValuation(psi_coeffs(cos2theta, n), "psi_theta", cos2theta)


def klain_value(coeffs, E):
    """Value density of the valuation on bodies inside the subspace E."""
    if E.k != coeffs.degree:
        raise ValueError(f"need a {coeffs.degree}-dimensional subspace")
    u = kahler_angle_sq(E)
    return coeffs.c0 * (1.0 - u) + coeffs.c1 * u


def eval_grassmannian(family, cos2theta, K, samples, seed, chunk=512):
    """Monte Carlo orbit average of projection volumes.

    family "phi" averages 2-plane projections, "psi" 3-plane projections
    (n >= 3).  Returns (estimate, standard_error); deterministic per seed.
    """
    if family not in ("phi", "psi"):
        raise ValueError("family must be 'phi' or 'psi'")
    k = 2 if family == "phi" else 3
    if k == 3 and K.n < 3:
        raise UnsupportedDimension("psi needs n >= 3")
    samples = int(samples)
    frames = sample_orbit_frames(K.n, k, cos2theta, samples, seed)
    vols = np.empty(samples)
    evaluate = proj_area_batch if k == 2 else proj_vol3_batch
    for lo in range(0, samples, chunk):
        vols[lo : lo + chunk] = evaluate(K, frames[lo : lo + chunk])
    est = float(np.mean(vols))
    se = float(np.std(vols, ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")
    return est, se


def mean_width(K, grid):
    """Average width: the 1-plane orbit average of projection lengths."""
    h = K.support_batch(grid.nodes) + K.support_batch(-grid.nodes)
    total, se = grid.integrate(h)
    mass = grid.total_mass
    return total / mass, se / mass


def _all_polytopes(slots):
    def poly(b):
        if isinstance(b, Polytope):
            return True
        if isinstance(b, MinkowskiCombo):
            return all(poly(p) for _, p in b.flattened())
        return False

    return all(isinstance(s, ConvexBody) and poly(s) for s in slots)


def _smooth_ok(slots):
    for i, s in enumerate(slots):
        fn = as_sphere_function(s)
        if i > 0 and not fn.has_hessian:
            return False
    return True


def eval_mixed(valuation, slots, grid=None, samples=4000, seed=None):
    """Polarized valuation on a tuple of slots (length = degree).

    Smooth slots are evaluated by operator quadrature (the first slot may be
    any sphere function).  All-polytope slots are evaluated by Minkowski
    inclusion-exclusion with the diagonal taken from the Grassmannian route,
    which needs a family-tagged valuation and a seed.  Returns (value, se).
    """
    slots = list(slots)
    if len(slots) != valuation.degree:
        raise ValueError(f"need {valuation.degree} slots")
    if _smooth_ok(slots):
        if grid is None:
            raise ValueError("operator route needs a quadrature grid")
        return valuation_operator_route(valuation.coeffs, slots, grid)
    if not _all_polytopes(slots):
        raise UnsupportedSmoothness(
            "mixed smooth/polytope slots are not supported on the operator route"
        )
    if valuation.family == "raw":
        raise ValueError("polytope route needs a family-tagged valuation")
    if seed is None:
        raise ValueError("polytope route needs a seed")
    family = "phi" if valuation.family == "phi_theta" else "psi"

    def diag(body, sub_seed):
        return eval_grassmannian(
            family, valuation.cos2theta, body, samples, seed + sub_seed
        )

    if valuation.degree == 2:
        K, L = slots
        vKL, s1 = diag(minkowski([(1.0, K), (1.0, L)]), 0)
        vK, s2 = diag(K, 1)
        vL, s3 = diag(L, 2)
        value = 0.5 * (vKL - vK - vL)
        se = 0.5 * math.sqrt(s1**2 + s2**2 + s3**2)
        return value, se
    K, L, M = slots
    parts = [
        (1.0, minkowski([(1.0, K), (1.0, L), (1.0, M)]), 0),
        (-1.0, minkowski([(1.0, K), (1.0, L)]), 1),
        (-1.0, minkowski([(1.0, K), (1.0, M)]), 2),
        (-1.0, minkowski([(1.0, L), (1.0, M)]), 3),
        (1.0, K, 4),
        (1.0, L, 5),
        (1.0, M, 6),
    ]
    value = 0.0
    var = 0.0
    for sign, body, sub in parts:
        v, s = diag(body, sub)
        value += sign * v
        var += s * s
    return value / 6.0, math.sqrt(var) / 6.0
