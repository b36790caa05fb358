"""Deterministic generators of test bodies and test functions.

Used by the inequality sweep drivers and the acceptance suite; everything is
seeded so repeated runs are bit-identical.
"""

import numpy as np

from .bodies import DiffSupports, Ellipsoid, MinkowskiCombo, PerturbedBall, ball
from .harmonics import HarmonicSum, hermitian_cross_term, spherical_function


def random_unit_vector(n, rng):
    v = rng.standard_normal(2 * n)
    return v / np.linalg.norm(v)


def random_harmonic(n, rng, max_total=3):
    """A random low-order harmonic with a random pole."""
    pairs = [(1, 0), (1, 1), (2, 0), (2, 1), (3, 0)]
    pairs = [(k, l) for k, l in pairs if k + l <= max_total]
    k, l = pairs[rng.integers(len(pairs))]
    part = "re" if rng.random() < 0.5 or k == l else "im"
    return spherical_function(k, l, n, random_unit_vector(n, rng), part)


def random_harmonic_sum(n, rng, terms=3, scale=1.0):
    return HarmonicSum(
        [(scale * rng.uniform(-1, 1), random_harmonic(n, rng)) for _ in range(terms)]
    )


def random_perturbed_ball(n, rng, eps_scale=0.12, terms=2):
    """Random smooth convex body; the amplitude shrinks until the certificate passes."""
    fns = [random_harmonic(n, rng) for _ in range(terms)]
    amps = [rng.uniform(0.3, 1.0) for _ in range(terms)]
    eps = eps_scale
    while True:
        try:
            return PerturbedBall(
                n=n, terms=tuple((eps * a, f) for a, f in zip(amps, fns))
            )
        except ValueError:
            eps *= 0.5
            if eps < 1e-4:
                return ball(n)


def random_ellipsoid(n, rng, spread=0.25):
    d = rng.uniform(1.0 - spread, 1.0 + spread, size=2 * n)
    return Ellipsoid(n=n, shape=np.diag(d**2))


def random_smooth_body(n, rng):
    pick = rng.integers(4)
    if pick == 0:
        return ball(n, radius=rng.uniform(0.7, 1.4), center=0.3 * random_unit_vector(n, rng))
    if pick == 1:
        return random_ellipsoid(n, rng)
    if pick == 2:
        return random_perturbed_ball(n, rng)
    return MinkowskiCombo(
        n=n,
        terms=(
            (rng.uniform(0.3, 0.8), ball(n)),
            (rng.uniform(0.3, 0.8), random_perturbed_ball(n, rng)),
        ),
    )


def random_test_function(n, rng):
    """Random admissible first slot: a difference of support functions."""
    if rng.random() < 0.5:
        return random_harmonic_sum(n, rng, terms=2, scale=0.5)
    return DiffSupports(random_smooth_body(n, rng), random_smooth_body(n, rng))


def route_agreement_zoo(n):
    """Six smooth bodies exercising every smooth variant."""
    e1 = np.zeros(2 * n)
    e1[0] = 0.25
    diag = 1.0 + 0.2 * np.cos(np.arange(2 * n))
    return [
        ball(n),
        ball(n, radius=1.3, center=e1),
        Ellipsoid(n=n, shape=np.diag(diag)),
        PerturbedBall(n=n, terms=((0.15, spherical_function(1, 1, n)),)),
        PerturbedBall(
            n=n,
            terms=(
                (0.08, spherical_function(2, 0, n, part="re")),
                (0.05, hermitian_cross_term(1, 2, n, "im")),
            ),
        ),
        MinkowskiCombo(
            n=n,
            terms=(
                (0.5, ball(n)),
                (0.5, Ellipsoid(n=n, shape=np.diag(diag[::-1]))),
            ),
        ),
    ]
