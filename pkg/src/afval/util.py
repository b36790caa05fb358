"""Shared numeric helpers: unit-ball volumes, complex/real conversions, seeds."""

import math
import os

import numpy as np


def unit_ball_volume(k):
    """Volume of the k-dimensional euclidean unit ball, exact up to one float product."""
    if k < 0:
        raise ValueError("dimension must be nonnegative")
    m, rem = divmod(k, 2)
    if rem == 0:
        return math.pi**m / math.factorial(m)
    return 2.0**k * math.pi**m * math.factorial(m) / math.factorial(k)


def sphere_volume(n):
    """Riemannian volume of the unit sphere in C^n = R^{2n}."""
    return 2 * n * unit_ball_volume(2 * n)


def double_factorial(k):
    if k < -1:
        raise ValueError("double factorial needs k >= -1")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def apply_J(v):
    """Multiplication by i in interleaved real coordinates (x1, y1, ..., xn, yn)."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0::2] = -v[..., 1::2]
    out[..., 1::2] = v[..., 0::2]
    return out


def real_to_complex(v):
    v = np.asarray(v, dtype=float)
    return v[..., 0::2] + 1j * v[..., 1::2]


def complex_to_real(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=float)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def complex_matrix_to_real(U):
    """Real 2n x 2n representation of a complex n x n matrix (commutes with J)."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[-1]
    out = np.zeros(U.shape[:-2] + (2 * n, 2 * n), dtype=float)
    out[..., 0::2, 0::2] = U.real
    out[..., 0::2, 1::2] = -U.imag
    out[..., 1::2, 0::2] = U.imag
    out[..., 1::2, 1::2] = U.real
    return out


def spawn_rngs(seed, count):
    """Independent child generators derived from one root seed by fixed splitting."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def worker_count():
    """Worker cap for data-parallel sweeps; AFVAL_THREADS overrides the CPU count."""
    env = os.environ.get("AFVAL_THREADS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError("AFVAL_THREADS must be an integer") from None
    return min(4, os.cpu_count() or 1)


def fmt17(x):
    """Format a float with 17 significant digits (reproducibility audits)."""
    return format(float(x), ".17g")
