"""Euclidean/hermitian linear algebra on C^n = R^{2n}.

Coordinates are interleaved (x1, y1, ..., xn, yn) and the complex structure J
sends the x_i-axis to the y_i-axis.  The two-form omega(u, v) = <Ju, v> measures
how complex a subspace is via its squared cosine Kahler angle.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import UnsupportedDimension
from .util import apply_J, complex_matrix_to_real, complex_to_real, real_to_complex

GRAM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AmbientSpace:
    """C^n with its standard complex structure and Kahler form."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise UnsupportedDimension("complex dimension must be >= 2")

    @property
    def dim(self):
        return 2 * self.n

    @cached_property
    def J(self):
        return apply_J(np.eye(self.dim)).T

    def omega(self, u, v):
        return float(apply_J(u) @ np.asarray(v, dtype=float))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Real k-dimensional subspace given by an orthonormal frame (rows)."""

    frame: np.ndarray

    def __post_init__(self):
        frame = np.atleast_2d(np.asarray(self.frame, dtype=float))
        object.__setattr__(self, "frame", frame)
        gram = frame @ frame.T
        if not np.allclose(gram, np.eye(frame.shape[0]), atol=1e-10):
            raise ValueError("frame is not orthonormal")

    @property
    def k(self):
        return self.frame.shape[0]

    @property
    def ambient_dim(self):
        return self.frame.shape[1]


@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Tangent frame (e_1bar, e_2, e_2bar, ..., e_n, e_nbar) at u with e_1bar = Ju."""

    u: np.ndarray
    vectors: np.ndarray  # (2n-1, 2n), rows in the order above


def kahler_angle_sq(E):
    """Squared cosine of the Kahler angle of a 2- or 3-dimensional subspace."""
    if E.k not in (2, 3):
        raise UnsupportedDimension("Kahler angle implemented for k in {2, 3}")
    omega = apply_J(E.frame) @ E.frame.T
    return float(np.sum(np.triu(omega, 1) ** 2))


def haar_unitary(n, seed):
    """Haar-random element of U(n) as an orthogonal 2n x 2n real matrix."""
    if n < 2:
        raise UnsupportedDimension("need n >= 2")
    return complex_matrix_to_real(haar_unitary_complex(n, seed))


def haar_unitary_complex(n, seed, count=None):
    """Complex Haar sample(s): Ginibre matrix, QR, diagonal phase fix."""
    rng = np.random.default_rng(seed)
    shape = (n, n) if count is None else (count, n, n)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def orbit_representative(n, k, cos2theta):
    """Canonical frame with the requested squared-cosine Kahler angle."""
    if not 0.0 <= cos2theta <= 1.0:
        raise ValueError("cos2theta must lie in [0, 1]")
    if k not in (2, 3):
        raise UnsupportedDimension("orbits implemented for k in {2, 3}")
    if k == 3 and n < 3:
        raise UnsupportedDimension("3-dimensional orbits need n >= 3")
    c = np.sqrt(cos2theta)
    s = np.sqrt(1.0 - cos2theta)
    dim = 2 * n
    e1 = np.zeros(dim)
    e1[0] = 1.0
    v2 = np.zeros(dim)
    v2[1] = c  # J e1 direction
    v2[2] = s  # x2-axis, orthogonal to the complex line of e1
    rows = [e1, v2]
    if k == 3:
        e3 = np.zeros(dim)
        e3[4] = 1.0  # x3-axis, orthogonal to C e1 and to {e2, J e2}
        rows.append(e3)
    return np.array(rows)


def sample_orbit(n, k, cos2theta, seed):
    """Haar-rotated canonical representative; preserves the Kahler angle."""
    rep = orbit_representative(n, k, cos2theta)
    rot = haar_unitary(n, seed)
    return Subspace(rep @ rot.T)


def sample_orbit_frames(n, k, cos2theta, count, seed):
    """Batched orbit samples, one (k, 2n) frame per row of the output."""
    rep = orbit_representative(n, k, cos2theta)
    rots = complex_matrix_to_real(haar_unitary_complex(n, seed, count=count))
    return np.einsum("kj,sij->ski", rep, rots)


def adapted_frame(u):
    """Adapted tangent frame at a point of the unit sphere."""
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise ValueError("base point must be a unit vector")
    vecs = adapted_frames_batch(u[None, :])[0]
    return AdaptedFrame(u=u, vectors=vecs)


def adapted_frames_batch(U):
    """Adapted frames at many sphere points.

    Returns an array of shape (N, 2n-1, 2n) whose rows per point are
    (Ju, e_2, Je_2, ..., e_n, Je_n).  The complex part comes from pivoted
    Gram-Schmidt over the standard complex basis, largest residual first,
    so the construction is deterministic and stable near the poles.
    """
    U = np.asarray(U, dtype=float)
    N, dim = U.shape
    n = dim // 2
    uc = real_to_complex(U)  # (N, n)

    cands = np.broadcast_to(np.eye(n, dtype=complex), (N, n, n)).copy()
    coef = np.einsum("ncj,nj->nc", cands, uc.conj())
    cands -= coef[:, :, None] * uc[:, None, :]
    used = np.zeros((N, n), dtype=bool)

    fs = np.empty((N, n - 1, n), dtype=complex)
    rows = np.arange(N)
    for j in range(n - 1):
        norms = np.linalg.norm(cands, axis=2)
        norms[used] = -1.0
        pick = np.argmax(norms, axis=1)
        f = cands[rows, pick]
        f = f / np.linalg.norm(f, axis=1, keepdims=True)
        fs[:, j] = f
        used[rows, pick] = True
        coef = np.einsum("ncj,nj->nc", cands, f.conj())
        cands -= coef[:, :, None] * f[:, None, :]

    frames = np.empty((N, 2 * n - 1, dim))
    frames[:, 0] = apply_J(U)
    frames[:, 1::2] = complex_to_real(fs)
    frames[:, 2::2] = apply_J(frames[:, 1::2])
    return frames
