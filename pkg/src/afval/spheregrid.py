"""Quadrature grids on the unit sphere of C^n.

For n = 2 a product rule in Hopf-like coordinates (Gauss-Legendre in the
radial split, trapezoid in both angles) integrates low-degree polynomials to
rounding.  For n >= 3 seeded Monte Carlo with antithetic pairs is used; the
standard error of every integral is reported alongside the value.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import SphericalVoronoi

from .geometry import adapted_frames_batch
from .util import sphere_volume

PRODUCT_TOL = 1e-6  # absolute quadrature tolerance reported for product grids


@dataclass(frozen=True, eq=False)
class SphereGrid:
    n: int
    nodes: np.ndarray  # (N, 2n)
    weights: np.ndarray  # (N,)
    method: str  # "product" | "monte-carlo"
    seed: int | None = None
    resolution: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def node_count(self):
        return self.nodes.shape[0]

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    @property
    def frames(self):
        if "frames" not in self._cache:
            self._cache["frames"] = adapted_frames_batch(self.nodes)
        return self._cache["frames"]

    def integrate(self, values):
        """Integral of a node-sampled function; returns (value, standard error)."""
        values = np.asarray(values, dtype=float)
        total = float(np.sum(values * self.weights))
        if self.method == "product":
            return total, 0.0
        pair_means = 0.5 * (values[0::2] + values[1::2])
        half = pair_means.size
        se = sphere_volume(self.n) * float(np.std(pair_means, ddof=1)) / np.sqrt(half)
        return total, se

    @property
    def quad_tol(self):
        return PRODUCT_TOL if self.method == "product" else 0.0


def build_grid(n, method="auto", resolution=None, seed=None):
    """Build a quadrature grid on the unit sphere of C^n.

    method "product" (n = 2 only) uses resolution^3 nodes in Hopf-like
    coordinates; "monte-carlo" draws `resolution` seeded antithetic nodes.
    "auto" picks product for n = 2 and Monte Carlo otherwise.
    """
    if method == "auto":
        method = "product" if n == 2 else "monte-carlo"
    if method == "product":
        if n != 2:
            raise ValueError("product grids are implemented for n = 2 only")
        resolution = 64 if resolution is None else int(resolution)
        if resolution < 10:
            raise ValueError("resolution must be >= 10")
        return _product_grid_s3(resolution)
    if method == "monte-carlo":
        resolution = 200_000 if resolution is None else int(resolution)
        if resolution < 10:
            raise ValueError("resolution must be >= 10")
        if seed is None:
            raise ValueError("Monte Carlo grids need a seed")
        return _mc_grid(n, resolution, seed)
    raise ValueError(f"unknown grid method {method!r}")


def _product_grid_s3(r):
    # S^3 as z1 = cos(eta) e^{i xi1}, z2 = sin(eta) e^{i xi2};
    # the volume element cos(eta) sin(eta) d(eta) d(xi1) d(xi2) becomes
    # dt/2 d(xi1) d(xi2) under t = sin^2(eta).
    t, wt = np.polynomial.legendre.leggauss(r)
    t = 0.5 * (t + 1.0)
    wt = 0.5 * wt
    xi = 2.0 * np.pi * np.arange(r) / r
    wxi = 2.0 * np.pi / r

    ct = np.sqrt(1.0 - t)
    st = np.sqrt(t)
    T, X1, X2 = np.meshgrid(np.arange(r), xi, xi, indexing="ij")
    nodes = np.empty((r, r, r, 4))
    nodes[..., 0] = ct[T] * np.cos(X1)
    nodes[..., 1] = ct[T] * np.sin(X1)
    nodes[..., 2] = st[T] * np.cos(X2)
    nodes[..., 3] = st[T] * np.sin(X2)
    weights = np.broadcast_to((0.5 * wt)[:, None, None] * wxi * wxi, (r, r, r))
    return SphereGrid(
        n=2,
        nodes=nodes.reshape(-1, 4),
        weights=np.ascontiguousarray(weights).reshape(-1),
        method="product",
        resolution=r,
    )


def _mc_grid(n, count, seed):
    half = (count + 1) // 2
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((half, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    nodes = np.empty((2 * half, 2 * n))
    nodes[0::2] = g
    nodes[1::2] = -g
    weights = np.full(2 * half, sphere_volume(n) / (2 * half))
    return SphereGrid(
        n=n, nodes=nodes, weights=weights, method="monte-carlo", seed=seed, resolution=count
    )


@lru_cache(maxsize=4)
def certificate_grid(n):
    """Fixed 10^4-node seeded grid used by the convexity certificate."""
    return _mc_grid(n, 10_000, seed=70_001)


@lru_cache(maxsize=8)
def icosphere(level=4):
    """Subdivided icosahedron on S^2: nodes, Voronoi weights, tangent pairs.

    Level 4 gives 2562 vertices.  Weights are spherical Voronoi cell areas,
    so constants integrate exactly to 4 pi.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
            (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
            (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(v) for v in verts]
    for _ in range(level):
        midpoint = {}
        new_faces = []

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                v = np.array(verts[i]) + np.array(verts[j])
                v /= np.linalg.norm(v)
                verts.append(tuple(v))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    nodes = np.array(verts)
    sv = SphericalVoronoi(nodes)
    weights = sv.calculate_areas()

    # deterministic tangent pair at every node
    ref = np.where(np.abs(nodes[:, [0]]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    t1 = np.cross(nodes, ref)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(nodes, t1)
    tangents = np.stack([t1, t2], axis=1)  # (M, 2, 3)
    return nodes, weights, tangents
