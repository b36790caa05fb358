"""Convex bodies via support functions: evaluation, second derivatives,
Minkowski combinations, and projection volumes for k = 1, 2, 3.

Smooth bodies expose the value, gradient and Hessian of the 1-homogeneous
extension of their support function; the restricted Hessian in an adapted
tangent frame is the matrix fed to the valuation polynomials.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import SchemaError, UnsupportedSmoothness
from .forms import SymForm
from .geometry import Subspace, adapted_frame
from .spheregrid import certificate_grid, icosphere
from .util import unit_ball_volume

CIRCLE_NODES = 256
ICO_LEVEL = 4
CONVEXITY_EIG_TOL = -1e-8


# ---------------------------------------------------------------------------
# sphere functions


class SphereFunction:
    """Function on the unit sphere with an optional smooth 1-homogeneous extension."""

    is_difference_of_supports = False
    has_spectral = False  # analytic Laplacian / Hopf second derivative available

    def value(self, U):
        raise NotImplementedError

    def ext_value(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1)
        return r * self.value(X / r[..., None])

    def ext_grad(self, X):
        raise UnsupportedSmoothness(f"{type(self).__name__} has no gradient")

    def ext_hess(self, X):
        raise UnsupportedSmoothness(f"{type(self).__name__} has no Hessian")

    @property
    def has_hessian(self):
        return True


class SupportFn(SphereFunction):
    """Support function of a convex body as a SphereFunction."""

    is_difference_of_supports = True

    def __init__(self, body):
        self.body = body
        self.dim = body.dim

    @property
    def has_hessian(self):
        return self.body.is_smooth

    def value(self, U):
        return self.body.support_batch(U)

    def ext_value(self, X):
        return self.body.ext_value_batch(X)

    def ext_grad(self, X):
        return self.body.ext_grad_batch(X)

    def ext_hess(self, X):
        return self.body.ext_hess_batch(X)


class DiffSupports(SphereFunction):
    """Difference h_K - h_L of two support functions."""

    is_difference_of_supports = True

    def __init__(self, K, L):
        if K.n != L.n:
            raise ValueError("bodies live in different dimensions")
        self.K, self.L = K, L
        self.dim = K.dim

    @property
    def has_hessian(self):
        return self.K.is_smooth and self.L.is_smooth

    def value(self, U):
        return self.K.support_batch(U) - self.L.support_batch(U)

    def ext_value(self, X):
        return self.K.ext_value_batch(X) - self.L.ext_value_batch(X)

    def ext_grad(self, X):
        return self.K.ext_grad_batch(X) - self.L.ext_grad_batch(X)

    def ext_hess(self, X):
        return self.K.ext_hess_batch(X) - self.L.ext_hess_batch(X)


class FnCombo(SphereFunction):
    """Linear combination of SphereFunctions."""

    def __init__(self, terms):
        self.terms = [(float(c), f) for c, f in terms]
        self.dim = self.terms[0][1].dim
        self.is_difference_of_supports = all(
            f.is_difference_of_supports for _, f in self.terms
        )

    @property
    def has_hessian(self):
        return all(f.has_hessian for _, f in self.terms)

    def _sum(self, method, X):
        out = None
        for c, f in self.terms:
            v = c * getattr(f, method)(X)
            out = v if out is None else out + v
        return out

    def value(self, U):
        return self._sum("value", U)

    def ext_value(self, X):
        return self._sum("ext_value", X)

    def ext_grad(self, X):
        return self._sum("ext_grad", X)

    def ext_hess(self, X):
        return self._sum("ext_hess", X)


def as_sphere_function(slot):
    if isinstance(slot, SphereFunction):
        return slot
    if isinstance(slot, ConvexBody):
        return SupportFn(slot)
    raise TypeError(f"cannot interpret {type(slot).__name__} as a sphere function")


# ---------------------------------------------------------------------------
# bodies


@dataclass(frozen=True, eq=False)
class ConvexBody:
    n: int

    @property
    def dim(self):
        return 2 * self.n

    # subclasses: support_batch, ext_value_batch, ext_grad_batch, ext_hess_batch

    def support(self, u):
        u = np.asarray(u, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > 1e-8:
            raise ValueError("support takes unit vectors")
        return float(self.support_batch(u[None])[0])

    def ext_value_batch(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1)
        return r * self.support_batch(X / r[..., None])

    @property
    def is_smooth(self):
        return True

    def support_function(self):
        return SupportFn(self)


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        c = np.zeros(self.dim) if self.center is None else np.asarray(self.center, float)
        if c.shape != (self.dim,):
            raise ValueError("center has wrong dimension")
        object.__setattr__(self, "center", c)

    def support_batch(self, U):
        return U @ self.center + self.radius

    def ext_value_batch(self, X):
        return X @ self.center + self.radius * np.linalg.norm(X, axis=-1)

    def ext_grad_batch(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        return self.center + self.radius * X / r

    def ext_hess_batch(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1)
        xh = X / r[..., None]
        eye = np.eye(self.dim)
        return (self.radius / r)[..., None, None] * (
            eye - xh[..., :, None] * xh[..., None, :]
        )


def ball(n, radius=1.0, center=None):
    return Ball(n=n, center=center, radius=radius)


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexBody):
    """Centered ellipsoid with support function sqrt(u^T Q u)."""

    shape: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.shape, dtype=float)
        if Q.shape != (self.dim, self.dim):
            raise ValueError("shape matrix has wrong dimension")
        Q = 0.5 * (Q + Q.T)
        if np.min(np.linalg.eigvalsh(Q)) <= 0:
            raise ValueError("shape matrix must be positive definite")
        object.__setattr__(self, "shape", Q)

    def support_batch(self, U):
        U = np.asarray(U, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", U, self.shape, U))

    def ext_value_batch(self, X):
        return self.support_batch(X)

    def ext_grad_batch(self, X):
        X = np.asarray(X, dtype=float)
        QX = X @ self.shape
        h = np.sqrt(np.einsum("...i,...i->...", X, QX))
        return QX / h[..., None]

    def ext_hess_batch(self, X):
        X = np.asarray(X, dtype=float)
        QX = X @ self.shape
        h = np.sqrt(np.einsum("...i,...i->...", X, QX))
        return self.shape / h[..., None, None] - (
            QX[..., :, None] * QX[..., None, :]
        ) / (h**3)[..., None, None]


@dataclass(frozen=True, eq=False)
class Polytope(ConvexBody):
    vertices: np.ndarray

    def __post_init__(self):
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.shape[0] < 1 or V.shape[1] != self.dim:
            raise ValueError("polytope needs at least one vertex of the right dimension")
        object.__setattr__(self, "vertices", V)

    def support_batch(self, U):
        return np.max(np.asarray(U) @ self.vertices.T, axis=-1)

    def support_point_batch(self, U):
        idx = np.argmax(np.asarray(U) @ self.vertices.T, axis=-1)
        return self.vertices[idx]

    @property
    def is_smooth(self):
        # a single point has a linear (analytic) support function
        return self.vertices.shape[0] == 1

    def ext_value_batch(self, X):
        return np.max(np.asarray(X) @ self.vertices.T, axis=-1)

    def ext_grad_batch(self, X):
        if not self.is_smooth:
            raise UnsupportedSmoothness("polytope support function is not differentiable")
        return np.broadcast_to(self.vertices[0], np.asarray(X).shape).copy()

    def ext_hess_batch(self, X):
        if not self.is_smooth:
            raise UnsupportedSmoothness("polytope support function is not C^2")
        X = np.asarray(X, dtype=float)
        return np.zeros(X.shape[:-1] + (self.dim, self.dim))


def point(n, p=None):
    p = np.zeros(2 * n) if p is None else np.asarray(p, dtype=float)
    return Polytope(n=n, vertices=p[None, :])


@dataclass(frozen=True, eq=False)
class PerturbedBall(ConvexBody):
    """Support function 1 + sum_j eps_j f_j with analytic sphere functions f_j."""

    terms: tuple
    check_convexity: bool = True

    def __post_init__(self):
        terms = tuple((float(e), f) for e, f in self.terms)
        object.__setattr__(self, "terms", terms)
        for _, f in terms:
            if not isinstance(f, SphereFunction):
                raise TypeError("perturbation terms must be SphereFunctions")
        if self.check_convexity:
            lam = self.convexity_certificate()
            if lam < CONVEXITY_EIG_TOL:
                raise ValueError(
                    f"perturbed ball fails the convexity certificate "
                    f"(min restricted-Hessian eigenvalue {lam:.3e})"
                )

    def convexity_certificate(self):
        """Min eigenvalue of the restricted Hessian over the certificate grid."""
        grid = certificate_grid(self.n)
        R = restricted_hessian_batch(self, grid)
        return float(np.min(np.linalg.eigvalsh(R)))

    def support_batch(self, U):
        out = np.ones(np.asarray(U).shape[:-1])
        for e, f in self.terms:
            out = out + e * f.value(U)
        return out

    def ext_value_batch(self, X):
        X = np.asarray(X, dtype=float)
        out = np.linalg.norm(X, axis=-1)
        for e, f in self.terms:
            out = out + e * f.ext_value(X)
        return out

    def ext_grad_batch(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        out = X / r
        for e, f in self.terms:
            out = out + e * f.ext_grad(X)
        return out

    def ext_hess_batch(self, X):
        X = np.asarray(X, dtype=float)
        r = np.linalg.norm(X, axis=-1)
        xh = X / r[..., None]
        out = (1.0 / r)[..., None, None] * (
            np.eye(self.dim) - xh[..., :, None] * xh[..., None, :]
        )
        for e, f in self.terms:
            out = out + e * f.ext_hess(X)
        return out


@dataclass(frozen=True, eq=False)
class MinkowskiCombo(ConvexBody):
    terms: tuple  # ((coef, body), ...)

    def __post_init__(self):
        terms = tuple((float(c), b) for c, b in self.terms)
        for c, b in terms:
            if c < 0:
                raise ValueError("Minkowski coefficients must be nonnegative")
            if b.n != self.n:
                raise ValueError("mixed ambient dimensions in Minkowski combination")
        object.__setattr__(self, "terms", terms)

    def support_batch(self, U):
        out = None
        for c, b in self.terms:
            v = c * b.support_batch(U)
            out = v if out is None else out + v
        return out

    def ext_value_batch(self, X):
        out = None
        for c, b in self.terms:
            v = c * b.ext_value_batch(X)
            out = v if out is None else out + v
        return out

    def ext_grad_batch(self, X):
        out = None
        for c, b in self.terms:
            v = c * b.ext_grad_batch(X)
            out = v if out is None else out + v
        return out

    def ext_hess_batch(self, X):
        if not self.is_smooth:
            raise UnsupportedSmoothness(
                "combination contains a polytope; use projection/hull routes"
            )
        out = None
        for c, b in self.terms:
            v = c * b.ext_hess_batch(X)
            out = v if out is None else out + v
        return out

    @property
    def is_smooth(self):
        return all(b.is_smooth for _, b in self.terms)

    def flattened(self):
        """(coef, body) pairs with nested combinations expanded."""
        out = []
        for c, b in self.terms:
            if isinstance(b, MinkowskiCombo):
                out.extend((c * c2, b2) for c2, b2 in b.flattened())
            else:
                out.append((c, b))
        return out


def minkowski(terms):
    """Minkowski combination sum_i coef_i * K_i as a ConvexBody."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty Minkowski combination")
    n = terms[0][1].n
    return MinkowskiCombo(n=n, terms=tuple(terms))


def scale(K, t):
    return minkowski([(t, K)])


def translate(K, v):
    return minkowski([(1.0, K), (1.0, point(K.n, v))])


# ---------------------------------------------------------------------------
# restricted Hessian


def restricted_hessian(K, u):
    """Matrix of the second tangential derivative form in the adapted frame at u."""
    fn = as_sphere_function(K)
    frame = adapted_frame(np.asarray(u, dtype=float))
    H = fn.ext_hess(frame.u[None])[0]
    R = frame.vectors @ H @ frame.vectors.T
    n = fn.dim // 2
    return SymForm(n, 0.5 * (R + R.T))


def restricted_hessian_batch(K, grid):
    """Restricted Hessians over all grid nodes, shape (N, d, d) or (1, d, d)."""
    fn = as_sphere_function(K)
    if isinstance(K, Ball):
        d = K.dim - 1
        return K.radius * np.eye(d)[None]
    H = fn.ext_hess(grid.nodes)
    F = grid.frames
    R = np.einsum("nai,nij,nbj->nab", F, H, F, optimize=True)
    return 0.5 * (R + np.swapaxes(R, -1, -2))


# ---------------------------------------------------------------------------
# projection volumes


def _check_subspace(E, dim):
    if not isinstance(E, Subspace):
        E = Subspace(np.asarray(E, dtype=float))
    if E.ambient_dim != dim:
        raise ValueError("subspace frame has the wrong ambient dimension")
    return E


def proj_volume(K, E):
    """k-dimensional volume of the orthogonal projection of K onto E (k <= 3)."""
    E = _check_subspace(E, K.dim)
    if E.k == 1:
        v = E.frame[0]
        return float(K.support_batch(v[None])[0] + K.support_batch(-v[None])[0])
    if E.k == 2:
        return float(proj_area_batch(K, E.frame[None])[0])
    if E.k == 3:
        return float(proj_vol3_batch(K, E.frame[None])[0])
    raise ValueError("projection volumes implemented for k in {1, 2, 3}")


def _split_parts(K):
    """(smooth (coef, body) list, polytope (coef, body) list)."""
    if isinstance(K, MinkowskiCombo):
        parts = K.flattened()
    else:
        parts = [(1.0, K)]
    smooth = [(c, b) for c, b in parts if b.is_smooth and c > 0]
    poly = [(c, b) for c, b in parts if not b.is_smooth and c > 0]
    return smooth, poly


_circle_cache = {}


def _circle(nodes):
    if nodes not in _circle_cache:
        phi = 2.0 * np.pi * np.arange(nodes) / nodes
        _circle_cache[nodes] = (np.cos(phi), np.sin(phi))
    return _circle_cache[nodes]


def _smooth_area_trapezoid(body_terms, frames, nodes):
    cphi, sphi = _circle(nodes)
    f1, f2 = frames[:, 0], frames[:, 1]
    dirs = cphi[None, :, None] * f1[:, None, :] + sphi[None, :, None] * f2[:, None, :]
    tang = -sphi[None, :, None] * f1[:, None, :] + cphi[None, :, None] * f2[:, None, :]
    S, C, dim = dirs.shape
    flat = dirs.reshape(-1, dim)
    h = np.zeros(S * C)
    grad = np.zeros((S * C, dim))
    for coef, b in body_terms:
        h += coef * b.support_batch(flat)
        grad += coef * b.ext_grad_batch(flat)
    h = h.reshape(S, C)
    hp = np.einsum("sci,sci->sc", grad.reshape(S, C, dim), tang)
    return (2.0 * np.pi / nodes) * 0.5 * np.sum(h * h - hp * hp, axis=1)


def _smooth_area_batch(body_terms, frames):
    # trapezoid on the circle, Richardson-extrapolated via node doubling
    coarse = _smooth_area_trapezoid(body_terms, frames, CIRCLE_NODES // 2)
    fine = _smooth_area_trapezoid(body_terms, frames, CIRCLE_NODES)
    return fine + (fine - coarse) / 3.0


def _hull2d(points):
    """Convex hull (ccw, no repeats) of 2D points; handles degenerate input."""
    pts = np.unique(np.round(points, 12), axis=0)
    if pts.shape[0] <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and np.cross(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    return hull


def _polygon_area(hull):
    if hull.shape[0] < 3:
        return 0.0
    x, y = hull[:, 0], hull[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _poly_projected_polygon(poly_terms, frame):
    """Vertices of the projected (scaled) polytope Minkowski sum in E-coords."""
    pts = np.zeros((1, 2))
    for coef, b in poly_terms:
        proj = coef * (b.vertices @ frame.T)
        pts = (pts[:, None, :] + proj[None, :, :]).reshape(-1, 2)
        if pts.shape[0] > 4096:
            pts = _hull2d(pts)
    return pts


def _mixed_area_smooth_polygon(smooth_terms, hull, frame):
    """Mixed area V(S, Q) = 1/2 sum over edges of |e| h_S(outward normal)."""
    if hull.shape[0] < 2:
        return 0.0
    if hull.shape[0] == 2:
        d = hull[1] - hull[0]
        length = np.linalg.norm(d)
        nrm = np.array([d[1], -d[0]]) / length
        dirs = np.array([nrm, -nrm]) @ frame
        h = np.zeros(2)
        for coef, b in smooth_terms:
            h += coef * b.support_batch(dirs)
        return 0.5 * length * float(np.sum(h))
    edges = np.roll(hull, -1, axis=0) - hull
    lengths = np.linalg.norm(edges, axis=1)
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
    dirs = normals @ frame
    h = np.zeros(hull.shape[0])
    for coef, b in smooth_terms:
        h += coef * b.support_batch(dirs)
    return 0.5 * float(np.sum(lengths * h))


def proj_area_batch(K, frames):
    """Projected areas onto many 2-planes; frames has shape (S, 2, 2n)."""
    frames = np.asarray(frames, dtype=float)
    if isinstance(K, Ball):
        return np.full(frames.shape[0], np.pi * K.radius**2)
    if isinstance(K, Ellipsoid):
        M = np.einsum("sai,ij,sbj->sab", frames, K.shape, frames)
        return np.pi * np.sqrt(np.linalg.det(M))
    smooth, poly = _split_parts(K)
    if not poly:
        return _smooth_area_batch(smooth, frames)
    out = np.empty(frames.shape[0])
    smooth_areas = _smooth_area_batch(smooth, frames) if smooth else None
    for s, frame in enumerate(frames):
        hull = _hull2d(_poly_projected_polygon(poly, frame))
        area = _polygon_area(hull)
        if smooth:
            area += smooth_areas[s]
            area += 2.0 * _mixed_area_smooth_polygon(smooth, hull, frame)
        out[s] = area
    return out


def _hull_volume_3d(pts):
    pts = np.asarray(pts, dtype=float)
    centered = pts - pts.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-10) < 3:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def _smooth_vol3_batch(body_terms, frames, chunk=64):
    nodes, wts, tangents = icosphere(ICO_LEVEL)
    S = frames.shape[0]
    dim = frames.shape[2]
    out = np.empty(S)
    for lo in range(0, S, chunk):
        V = frames[lo : lo + chunk]  # (c, 3, dim)
        dirs = np.einsum("ga,cai->cgi", nodes, V)  # (c, G, dim)
        flat = dirs.reshape(-1, dim)
        g = np.zeros(flat.shape[0])
        H = np.zeros((flat.shape[0], dim, dim))
        for coef, b in body_terms:
            g += coef * b.support_batch(flat)
            H += coef * b.ext_hess_batch(flat)
        c = V.shape[0]
        G = nodes.shape[0]
        g = g.reshape(c, G)
        H = H.reshape(c, G, dim, dim)
        Hsub = np.einsum("cai,cgij,cbj->cgab", V, H, V, optimize=True)  # (c, G, 3, 3)
        M = np.einsum("gxa,cgab,gyb->cgxy", tangents, Hsub, tangents, optimize=True)
        det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
        out[lo : lo + chunk] = np.sum(wts * g * det, axis=1) / 3.0
    return out


def _support_point_hull_vol3(K, frame):
    nodes, _, _ = icosphere(3)
    dirs = nodes @ frame  # (G, dim)
    smooth, poly = _split_parts(K)
    pts = np.zeros((nodes.shape[0], frame.shape[1]))
    for coef, b in smooth:
        pts += coef * b.ext_grad_batch(dirs)
    for coef, b in poly:
        pts += coef * b.support_point_batch(dirs)
    return _hull_volume_3d(pts @ frame.T)


def proj_vol3_batch(K, frames):
    """Projected volumes onto many 3-planes; frames has shape (S, 3, 2n)."""
    frames = np.asarray(frames, dtype=float)
    if isinstance(K, Ball):
        return np.full(frames.shape[0], unit_ball_volume(3) * K.radius**3)
    if isinstance(K, Ellipsoid):
        M = np.einsum("sai,ij,sbj->sab", frames, K.shape, frames)
        return unit_ball_volume(3) * np.sqrt(np.linalg.det(M))
    smooth, poly = _split_parts(K)
    if not poly:
        return _smooth_vol3_batch(smooth, frames)
    if not smooth and len(poly) == 1 and poly[0][0] == 1.0:
        return np.array(
            [_hull_volume_3d(poly[0][1].vertices @ f.T) for f in frames]
        )
    return np.array([_support_point_hull_vol3(K, f) for f in frames])


# ---------------------------------------------------------------------------
# document schema


def parse_body(document):
    """Parse a body document ({"n": ..., "body": {...}}) into a ConvexBody."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise SchemaError("document must be a JSON object")
    n = document.get("n")
    if not isinstance(n, int) or n < 2:
        raise SchemaError("n: must be an integer >= 2")
    if "body" not in document:
        raise SchemaError("body: missing")
    return _parse_body_node(document["body"], n, "body")


def _schema_get(node, key, path, types, predicate=None, what=""):
    if key not in node:
        raise SchemaError(f"{path}.{key}: missing")
    val = node[key]
    if not isinstance(val, types):
        raise SchemaError(f"{path}.{key}: expected {what or types}")
    if predicate is not None and not predicate(val):
        raise SchemaError(f"{path}.{key}: invalid value {val!r}")
    return val


def _parse_body_node(node, n, path):
    if not isinstance(node, dict) or "type" not in node:
        raise SchemaError(f"{path}: expected an object with a 'type' field")
    kind = node["type"]
    if kind == "ball":
        radius = _schema_get(node, "radius", path, (int, float), lambda r: r > 0)
        center = node.get("center")
        if center is not None:
            center = _parse_vector(center, 2 * n, f"{path}.center")
        return Ball(n=n, center=center, radius=float(radius))
    if kind == "ellipsoid":
        Q = _schema_get(node, "shape", path, list)
        try:
            return Ellipsoid(n=n, shape=np.asarray(Q, dtype=float))
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{path}.shape: {exc}") from None
    if kind == "polytope":
        verts = _schema_get(node, "vertices", path, list, lambda v: len(v) >= 1)
        rows = [_parse_vector(v, 2 * n, f"{path}.vertices[{i}]") for i, v in enumerate(verts)]
        return Polytope(n=n, vertices=np.array(rows))
    if kind == "perturbed_ball":
        from . import harmonics  # deferred: bodies must not depend on harmonics at import

        raw = _schema_get(node, "terms", path, list, lambda v: len(v) >= 1)
        terms = []
        for i, t in enumerate(raw):
            tpath = f"{path}.terms[{i}]"
            if not isinstance(t, dict):
                raise SchemaError(f"{tpath}: expected an object")
            eps = _schema_get(t, "eps", tpath, (int, float))
            fn_doc = _schema_get(t, "fn", tpath, dict)
            terms.append((float(eps), harmonics.fn_from_doc(fn_doc, n, f"{tpath}.fn")))
        try:
            return PerturbedBall(n=n, terms=tuple(terms))
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    if kind == "minkowski":
        raw = _schema_get(node, "terms", path, list, lambda v: len(v) >= 1)
        terms = []
        for i, t in enumerate(raw):
            tpath = f"{path}.terms[{i}]"
            if not isinstance(t, dict):
                raise SchemaError(f"{tpath}: expected an object")
            coef = _schema_get(t, "coef", tpath, (int, float), lambda c: c >= 0)
            sub = _schema_get(t, "body", tpath, dict)
            terms.append((float(coef), _parse_body_node(sub, n, f"{tpath}.body")))
        return MinkowskiCombo(n=n, terms=tuple(terms))
    raise SchemaError(f"{path}.type: unknown body type {kind!r}")


def _parse_vector(val, dim, path):
    try:
        v = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}: expected a list of numbers") from None
    if v.shape != (dim,):
        raise SchemaError(f"{path}: expected {dim} coordinates")
    return v


def body_to_document(K):
    """Serialize a body back into its document form."""
    return {"n": K.n, "body": _body_node(K)}


def _body_node(K):
    if isinstance(K, Ball):
        node = {"type": "ball", "radius": K.radius}
        if np.any(K.center != 0.0):
            node["center"] = K.center.tolist()
        return node
    if isinstance(K, Ellipsoid):
        return {"type": "ellipsoid", "shape": K.shape.tolist()}
    if isinstance(K, Polytope):
        return {"type": "polytope", "vertices": K.vertices.tolist()}
    if isinstance(K, PerturbedBall):
        return {
            "type": "perturbed_ball",
            "terms": [{"eps": e, "fn": f.to_doc()} for e, f in K.terms],
        }
    if isinstance(K, MinkowskiCombo):
        return {
            "type": "minkowski",
            "terms": [{"coef": c, "body": _body_node(b)} for c, b in K.terms],
        }
    raise TypeError(f"cannot serialize {type(K).__name__}")
