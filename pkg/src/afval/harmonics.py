"""Bi-degree spherical harmonics on the unit sphere of C^n.

Each harmonic is the restriction of a harmonic polynomial built from a single
complex linear form z = <w, e>_C: the zonal function of bi-degree (k, l) is
z^{k-l} Q_l(k-l, n-2, |z|^2) for k >= l, normalized to 1 at the pole.  Every
function carries its polynomial extension with analytic gradient and Hessian,
plus closed-form eigenvalues of the sphere Laplacian and of the squared Hopf
derivative, so the differential-operator identities can be tested both ways.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bodies import SphereFunction
from .errors import SchemaError
from .util import complex_to_real, real_to_complex, unit_ball_volume


def jacobi_classical(l, alpha, beta, x):
    """Classical Jacobi polynomial P_l^(alpha, beta) by three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if l == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = (alpha + 1) + (alpha + beta + 2) * (x - 1) / 2
    for m in range(2, l + 1):
        a1 = 2 * m * (m + alpha + beta) * (2 * m + alpha + beta - 2)
        a2 = (2 * m + alpha + beta - 1) * (alpha**2 - beta**2)
        a3 = (2 * m + alpha + beta - 1) * (2 * m + alpha + beta) * (2 * m + alpha + beta - 2)
        a4 = 2 * (m + alpha - 1) * (m + beta - 1) * (2 * m + alpha + beta)
        p, p_prev = ((a2 + a3 * x) * p - a4 * p_prev) / a1, p
    return p


def jacobi_Q(l, a, b, t):
    """Degree-l polynomial orthogonal on [0,1] with weight t^a (1-t)^b, Q(1) = 1."""
    if l < 0 or a < 0 or b < 0:
        raise ValueError("need l, a, b >= 0")
    t = np.asarray(t, dtype=float)
    return jacobi_classical(l, b, a, 2.0 * t - 1.0) / math.comb(l + b, l)


def jacobi_Q_coeffs(l, a, b):
    """Monomial coefficients (q_0, ..., q_l) of Q_l in t."""
    # evaluate on l+1 Chebyshev-ish nodes and solve the Vandermonde system
    ts = np.linspace(0.0, 1.0, l + 1) if l > 0 else np.array([1.0])
    vals = jacobi_Q(l, a, b, ts)
    V = np.vander(ts, l + 1, increasing=True)
    return np.linalg.solve(V, vals)


# ---------------------------------------------------------------------------
# closed-form spectra


def laplace_eigenvalue(k, l, n):
    """Sphere-Laplacian eigenvalue on bi-degree (k, l): -(k+l)(k+l+2n-2)."""
    m = k + l
    return float(-m * (m + 2 * n - 2))


def jn_eigenvalue(k, l):
    """Eigenvalue of the squared Hopf-field derivative: -(k-l)^2."""
    return float(-((k - l) ** 2))


def dmu_eigenvalue(coeffs, k, l):
    """Degree-2 operator eigenvalue on bi-degree (k, l), in closed form.

    Written as [alpha (1 - j^2) - beta ((m+n-1)^2 - n^2)] / omega so that the
    kernel on linear functionals is exact in floating point.
    """
    if coeffs.degree != 2:
        raise ValueError("degree-2 coefficients required")
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    alpha = 2 * n * (c1 - c0)
    beta = 2 * c0 - c1
    return _eigen_from_ab(alpha, beta, n, k, l) / unit_ball_volume(2 * n - 2)


def dmuB_eigenvalue(coeffs, k, l):
    """Degree-3 ball-operator eigenvalue on bi-degree (k, l)."""
    if coeffs.degree != 3:
        raise ValueError("degree-3 coefficients required")
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    a = (n - 1) * ((2 * n - 3) * c1 - 2 * (n - 2) * c0)
    b = 2 * (n - 2) * c0 - (n - 3) * c1
    return _eigen_from_ab(a - b, b, n, k, l) / unit_ball_volume(2 * n - 3)


def _eigen_from_ab(alpha, beta, n, k, l):
    m = k + l
    j = abs(k - l)
    return alpha * (1 - j * j) - beta * ((m + n - 1) ** 2 - n * n)


def spectrum_window(coeffs):
    """Whether the operator spectrum has its sign pattern: one positive
    eigenvalue on constants, kernel on linear functionals, negative beyond."""
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    if coeffs.degree == 2:
        return (
            2 * (n - 1) * c0 <= (2 * n - 1) * c1
            and (4 * n + 1) * c1 < 2 * (3 * n + 1) * c0
        )
    return (
        2 * (n - 2) * c0 <= (2 * n - 3) * c1
        and (4 * n * n - 9 * n - 3) * c1 < 2 * (3 * n * n - 5 * n - 2) * c0
    )


# ---------------------------------------------------------------------------
# polynomial machinery

# A harmonic here is Re or Im of  sum_j q_j z^{p+j} zbar^j s^{l-j}  with
# z = <w, e>_C, s = |w|^2, p = k - l >= 0.  Terms are (coef, zpow, zbarpow, spow).


def _term_data(points, e_complex, terms):
    """Value, gradient, Hessian of the complex polynomial at general points."""
    X = np.asarray(points, dtype=float)
    M, dim = X.shape
    wc = real_to_complex(X)
    z = wc @ e_complex.conj()
    s = np.einsum("mi,mi->m", X, X)

    avec = np.empty(dim, dtype=complex)
    avec[0::2] = e_complex.conj()
    avec[1::2] = 1j * e_complex.conj()
    abar = avec.conj()

    val = np.zeros(M, dtype=complex)
    grad = np.zeros((M, dim), dtype=complex)
    hess = np.zeros((M, dim, dim), dtype=complex)

    aa = np.outer(avec, avec)
    ab = np.outer(avec, abar) + np.outer(abar, avec)
    bb = np.outer(abar, abar)
    eye = np.eye(dim)

    def pw(base, p):
        return base**p if p > 0 else np.ones_like(base)

    for coef, za, zb, sp in terms:
        f_z = pw(z, za)
        f_zb = pw(z.conj(), zb)
        f_s = pw(s, sp)
        val += coef * f_z * f_zb * f_s

        g_z = za * pw(z, za - 1) * f_zb * f_s if za > 0 else 0.0
        g_zb = zb * f_z * pw(z.conj(), zb - 1) * f_s if zb > 0 else 0.0
        g_s = sp * f_z * f_zb * pw(s, sp - 1) if sp > 0 else 0.0
        if za > 0:
            grad += coef * g_z[:, None] * avec
        if zb > 0:
            grad += coef * g_zb[:, None] * abar
        if sp > 0:
            grad += coef * (2.0 * g_s)[:, None] * X

        if za > 1:
            hess += coef * (za * (za - 1) * pw(z, za - 2) * f_zb * f_s)[:, None, None] * aa
        if za > 0 and zb > 0:
            hess += coef * (za * zb * pw(z, za - 1) * pw(z.conj(), zb - 1) * f_s)[
                :, None, None
            ] * ab
        if zb > 1:
            hess += coef * (zb * (zb - 1) * f_z * pw(z.conj(), zb - 2) * f_s)[
                :, None, None
            ] * bb
        if sp > 0:
            if za > 0:
                c2 = (2.0 * sp * za * pw(z, za - 1) * f_zb * pw(s, sp - 1))[:, None, None]
                hess += coef * c2 * (
                    avec[None, :, None] * X[:, None, :] + X[:, :, None] * avec[None, None, :]
                )
            if zb > 0:
                c2 = (2.0 * sp * zb * f_z * pw(z.conj(), zb - 1) * pw(s, sp - 1))[
                    :, None, None
                ]
                hess += coef * c2 * (
                    abar[None, :, None] * X[:, None, :] + X[:, :, None] * abar[None, None, :]
                )
            c3 = f_z * f_zb
            hess += coef * (2.0 * sp * c3 * pw(s, sp - 1))[:, None, None] * eye
            if sp > 1:
                hess += coef * (4.0 * sp * (sp - 1) * c3 * pw(s, sp - 2))[
                    :, None, None
                ] * (X[:, :, None] * X[:, None, :])
    return val, grad, hess


@dataclass(frozen=True, eq=False)
class BiDegreeHarmonic(SphereFunction):
    """Re/Im part of the zonal bi-degree (k, l) harmonic with pole e."""

    k: int
    l: int
    n: int
    pole: np.ndarray  # real 2n vector or complex n vector
    part: str = "re"

    is_difference_of_supports = True  # C^2, hence a difference of supports
    has_spectral = True

    def __post_init__(self):
        if self.part not in ("re", "im"):
            raise ValueError("part must be 're' or 'im'")
        if self.k < 0 or self.l < 0 or self.n < 2:
            raise ValueError("need k, l >= 0 and n >= 2")
        pole = np.asarray(self.pole)
        ec = pole if np.iscomplexobj(pole) else real_to_complex(pole.astype(float))
        nrm = np.linalg.norm(ec)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError("pole must be a unit vector")
        object.__setattr__(self, "pole", ec / nrm)
        kk, ll = max(self.k, self.l), min(self.k, self.l)
        conj = self.l > self.k
        q = jacobi_Q_coeffs(ll, kk - ll, self.n - 2)
        terms = tuple(
            (qj, kk - ll + j, j, ll - j) for j, qj in enumerate(q) if qj != 0.0
        )
        object.__setattr__(self, "_terms", terms)
        object.__setattr__(self, "_conj", conj)

    @property
    def dim(self):
        return 2 * self.n

    @property
    def total_degree(self):
        return self.k + self.l

    def _complex_data(self, X, need=3):
        val, grad, hess = _term_data(np.atleast_2d(X), self.pole, self._terms)
        if self._conj:
            val, grad, hess = val.conj(), grad.conj(), hess.conj()
        return val, grad, hess

    def value(self, U):
        U = np.asarray(U, dtype=float)
        flat = U.reshape(-1, U.shape[-1])
        val, _, _ = self._complex_data(flat)
        out = val.real if self.part == "re" else val.imag
        return out.reshape(U.shape[:-1])

    def ext_value(self, X):
        X = np.asarray(X, dtype=float)
        flat = X.reshape(-1, X.shape[-1])
        r2 = np.einsum("mi,mi->m", flat, flat)
        val, _, _ = self._complex_data(flat)
        out = val.real if self.part == "re" else val.imag
        out = out * r2 ** (0.5 * (1 - self.total_degree))
        return out.reshape(X.shape[:-1])

    def ext_grad(self, X):
        return self._ext_derivs(X)[0]

    def ext_hess(self, X):
        return self._ext_derivs(X)[1]

    def _ext_derivs(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        val, grad, hess = self._complex_data(X)
        if self.part == "re":
            val, grad, hess = val.real, grad.real, hess.real
        else:
            val, grad, hess = val.imag, grad.imag, hess.imag
        m = self.total_degree
        r2 = np.einsum("mi,mi->m", X, X)
        rho = r2 ** (0.5 * (1 - m))
        drho = (1 - m) * r2 ** (0.5 * (-1 - m))
        g = rho[:, None] * grad + drho[:, None] * val[:, None] * X
        h = (
            rho[:, None, None] * hess
            + drho[:, None, None]
            * (
                X[:, :, None] * grad[:, None, :]
                + grad[:, :, None] * X[:, None, :]
                + val[:, None, None] * np.eye(X.shape[1])
            )
            + ((1 - m) * (-1 - m) * r2 ** (0.5 * (-3 - m)) * val)[:, None, None]
            * (X[:, :, None] * X[:, None, :])
        )
        return g, h

    def laplacian(self, U):
        return laplace_eigenvalue(self.k, self.l, self.n) * self.value(U)

    def jnjn(self, U):
        return jn_eigenvalue(self.k, self.l) * self.value(U)

    def to_doc(self):
        return {
            "kind": "spherical",
            "k": self.k,
            "l": self.l,
            "part": self.part,
            "pole": complex_to_real(self.pole).tolist(),
        }


class HarmonicSum(SphereFunction):
    """Linear combination of harmonics; spectral data stays analytic per term."""

    is_difference_of_supports = True
    has_spectral = True

    def __init__(self, terms, doc=None):
        self.terms = [(float(c), h) for c, h in terms]
        self.dim = self.terms[0][1].dim
        self._doc = doc

    def _sum(self, method, X):
        out = None
        for c, h in self.terms:
            v = c * getattr(h, method)(X)
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

    def laplacian(self, U):
        return self._sum("laplacian", U)

    def jnjn(self, U):
        return self._sum("jnjn", U)

    def to_doc(self):
        if self._doc is not None:
            return self._doc
        return {
            "kind": "sum",
            "terms": [{"coef": c, "fn": h.to_doc()} for c, h in self.terms],
        }


def spherical_function(k, l, n, e=None, part="re"):
    """Zonal harmonic of bi-degree (k, l) with pole e (default the x1-axis)."""
    if e is None:
        e = np.zeros(2 * n)
        e[0] = 1.0
    return BiDegreeHarmonic(k=k, l=l, n=n, pole=np.asarray(e), part=part)


def hermitian_cross_term(i, j, n, part="re"):
    """Re or Im of z_i zbar_j on the sphere (a bi-degree (1,1) harmonic).

    Expressed exactly as a difference of two zonal (1,1) harmonics with
    rotated poles.
    """
    if not (1 <= i <= n and 1 <= j <= n and i != j):
        raise ValueError("need distinct 1-based complex coordinates")
    ei = np.zeros(n, dtype=complex)
    ej = np.zeros(n, dtype=complex)
    ei[i - 1] = 1.0
    ej[j - 1] = 1.0
    second = ej if part == "re" else 1j * ej
    plus = (ei + second) / np.sqrt(2.0)
    minus = (ei - second) / np.sqrt(2.0)
    c = (n - 1) / (2.0 * n)
    sign = 1.0 if part == "re" else -1.0
    doc = {"kind": "cross", "i": i, "j": j, "part": part}
    return HarmonicSum(
        [
            (sign * c, BiDegreeHarmonic(k=1, l=1, n=n, pole=plus, part="re")),
            (-sign * c, BiDegreeHarmonic(k=1, l=1, n=n, pole=minus, part="re")),
        ],
        doc=doc,
    )


def h11_basis(n):
    """Spanning family for the bi-degree (1,1) harmonics (dimension n^2 - 1)."""
    fns = []
    for i in range(1, n):
        e = np.zeros(2 * n)
        e[2 * (i - 1)] = 1.0
        fns.append(spherical_function(1, 1, n, e))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            fns.append(hermitian_cross_term(i, j, n, "re"))
            fns.append(hermitian_cross_term(i, j, n, "im"))
    return fns


def fn_from_doc(doc, n, path="fn"):
    """Deserialize a sphere-function document."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError(f"{path}: expected an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "spherical":
            pole = doc.get("pole")
            part = doc.get("part", "re")
            return spherical_function(
                int(doc["k"]), int(doc["l"]), n,
                None if pole is None else np.asarray(pole, dtype=float), part,
            )
        if kind == "cross":
            return hermitian_cross_term(int(doc["i"]), int(doc["j"]), n, doc.get("part", "re"))
        if kind == "sum":
            terms = [
                (float(t["coef"]), fn_from_doc(t["fn"], n, f"{path}.terms[{i}].fn"))
                for i, t in enumerate(doc["terms"])
            ]
            return HarmonicSum(terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from None
    raise SchemaError(f"{path}.kind: unknown function kind {kind!r}")
