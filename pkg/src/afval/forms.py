"""Quadratic/linear polynomials on symmetric forms over R + C^{n-1}.

Matrices are indexed by the adapted labels (1bar, 2, 2bar, ..., n, nbar),
written here as "1b", "2", "2b", ....  The degree-2 polynomial is linear in
the form, the degree-3 one quadratic; both carry the hyperbolicity machinery
used by the inequality drivers.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import ConeViolation, UnsupportedDimension
from .util import unit_ball_volume

SYM_TOL = 1e-12
_LABEL_RE = re.compile(r"^(\d+)(b?)$")


def label_position(label, n):
    """Map an adapted index label ("1b", "2", "2b", ...) to a matrix position."""
    if isinstance(label, (int, np.integer)):
        pos = int(label)
        if not 0 <= pos < 2 * n - 1:
            raise ValueError(f"index position {pos} out of range")
        return pos
    m = _LABEL_RE.match(str(label))
    if not m:
        raise ValueError(f"bad index label {label!r}")
    i, barred = int(m.group(1)), bool(m.group(2))
    if i == 1:
        if not barred:
            raise ValueError("label '1' does not exist; the first slot is '1b'")
        return 0
    if not 2 <= i <= n:
        raise ValueError(f"label {label!r} out of range for n={n}")
    return 2 * i - 3 if not barred else 2 * i - 2


@dataclass(frozen=True, eq=False)
class SymForm:
    """Symmetric bilinear form on R + C^{n-1} in the adapted label order."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        d = 2 * self.n - 1
        if entries.shape != (d, d):
            raise ValueError(f"expected a {d}x{d} matrix for n={self.n}")
        if np.max(np.abs(entries - entries.T)) > SYM_TOL:
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "entries", 0.5 * (entries + entries.T))

    @classmethod
    def identity(cls, n):
        return cls(n, np.eye(2 * n - 1))


@dataclass(frozen=True)
class ValuationCoeffs:
    """Coefficients (c0, c1) of a degree-2 or degree-3 unitary valuation."""

    degree: int
    c0: float
    c1: float
    n: int

    def __post_init__(self):
        if self.degree not in (2, 3):
            raise ValueError("degree must be 2 or 3")
        if self.n < self.degree:
            raise UnsupportedDimension(f"need n >= {self.degree}")


def minor(A, rows, cols):
    """Determinant of the submatrix picked by row/column label lists."""
    rows = list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise ValueError("row and column lists must have equal length")
    if len(rows) > 3:
        raise ValueError("minors of order > 3 are not supported")
    rpos = [label_position(r, A.n) for r in rows]
    cpos = [label_position(c, A.n) for c in cols]
    if len(set(rpos)) != len(rpos) or len(set(cpos)) != len(cpos):
        raise ValueError("duplicate indices in minor")
    sub = A.entries[np.ix_(rpos, cpos)]
    return float(np.linalg.det(sub))


def _check_pair(coeffs, A):
    if coeffs.n != A.n:
        raise ValueError(f"dimension mismatch: coeffs n={coeffs.n}, form n={A.n}")


def p_mu(coeffs, A):
    """Evaluate the valuation polynomial on a symmetric form."""
    _check_pair(coeffs, A)
    return float(p_mu_batch(coeffs, A.entries[None])[0])


def p_mu_batch(coeffs, R):
    """Vectorized p over a stack of matrices with shape (..., d, d)."""
    R = np.asarray(R, dtype=float)
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    if coeffs.degree == 2:
        r00 = R[..., 0, 0]
        tr = np.trace(R, axis1=-2, axis2=-1)
        val = ((2 * n - 1) * c1 - 2 * (n - 1) * c0) * r00 + (2 * c0 - c1) * (tr - r00)
        return val / unit_ball_volume(2 * n - 2)

    r00 = R[..., 0, 0]
    tr = np.trace(R, axis1=-2, axis2=-1)
    # minors pairing the 1bar slot with every other slot
    s1 = r00 * (tr - r00) - np.sum(R[..., 0, 1:] ** 2, axis=-1)

    # 2x2 blocks over the complex pairs (i, ibar), i = 2..n
    m = n - 1
    blocks = R[..., 1:, 1:]
    blocks = blocks.reshape(R.shape[:-2] + (m, 2, m, 2))
    blocks = np.swapaxes(blocks, -3, -2)  # (..., m, m, 2, 2)

    dets = (
        blocks[..., 0, 0] * blocks[..., 1, 1] - blocks[..., 0, 1] * blocks[..., 1, 0]
    )  # (..., m, m): dets[i, j] = minor with rows (i, ibar), cols (j, jbar)
    diag_dets = np.diagonal(dets, axis1=-2, axis2=-1)
    s3 = np.sum(dets, axis=(-2, -1))
    off_dets = 0.5 * (s3 - np.sum(diag_dets, axis=-1))  # sum over i < j

    sigma = blocks[..., 0, 0] + blocks[..., 1, 1]
    sigma = np.diagonal(sigma, axis1=-2, axis2=-1)  # (..., m) pair traces
    cross_tt = 0.5 * (np.sum(sigma, axis=-1) ** 2 - np.sum(sigma**2, axis=-1))
    sq = np.sum(blocks**2, axis=(-2, -1))  # (..., m, m)
    diag_sq = np.diagonal(sq, axis1=-2, axis2=-1)
    cross_sq = 0.5 * (np.sum(sq, axis=(-2, -1)) - np.sum(diag_sq, axis=-1))
    s2 = cross_tt - cross_sq - 2.0 * off_dets

    val = (
        ((2 * n - 3) * c1 - 2 * (n - 2) * c0) * s1
        + (3 * c0 - 2 * c1) * s2
        + c1 * s3
    )
    return val / unit_ball_volume(2 * n - 3)


def p_mu_polarized(coeffs, A, X):
    """Symmetric bilinear polarization of the degree-3 polynomial."""
    if coeffs.degree != 3:
        raise ValueError("polarization only exists for degree 3")
    _check_pair(coeffs, A)
    _check_pair(coeffs, X)
    return float(p_mu_pol_batch(coeffs, A.entries[None], X.entries[None])[0])


def p_mu_pol_batch(coeffs, R1, R2):
    """Vectorized polarization; exact for the quadratic p up to rounding."""
    if coeffs.degree != 3:
        raise ValueError("polarization only exists for degree 3")
    return 0.5 * (
        p_mu_batch(coeffs, np.asarray(R1) + np.asarray(R2))
        - p_mu_batch(coeffs, R1)
        - p_mu_batch(coeffs, R2)
    )


def hessian_q_eigenvalues(coeffs):
    """Eigenvalues (with multiplicities) of the reduced quadratic form.

    Returns ((-c1, n-1), (5c1-6c0, n-2), (-(2(n-2)c0+3c1), 1)).  The last
    value is the eigenvalue of the all-ones vector of the explicit block
    matrix; it agrees with direct diagonalization to rounding.
    """
    if coeffs.degree != 3:
        raise ValueError("the reduced quadratic form exists for degree 3 only")
    if coeffs.n < 3:
        raise UnsupportedDimension("need n >= 3")
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    return (
        (-c1, n - 1),
        (5 * c1 - 6 * c0, n - 2),
        (-(2 * (n - 2) * c0 + 3 * c1), 1),
    )


def hess_q_matrix(coeffs):
    """Explicit 2(n-1)-dimensional block matrix of the reduced quadratic form."""
    if coeffs.degree != 3:
        raise ValueError("degree must be 3")
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    a = -2.0 * (2 * (n - 2) * c0 - (n - 3) * c1) / (n - 1)
    b = c1 + a
    c = (3 * c0 - 2 * c1) + a
    d = 2 * (n - 1)
    H = np.full((d, d), c)
    for i in range(n - 1):
        H[2 * i, 2 * i] = a
        H[2 * i + 1, 2 * i + 1] = a
        H[2 * i, 2 * i + 1] = b
        H[2 * i + 1, 2 * i] = b
    return H


def in_hyperbolicity_range(coeffs):
    """(strict, closed) membership in the degree-appropriate coefficient cone."""
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    if coeffs.degree == 2:
        lhs1, rhs1 = 2 * (n - 1) * c0, (2 * n - 1) * c1
        lhs2, rhs2 = (4 * n + 1) * c1, 2 * (3 * n + 1) * c0
    else:
        lhs1, rhs1 = 2 * (n - 2) * c0, (2 * n - 3) * c1
        lhs2, rhs2 = 5 * c1, 6 * c0
    strict = lhs1 < rhs1 and lhs2 < rhs2
    closed = lhs1 <= rhs1 and lhs2 <= rhs2
    return strict, closed


def cone_conditions(coeffs):
    """Human-readable closed-cone conditions with their truth values."""
    n, c0, c1 = coeffs.n, coeffs.c0, coeffs.c1
    if coeffs.degree == 2:
        return [
            ("2(n-1)c0 <= (2n-1)c1", 2 * (n - 1) * c0 <= (2 * n - 1) * c1),
            ("(4n+1)c1 <= 2(3n+1)c0", (4 * n + 1) * c1 <= 2 * (3 * n + 1) * c0),
        ]
    return [
        (f"2(n-2)c0 <= (2n-3)c1", 2 * (n - 2) * c0 <= (2 * n - 3) * c1),
        ("5c1 <= 6c0", 5 * c1 <= 6 * c0),
    ]


def require_closed_cone(coeffs):
    for name, ok in cone_conditions(coeffs):
        if not ok:
            raise ConeViolation(f"coefficients violate the cone condition {name}")


def is_positive_definite(A, tol=1e-12):
    """Cholesky test with a small diagonal allowance."""
    M = A.entries if isinstance(A, SymForm) else np.asarray(A, dtype=float)
    scale = max(np.max(np.abs(M)), 1.0)
    try:
        np.linalg.cholesky(M)
        return True
    except np.linalg.LinAlgError:
        pass
    try:
        np.linalg.cholesky(M + tol * scale * np.eye(M.shape[0]))
        return True
    except np.linalg.LinAlgError:
        return False


@dataclass(frozen=True)
class GardingGap:
    gap: float
    lam: float
    residual: float
    proportional: bool


def garding_gap(coeffs, A, X, equality_tol=1e-8):
    """p(A,X)^2 - p(A)p(X) together with the best proportionality fit.

    The gap is nonnegative (up to rounding) whenever the coefficients lie in
    the closed cone and A is positive definite; it vanishes exactly on
    X = lambda * A.
    """
    if coeffs.degree != 3:
        raise ValueError("the quadratic gap exists for degree 3 only")
    _check_pair(coeffs, A)
    _check_pair(coeffs, X)
    if not is_positive_definite(A):
        raise ValueError("A must be positive definite")
    pax = p_mu_polarized(coeffs, A, X)
    pa = p_mu(coeffs, A)
    px = p_mu(coeffs, X)
    gap = pax * pax - pa * px
    denom = float(np.sum(A.entries * A.entries))
    lam = float(np.sum(X.entries * A.entries)) / denom
    residual = float(np.max(np.abs(X.entries - lam * A.entries)))
    return GardingGap(gap=gap, lam=lam, residual=residual, proportional=residual < equality_tol)


def find_garding_violation(coeffs, tries=2000, seed=0):
    """Search for X with p(I, X) = 0 but p(X) > 0 (out-of-cone witness).

    Returns (X, p_value) for the best witness found, or None when every probe
    keeps p(X) <= 0.  Candidates are random symmetric matrices projected onto
    the kernel of the linear map X -> p(I, X).
    """
    n = coeffs.n
    d = 2 * n - 1
    rng = np.random.default_rng(seed)
    I = SymForm.identity(n)
    # gradient of X -> p(I, X) in matrix form
    grad = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            E = np.zeros((d, d))
            E[i, j] = E[j, i] = 1.0
            grad[i, j] = grad[j, i] = p_mu_polarized(coeffs, I, SymForm(n, E))
    gnorm2 = float(np.sum(grad * grad))
    best = None
    for _ in range(tries):
        X = rng.standard_normal((d, d))
        X = 0.5 * (X + X.T)
        X -= grad * (np.sum(grad * X) / gnorm2)
        val = p_mu(coeffs, SymForm(n, X))
        if val > 1e-10 and (best is None or val > best[1]):
            best = (X, val)
    return best
