"""Experiment drivers checking the quadratic, Brunn-Minkowski-type, and
isoperimetric inequalities, their thresholds, and the known counterexample.

Every driver returns an InequalityReport whose verdict is three-valued:
Monte Carlo noise inside the tolerance band is reported as "inconclusive",
never as a violation.
"""

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bodies import PerturbedBall, as_sphere_function, ball, minkowski
from .errors import ConeViolation
from .forms import require_closed_cone
from .harmonics import dmu_eigenvalue, h11_basis, hermitian_cross_term
from .operators import grid_values, valuation_operator_route
from .util import fmt17, sphere_volume
from .valuations import (
    UnitaryValuation,
    eval_grassmannian,
    phi_valuation,
    psi_valuation,
)


@dataclass
class InequalityReport:
    name: str
    params: dict
    lhs: float
    rhs: float
    gap: float
    se: float
    tolerance: float
    verdict: str
    runtime: float = 0.0
    extras: dict = field(default_factory=dict)

    def to_dict(self, include_runtime=False):
        out = {
            "name": self.name,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "se": self.se,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "extras": self.extras,
        }
        if include_runtime:
            out["runtime"] = self.runtime
        return out

    def csv_row(self):
        return [
            self.name,
            json.dumps(self.params, sort_keys=True),
            fmt17(self.lhs),
            fmt17(self.rhs),
            fmt17(self.gap),
            fmt17(self.se),
            self.verdict,
        ]


CSV_HEADER = ["name", "params", "lhs", "rhs", "gap", "se", "verdict"]


def reports_to_csv(reports):
    lines = [",".join(CSV_HEADER)]
    for r in reports:
        lines.append(",".join('"' + c.replace('"', '""') + '"' if "," in c else c for c in r.csv_row()))
    return "\n".join(lines) + "\n"


def _verdict(gap, tol):
    if gap < -tol:
        return "violated"
    if gap <= tol:
        return "inconclusive"
    return "holds"


def _report(name, params, lhs, rhs, se, tol, t0, extras=None):
    gap = lhs - rhs
    return InequalityReport(
        name=name,
        params=params,
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        se=se,
        tolerance=tol,
        verdict=_verdict(gap, tol),
        runtime=time.perf_counter() - t0,
        extras=extras or {},
    )


def _quad_tol(grid):
    return grid.quad_tol


# ---------------------------------------------------------------------------
# Aleksandrov-Fenchel


def af_check(valuation, slots, grid):
    """Quadratic inequality mu(f,L[,M])^2 >= mu(f,f[,M]) mu(L,L[,M]).

    The first slot must be a difference of support functions; the valuation
    must lie in the closed coefficient cone, otherwise the check refuses.
    """
    t0 = time.perf_counter()
    coeffs = valuation.coeffs
    require_closed_cone(coeffs)
    slots = list(slots)
    if len(slots) != coeffs.degree:
        raise ValueError(f"need {coeffs.degree} slots")
    f = as_sphere_function(slots[0])
    if not f.is_difference_of_supports:
        raise ValueError("first slot must be a difference of support functions")
    rest = slots[1:]
    if coeffs.degree == 2:
        (L,) = rest
        v_fl, s1 = valuation_operator_route(coeffs, [f, L], grid)
        v_ff, s2 = valuation_operator_route(coeffs, [f, f], grid)
        v_ll, s3 = valuation_operator_route(coeffs, [L, L], grid)
    else:
        L, M = rest
        v_fl, s1 = valuation_operator_route(coeffs, [f, L, M], grid)
        v_ff, s2 = valuation_operator_route(coeffs, [f, f, M], grid)
        v_ll, s3 = valuation_operator_route(coeffs, [L, L, M], grid)
    lhs = v_fl * v_fl
    rhs = v_ff * v_ll
    se = math.sqrt((2 * v_fl * s1) ** 2 + (v_ll * s2) ** 2 + (v_ff * s3) ** 2)
    q = _quad_tol(grid)
    tol = 3 * se + q * (2 * abs(v_fl) + abs(v_ll) + abs(v_ff) + q)
    extras = {"mu_fL": v_fl, "mu_ff": v_ff, "mu_LL": v_ll}
    if coeffs.degree == 2 and valuation.cos2theta is not None:
        thr = (coeffs.n + 1) / (2 * coeffs.n)
        if abs(valuation.cos2theta - thr) < 1e-9 and abs(v_ll) > 10 * tol:
            lam = v_fl / v_ll
            extras["h1_h11_projection"] = projection_fraction_h1_h11(
                lambda U: f.value(U) - lam * as_sphere_function(rest[0]).value(U),
                grid,
                coeffs.n,
            )
    return _report("af", _params(valuation), lhs, rhs, se, tol, t0, extras)


def _params(valuation, **kw):
    p = {"degree": valuation.degree, "n": valuation.n, "family": valuation.family}
    if valuation.cos2theta is not None:
        p["cos2theta"] = valuation.cos2theta
    else:
        p["c0"] = valuation.coeffs.c0
        p["c1"] = valuation.coeffs.c1
    p.update(kw)
    return p


def projection_fraction_h1_h11(residual_values, grid, n):
    """Fraction of the L^2 mass of a function lying in H_1 + H_{1,1}.

    The subspace probe is a grid Gram-Schmidt over coordinate functionals
    and a spanning family of bi-degree (1,1) harmonics; it reports the
    projection, it does not certify completeness.
    """
    vals = residual_values(grid.nodes) if callable(residual_values) else residual_values
    sqrtw = np.sqrt(grid.weights)
    cols = [grid.nodes[:, i] for i in range(2 * n)]
    cols += [fn.value(grid.nodes) for fn in h11_basis(n)]
    A = np.stack(cols, axis=1) * sqrtw[:, None]
    Q, _ = np.linalg.qr(A)
    v = vals * sqrtw
    proj = Q.T @ v
    denom = float(v @ v)
    if denom == 0.0:
        return 1.0
    return float(proj @ proj) / denom


# ---------------------------------------------------------------------------
# counterexample at large Kahler angle cosine


def counterexample_gap(n, cos2theta, eps, grid):
    """Gap of the quadratic inequality for the standard perturbed pair."""
    f = hermitian_cross_term(1, 2, n, "re")
    K = PerturbedBall(n=n, terms=((eps, f),))
    L = ball(n)
    coeffs = phi_valuation(cos2theta, n).coeffs
    v_kl, s1 = valuation_operator_route(coeffs, [K, L], grid)
    v_kk, s2 = valuation_operator_route(coeffs, [K, K], grid)
    v_ll, s3 = valuation_operator_route(coeffs, [L, L], grid)
    lhs = v_kl * v_kl
    rhs = v_kk * v_ll
    se = math.sqrt((2 * v_kl * s1) ** 2 + (v_ll * s2) ** 2 + (v_kk * s3) ** 2)
    return lhs, rhs, se


def counterexample_run(n, cos2theta, eps, grid):
    """Perturbed-ball pair violating the quadratic inequality above threshold."""
    t0 = time.perf_counter()
    thr = (n + 1) / (2 * n)
    if cos2theta < thr - 1e-12:
        raise ValueError(f"need cos2theta >= {thr} to enter the violating regime")
    if not 0.0 <= cos2theta <= 1.0:
        raise ValueError("cos2theta must lie in [0, 1]")
    lhs, rhs, se = counterexample_gap(n, cos2theta, eps, grid)
    q = _quad_tol(grid)
    tol = 3 * se + q * (2 * math.sqrt(lhs) + lhs + rhs + q)
    coeffs = phi_valuation(cos2theta, n).coeffs
    lam11 = dmu_eigenvalue(coeffs, 1, 1)
    int_f2 = 2.0 * sphere_volume(n) / (2 * n * (2 * n + 2))
    mu_bb = math.pi * (2 * (n - 1) * coeffs.c0 + coeffs.c1)
    extras = {
        "predicted_gap": -0.5 * eps**2 * lam11 * int_f2 * mu_bb,
        "lambda_11": lam11,
        "epsilon": eps,
    }
    params = {"n": n, "cos2theta": cos2theta, "eps": eps, "family": "phi_theta"}
    return _report("counterexample", params, lhs, rhs, se, tol, t0, extras)


def threshold_bracket(n, eps, grid, width=1e-3):
    """Bracket the sign change of the counterexample gap in cos^2(theta)."""
    thr = (n + 1) / (2 * n)
    lo, hi = thr - 0.05, thr + 0.05

    def gap(u):
        lhs, rhs, _ = counterexample_gap(n, u, eps, grid)
        return lhs - rhs

    glo, ghi = gap(lo), gap(hi)
    if not (glo > 0 > ghi):
        raise RuntimeError("initial bracket does not straddle the sign change")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if gap(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# Brunn-Minkowski


def bm_check(valuation, m, bodies, grid):
    """Concavity of the m-th root along Minkowski interpolation.

    bodies = (K0, K1, spectators...) with len(spectators) = degree - m.
    """
    t0 = time.perf_counter()
    coeffs = valuation.coeffs
    require_closed_cone(coeffs)
    if m not in (2, 3) or m > coeffs.degree:
        raise ValueError("m must be 2 or 3 and at most the degree")
    bodies = list(bodies)
    K0, K1 = bodies[0], bodies[1]
    spect = bodies[2:]
    if len(spect) != coeffs.degree - m:
        raise ValueError(f"need {coeffs.degree - m} spectator bodies")
    Ksum = minkowski([(1.0, K0), (1.0, K1)])

    def val(K):
        return valuation_operator_route(coeffs, [K] * m + spect, grid)

    v_sum, s_sum = val(Ksum)
    v0, s0 = val(K0)
    v1, s1 = val(K1)
    for v in (v_sum, v0, v1):
        if v < 0:
            raise ValueError("negative valuation value; bodies outside the regime")
    lhs = v_sum ** (1.0 / m)
    rhs = v0 ** (1.0 / m) + v1 ** (1.0 / m)

    def droot(v, s):
        return (v ** (1.0 / m - 1.0) / m) * s if v > 0 else float("inf")

    se = math.sqrt(droot(v_sum, s_sum) ** 2 + droot(v0, s0) ** 2 + droot(v1, s1) ** 2)
    q = _quad_tol(grid)
    qtol = sum(droot(v, q) for v in (v_sum, v0, v1) if v > 0)
    tol = 3 * se + qtol
    params = _params(valuation, m=m)
    return _report("bm", params, lhs, rhs, se, tol, t0)


# ---------------------------------------------------------------------------
# isoperimetric chain


def _mean_width_mc(K, samples, seed):
    rng = np.random.default_rng(seed)
    half = (samples + 1) // 2
    g = rng.standard_normal((half, 2 * K.n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    w = K.support_batch(g) + K.support_batch(-g)
    est = float(np.mean(w))
    se = float(np.std(w, ddof=1) / np.sqrt(half)) if half > 1 else 0.0
    return est, se


def iso_check(cos2theta, K, samples, seed):
    """The two isoperimetric inequalities along the projection-average chain.

    Returns (width-vs-area report, area-vs-volume report); needs n >= 3 for
    the second.  All values go through the Grassmannian route, so K may be
    any convex body.
    """
    n = K.n
    if n < 3:
        raise ValueError("the isoperimetric pair needs n >= 3")
    if not 0.0 <= cos2theta <= (n + 1) / (2 * n) + 1e-12:
        raise ValueError("first inequality needs cos2theta within its window")
    if cos2theta > 3 * (n + 1) / (5 * n - 1) + 1e-12:
        raise ValueError("second inequality needs cos2theta within its window")

    t0 = time.perf_counter()
    mw, mw_se = _mean_width_mc(K, samples, seed)
    phi_t, phi_t_se = eval_grassmannian("phi", cos2theta, K, samples, seed + 1)
    lhs1 = mw * mw
    rhs1 = (4.0 / math.pi) * phi_t
    se1 = math.sqrt((2 * mw * mw_se) ** 2 + ((4.0 / math.pi) * phi_t_se) ** 2)
    rep1 = _report(
        "iso_width_area",
        {"n": n, "cos2theta": cos2theta, "samples": samples, "seed": seed},
        lhs1,
        rhs1,
        se1,
        3 * se1 + 1e-9,
        t0,
        {"in_stated_theta_range": cos2theta <= 0.5},
    )

    t0 = time.perf_counter()
    u_prime = cos2theta / 3.0
    phi_p, phi_p_se = eval_grassmannian("phi", u_prime, K, samples, seed + 2)
    psi_t, psi_t_se = eval_grassmannian("psi", cos2theta, K, samples, seed + 3)
    lhs2 = phi_p**3
    rhs2 = (9.0 * math.pi / 16.0) * psi_t**2
    se2 = math.sqrt(
        (3 * phi_p**2 * phi_p_se) ** 2
        + ((9.0 * math.pi / 16.0) * 2 * psi_t * psi_t_se) ** 2
    )
    rep2 = _report(
        "iso_area_volume",
        {"n": n, "cos2theta": cos2theta, "samples": samples, "seed": seed},
        lhs2,
        rhs2,
        se2,
        3 * se2 + 1e-9,
        t0,
    )
    return rep1, rep2


# ---------------------------------------------------------------------------
# degree-3 to degree-2 reduction and quermass products


def mu_der_check(cos2theta, K, grid):
    """Identity: the 3-plane family against (K, K, ball) equals 4/3 of the
    2-plane family at the reduced angle cos^2(theta') = cos^2(theta)/3."""
    t0 = time.perf_counter()
    n = K.n
    if n < 3:
        raise ValueError("needs n >= 3")
    psi = psi_valuation(cos2theta, n)
    phi = phi_valuation(cos2theta / 3.0, n)
    B = ball(n)
    lhs, s1 = valuation_operator_route(psi.coeffs, [K, K, B], grid)
    v_phi, s2 = valuation_operator_route(phi.coeffs, [K, K], grid)
    rhs = (4.0 / 3.0) * v_phi
    se = math.sqrt(s1**2 + ((4.0 / 3.0) * s2) ** 2)
    tol = 3 * se + 2 * _quad_tol(grid) + 1e-9
    params = {"n": n, "cos2theta": cos2theta, "identity": "psi(K,K,B) = 4/3 phi'(K)"}
    rep = _report("mu_der", params, lhs, rhs, se, tol, t0)
    rep.verdict = "holds" if abs(rep.gap) <= tol else "violated"
    return rep


def muquer_check(valuation, K, grid):
    """Product inequalities mu(K,B,B)^3 >= mu(B)^2 mu(K) and
    mu(K,K,B)^3 >= mu(B) mu(K)^2 for the 3-plane family."""
    t0 = time.perf_counter()
    coeffs = valuation.coeffs
    if coeffs.degree != 3:
        raise ValueError("quermass products are for degree 3")
    require_closed_cone(coeffs)
    B = ball(coeffs.n)
    v_kbb, s1 = valuation_operator_route(coeffs, [K, B, B], grid)
    v_kkb, s2 = valuation_operator_route(coeffs, [K, K, B], grid)
    v_k, s3 = valuation_operator_route(coeffs, [K, K, K], grid)
    v_b, s4 = valuation_operator_route(coeffs, [B, B, B], grid)

    lhs1, rhs1 = v_kbb**3, v_b**2 * v_k
    se1 = math.sqrt(
        (3 * v_kbb**2 * s1) ** 2 + (2 * v_b * v_k * s4) ** 2 + (v_b**2 * s3) ** 2
    )
    q = _quad_tol(grid)
    tol1 = 3 * se1 + q * (3 * v_kbb**2 + 2 * abs(v_b * v_k) + v_b**2) + 1e-9
    rep1 = _report("muquer_KBB", _params(valuation), lhs1, rhs1, se1, tol1, t0)

    t0 = time.perf_counter()
    lhs2, rhs2 = v_kkb**3, v_b * v_k**2
    se2 = math.sqrt(
        (3 * v_kkb**2 * s2) ** 2 + (v_k**2 * s4) ** 2 + (2 * v_b * v_k * s3) ** 2
    )
    tol2 = 3 * se2 + q * (3 * v_kkb**2 + v_k**2 + 2 * abs(v_b * v_k)) + 1e-9
    rep2 = _report("muquer_KKB", _params(valuation), lhs2, rhs2, se2, tol2, t0)
    return rep1, rep2
