"""Numerical verification harness: Jacobi transformation laws, the Vigneras
equation at theta arguments, and the running-example quadrature oracle.

Every check compares two independently computed sides and reports the
maximum componentwise error against a tolerance tied to the reported
truncation tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .cone import SignPolynomial
from .errors import ToleranceNotMet
from .gerf import QuadratureConfig, DEFAULT_CFG, sgn_hat_cone, vigneras_residual
from .quadspace import Lattice
from .theta import JacobiPoint, ThetaValue, TruncationPolicy, theta_hat
from .weil import WeilRep, apply as weil_apply, build_weil


@dataclass(frozen=True)
class CheckReport:
    name: str
    max_abs_error: float
    tolerance: float
    details: tuple = ()

    @property
    def passed(self) -> bool:
        return self.max_abs_error <= self.tolerance

    def to_json_dict(self) -> dict:
        return {"name": self.name, "max_abs_error": self.max_abs_error,
                "tolerance": self.tolerance, "passed": bool(self.passed),
                "details": [str(d) for d in self.details]}


def _tolerance(*values: ThetaValue, floor: float = 1e-6) -> float:
    """max(floor, 10 * sum of reported truncation tails)."""
    return max(floor, 10.0 * sum(v.tail_estimate for v in values))


def check_T(lattice: Lattice, poly: SignPolynomial, pt: JacobiPoint,
            policy: TruncationPolicy = TruncationPolicy(),
            rep: WeilRep | None = None) -> CheckReport:
    """theta(tau + 1, z) against rho(T) theta(tau, z), componentwise.

    Exact for even lattices; for odd lattices (half-integral norms) the
    translation twists each term by (-1)^{2 q(l)}, which no diagonal action
    on the discriminant group reproduces, so the residual is structural.
    """
    rep = rep or build_weil(lattice)
    lhs_pt = JacobiPoint.make(pt.tau + 1.0, pt.z)
    base = theta_hat(lattice, poly, pt, policy)
    lhs = theta_hat(lattice, poly, lhs_pt, policy)
    rhs = weil_apply(rep, "T", base.components)
    err = float(np.max(np.abs(lhs.components - rhs)))
    return CheckReport("T", err, _tolerance(base, lhs),
                       (f"radius={base.radius}",))


def check_S(lattice: Lattice, poly: SignPolynomial, pt: JacobiPoint,
            policy: TruncationPolicy = TruncationPolicy(),
            rep: WeilRep | None = None) -> CheckReport:
    """theta(-1/tau, z/tau) against the weight-(d+ + d-)/2 S-image.

    The automorphy factor is (sqrt tau)^{2k} exp(2 pi i q(z)/tau) with the
    principal branch of the square root and 2k = d+ + d-.
    """
    rep = rep or build_weil(lattice)
    tau = pt.tau
    z = np.array(pt.z)
    s_pt = JacobiPoint.make(-1.0 / tau, tuple(z / tau))
    base = theta_hat(lattice, poly, pt, policy)
    lhs = theta_hat(lattice, poly, s_pt, policy)
    d = sum(lattice.space.signature)
    gram = lattice.space.gram_np
    qz = complex(0.5 * z @ gram @ z)
    factor = np.sqrt(tau) ** d * np.exp(2j * np.pi * qz / tau)
    rhs = factor * weil_apply(rep, "S", base.components)
    err = float(np.max(np.abs(lhs.components - rhs)))
    return CheckReport("S", err, _tolerance(base, lhs),
                       (f"radius={base.radius}", f"weight={d}/2"))


def check_elliptic(lattice: Lattice, poly: SignPolynomial, pt: JacobiPoint,
                   lam, mu, policy: TruncationPolicy = TruncationPolicy()
                   ) -> CheckReport:
    """theta(tau, z + lam*tau + mu) against the elliptic automorphy factor
    exp(-2 pi i (q(lam) tau + <z, lam>)) theta(tau, z), lam and mu in L."""
    lam = np.array([float(x) for x in lam])
    mu = np.array([float(x) for x in mu])
    tau = pt.tau
    z = np.array(pt.z)
    gram = lattice.space.gram_np
    shifted = JacobiPoint.make(tau, tuple(z + lam * tau + mu))
    base = theta_hat(lattice, poly, pt, policy)
    lhs = theta_hat(lattice, poly, shifted, policy)
    q_lam = 0.5 * lam @ gram @ lam
    factor = np.exp(-2j * np.pi * (q_lam * tau + complex(z @ gram @ lam)))
    rhs = factor * base.components
    err = float(np.max(np.abs(lhs.components - rhs)))
    return CheckReport("elliptic", err, _tolerance(base, lhs),
                       (f"lam={lam.tolist()}", f"mu={mu.tolist()}"))


def check_vigneras_theta(lattice: Lattice, poly: SignPolynomial,
                         pt: JacobiPoint,
                         policy: TruncationPolicy = TruncationPolicy(),
                         h: float = 1e-3, top_terms: int = 20,
                         tolerance: float = 1e-4) -> CheckReport:
    """Finite-difference Vigneras residual at the rescaled lattice arguments
    sqrt(y)(l + v/y) that dominate the truncated sum."""
    from .gerf import compile_cone_program
    from ._core.fallback import weight_value
    prog = compile_cone_program(poly)
    gram = lattice.space.gram_np
    y = pt.y
    vz = pt.v
    sy = math.sqrt(y)
    radius = min(policy.initial_radius, 8)
    grids = np.meshgrid(*[np.arange(-radius, radius + 1)] * lattice.dim,
                        indexing="ij")
    l = np.stack([g.reshape(-1) for g in grids], axis=1).astype(float)
    x = l + vz / y
    ql = 0.5 * np.einsum("ni,ij,nj->n", l, gram, l)
    lm = -2 * math.pi * y * ql - 2 * math.pi * (l @ gram @ vz)
    w = np.array([weight_value(prog, sy * xi) for xi in x])
    mags = np.abs(w) * np.exp(np.minimum(lm, 100.0))
    order = np.argsort(-mags)
    worst = 0.0
    used = 0
    for idx in order:
        if used >= top_terms:
            break
        arg = sy * x[idx]
        # skip stencil-unsafe points next to isotropic walls
        if _near_zero_variance_wall(prog, arg, h):
            continue
        res = vigneras_residual(poly, arg, h=h)
        worst = max(worst, abs(res))
        used += 1
    return CheckReport("vigneras", worst, tolerance,
                       (f"points={used}", f"h={h}"))


def _near_zero_variance_wall(prog, v, h) -> bool:
    for i, zv in enumerate(prog.zero_var):
        if zv:
            row = prog.pair_rows[i]
            if abs(row @ v) <= 3.0 * h * np.linalg.norm(row):
                return True
    return False


# ---------------------------------------------------------------------------
# running-example oracle: direct quadrature of the smoothed indicator
# ---------------------------------------------------------------------------

def running_example_oracle(v, cfg: QuadratureConfig = DEFAULT_CFG
                           ) -> tuple[float, float]:
    """(oracle, pipeline) values of the smoothed face indicator of the
    running tetrahedral cone in signature (1, 2).

    The oracle evaluates the four terms of the indicator independently of
    the production path: the constant 1/4; the degenerate wall pair by
    one-dimensional Gaussian quadrature of its sign-product kernel; the two
    definite wall pairs by direct two-dimensional quadrature of the
    normalised convolution over their spans (inner coordinate analytic
    between sign breakpoints, outer coordinate adaptive).
    """
    from .presets import running_example
    lattice, wall_set, poly = running_example()
    v = np.asarray(v, dtype=float)
    space = lattice.space

    walls = [np.array([float(x) for x in w]) for w in wall_set.walls]
    gram = space.gram_np

    def pair(a, b):
        return float(a @ gram @ b)

    # margins for the degenerate pair {w0, w1}
    n0 = math.sqrt(-pair(walls[0], walls[0]))
    n1 = math.sqrt(-pair(walls[1], walls[1]))
    b0 = 2 * math.sqrt(math.pi) * pair(v, walls[0]) / n0
    b1 = 2 * math.sqrt(math.pi) * pair(v, walls[1]) / n1

    def deg_integrand(t):
        return (np.sign(b0 + t) * np.sign(b1 - t)
                * math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi))

    bps = sorted([-b0, b1])
    pieces = [(-9.0, bps[0]), (bps[0], bps[1]), (bps[1], 9.0)]
    j_deg = 0.0
    for a, b in pieces:
        if b <= a:
            continue
        val, _ = integrate.quad(deg_integrand, a, b, epsabs=cfg.abs_tol,
                                limit=100)
        j_deg += val

    j13 = _edge_quadrature(space, walls[0], walls[2], v, cfg)
    j23 = _edge_quadrature(space, walls[1], walls[2], v, cfg)
    oracle = 0.25 * (1.0 + j_deg + j13 + j23)
    pipeline = sgn_hat_cone(poly, v, cfg)
    return oracle, pipeline


def _edge_quadrature(space, wa, wb, v, cfg) -> float:
    """Normalised convolution of sgn<.,wa> sgn<.,wb> with exp(4 pi q(.))
    over span{wa, wb}, evaluated at the orthogonal projection of v.

    Basis coefficients (s, t) for u = s*wa + t*wb; the Gaussian weight is
    exp(-2 pi (d^T M d)) around the projection coefficients, M the negated
    edge Gram; the t-integral is analytic between the sign breakpoints,
    the s-integral adaptive.
    """
    gram = space.gram_np
    g = np.array([[wa @ gram @ wa, wa @ gram @ wb],
                  [wb @ gram @ wa, wb @ gram @ wb]])
    m = -g
    p = np.array([v @ gram @ wa, v @ gram @ wb])
    ce = np.linalg.solve(g, p)  # projection coefficients
    # conditional structure of the t-integral given s
    mu_slope = -m[0, 1] / m[1, 1]
    pref_coef = 2 * math.pi * (m[0, 0] - m[0, 1] ** 2 / m[1, 1])
    sd = math.sqrt(1.0 / (4 * math.pi * m[1, 1]))
    z_norm = math.pi / math.sqrt(np.linalg.det(2 * math.pi * m))

    def outer(s):
        # sign args: <u, wa> = g00 s + g01 t, <u, wb> = g10 s + g11 t
        bps = sorted([-g[0, 0] * s / g[0, 1], -g[1, 0] * s / g[1, 1]])
        ds = s - ce[0]
        mu = ce[1] + mu_slope * ds
        pref = math.exp(-pref_coef * ds * ds)
        tot = 0.0
        segs = [(-np.inf, bps[0]), (bps[0], bps[1]), (bps[1], np.inf)]
        mids = [bps[0] - 1.0, 0.5 * (bps[0] + bps[1]), bps[1] + 1.0]
        for (t0, t1), tm in zip(segs, mids):
            sgn = (np.sign(g[0, 0] * s + g[0, 1] * tm)
                   * np.sign(g[1, 0] * s + g[1, 1] * tm))
            z0 = (t0 - mu) / sd if np.isfinite(t0) else -np.inf
            z1 = (t1 - mu) / sd if np.isfinite(t1) else np.inf
            tot += sgn * (ndtr(z1) - ndtr(z0))
        return pref * tot * sd * math.sqrt(2 * math.pi)

    val, err = integrate.quad(outer, ce[0] - 7.0, ce[0] + 7.0,
                              epsabs=cfg.abs_tol, limit=200)
    if err > 100 * max(cfg.abs_tol, 1e-13):
        raise ToleranceNotMet(f"edge quadrature error estimate {err:.2e}")
    return val / z_norm
