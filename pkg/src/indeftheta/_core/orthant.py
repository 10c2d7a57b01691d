"""Multivariate normal orthant probabilities for frames of 3 or 4 walls.

Conditioning reductions: the trivariate lower orthant integrates a bivariate
CDF against the conditional density, the quadrivariate one integrates the
trivariate.  Accuracy is set by ORTHANT_EPSABS; these paths are desk-scale
(used by the gerf API and by polynomials with d^- = 3 cones), not by the hot
theta kernels.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from ..errors import UnsupportedDimension
from .fallback import phi2_scalar

ORTHANT_EPSABS = 1e-11


def lower_orthant(h, corr) -> float:
    """P[Z_i <= h_i for all i], Z centred normal with correlation matrix corr."""
    h = np.asarray(h, dtype=float)
    k = len(h)
    if k == 0:
        return 1.0
    if k == 1:
        return float(ndtr(h[0]))
    if k == 2:
        return phi2_scalar(h[0], h[1], float(corr[0, 1]))
    if k == 3:
        return _tri_lower(h, corr)
    if k == 4:
        return _quad_lower(h, corr)
    raise UnsupportedDimension("orthant probabilities implemented up to 4 walls")


def _conditional(corr, last):
    """Conditional correlation structure given the `last` coordinate."""
    idx = [i for i in range(corr.shape[0]) if i != last]
    r = corr[idx, last]
    s = np.sqrt(np.maximum(1.0 - r * r, 1e-300))
    sub = corr[np.ix_(idx, idx)]
    cond = np.eye(len(idx))
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            cond[a, b] = cond[b, a] = (sub[a, b] - r[a] * r[b]) / (s[a] * s[b])
    return idx, r, s, cond


def _tri_lower(h, corr) -> float:
    idx, r, s, cond = _conditional(np.asarray(corr, dtype=float), 2)
    rho12 = float(np.clip(cond[0, 1], -1.0, 1.0))

    def integrand(t):
        a = (h[idx[0]] - r[0] * t) / s[0]
        b = (h[idx[1]] - r[1] * t) / s[1]
        return math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi) * \
            phi2_scalar(a, b, rho12)

    top = min(h[2], 8.5)
    val, _err = integrate.quad(integrand, -8.5, top, epsabs=ORTHANT_EPSABS,
                               epsrel=1e-10, limit=200)
    return max(val, 0.0)


def _quad_lower(h, corr) -> float:
    corr = np.asarray(corr, dtype=float)
    idx, r, s, cond = _conditional(corr, 3)

    def integrand(t):
        hc = np.array([(h[idx[a]] - r[a] * t) / s[a] for a in range(3)])
        return math.exp(-0.5 * t * t) / math.sqrt(2 * math.pi) * \
            _tri_lower(np.append(hc, 0.0)[:3], cond)

    top = min(h[3], 8.5)
    val, _err = integrate.quad(integrand, -8.5, top, epsabs=1e-9,
                               epsrel=1e-8, limit=100)
    return max(val, 0.0)


def expectation_sign_product(b, corr) -> float:
    """E[prod_i sgn(b_i + N_i)] for centred unit normals with correlation corr.

    Indicator expansion: sum over subsets S of (-2)^{|S|} P[N_S <= -b_S].
    """
    b = np.asarray(b, dtype=float)
    corr = np.asarray(corr, dtype=float)
    k = len(b)
    tot = 0.0
    for size in range(0, k + 1):
        for subset in combinations(range(k), size):
            if size == 0:
                tot += 1.0
                continue
            idx = list(subset)
            tot += (-2.0) ** size * lower_orthant(-b[idx], corr[np.ix_(idx, idx)])
    return tot
