"""Pure NumPy/SciPy evaluation kernels (fallback backend).

Two regimes per lattice point, split on the log-magnitude lm of the
exponential factor:

* lm <= EASY_LM: the smoothed weight is evaluated by the direct per-term
  formulas; the absolute float error (~1e-16) stays below tolerance after
  multiplication by exp(lm).

* lm > EASY_LM (points of very negative norm): the weight is assembled from
  an exact integer part, per-wall one-dimensional tail calls shared bitwise
  between polynomial terms, and rare-corner joint orthant probabilities
  evaluated with relative accuracy in log space.  The integer part and the
  shared calls cancel exactly where the true weight is dominated by joint
  tails; without this structure the series is not summable in floating
  point (absolute 1e-16 noise in an O(1) weight meets exp(lm) growth).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr, ndtr, owens_t, roots_legendre

from .program import (KIND_BIG, KIND_CONST, KIND_PAIR_DEF, KIND_PAIR_DEG,
                      KIND_SINGLE, WeightProgram)

BACKEND_NAME = "fallback"

EASY_LM = 8.0
PIECE_DROP_LOG = -52.0     # pieces with lm + log|piece| below this are dropped
GUARD_EXP = 34.0           # exp arguments above this flag non-convergence
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

_GL_NODES, _GL_WEIGHTS = roots_legendre(64)


# ---------------------------------------------------------------------------
# bivariate normal primitives
# ---------------------------------------------------------------------------

def phi2_lower(h, k, rho):
    """P[Z1<=h, Z2<=k] for standard bivariate normal (vectorised in h, k).

    Owen's T formula, clamped to the Frechet bounds; absolute accuracy
    ~1e-15, sufficient for the easy regime.
    """
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    scalar = h.ndim == 0 and k.ndim == 0
    h, k = np.atleast_1d(h), np.atleast_1d(k)
    h, k = np.broadcast_arrays(h, k)
    ph, pk = ndtr(h), ndtr(k)
    hi = np.minimum(ph, pk)
    lo = np.maximum(0.0, ph + pk - 1.0)
    if rho >= 1.0 - 1e-14:
        out = hi
    elif rho <= -1.0 + 1e-14:
        out = lo
    else:
        r = math.sqrt(1.0 - rho * rho)
        hz, kz = h == 0.0, k == 0.0
        h_safe = np.where(hz, 1.0, h)
        k_safe = np.where(kz, 1.0, k)
        ah = (k - rho * h) / (h_safe * r)
        ak = (h - rho * k) / (k_safe * r)
        th = np.where(hz, 0.25 * np.sign(k), owens_t(h, ah))
        tk = np.where(kz, 0.25 * np.sign(h), owens_t(k, ak))
        delta = np.where((h * k < 0) | ((h * k == 0) & (h + k < 0)), 0.5, 0.0)
        out = 0.5 * (ph + pk) - th - tk - delta
        both0 = hz & kz
        if both0.any():
            out = np.where(both0, 0.25 + math.asin(rho) / (2.0 * math.pi), out)
        out = np.minimum(np.maximum(out, lo), hi)
    return float(out[0]) if scalar else out


def phi2_scalar(h: float, k: float, rho: float) -> float:
    return float(phi2_lower(np.float64(h), np.float64(k), rho))


def log_joint_tail(a: float, b: float, rho: float) -> float:
    """log P[Z1 <= -a, Z2 <= -b], relative accuracy at any scale.

    Conditions on the rarer coordinate (larger threshold) and integrates the
    conditional normal CDF on Gauss-Legendre nodes in log space.
    """
    if a < b:
        a, b = b, a
    if a > 37.5 and ndtr(-a) == 0.0:
        pass  # continue in pure log space below
    r = math.sqrt(max(1.0 - rho * rho, 1e-300))
    # z = -a - u, u >= 0; integrand phi(z) * Phi((-b - rho*z)/r)
    span = 84.0 / (a + math.sqrt(a * a + 84.0)) if a > 0 else 9.0 + abs(a)
    u = 0.5 * span * (_GL_NODES + 1.0)
    w = 0.5 * span * _GL_WEIGHTS
    z = -a - u
    logs = -0.5 * z * z - _LOG_SQRT_2PI + log_ndtr((-b - rho * z) / r) + np.log(w)
    m = float(np.max(logs))
    if not math.isfinite(m):
        return -math.inf
    return m + math.log(float(np.sum(np.exp(logs - m))))


def joint_tail(a: float, b: float, rho: float) -> tuple[float, float]:
    """(value, log value) of P[Z1 <= -a, Z2 <= -b], stable at any scale."""
    hi = min(ndtr(-a), ndtr(-b))
    if hi > 1e-8:
        val = phi2_scalar(-a, -b, rho)
        if val > 1e-10:
            return val, math.log(val)
    lg = log_joint_tail(a, b, rho)
    return (math.exp(lg) if lg > -700.0 else 0.0, lg)


# ---------------------------------------------------------------------------
# stable per-point weight pieces
# ---------------------------------------------------------------------------

def _sgn(x: float) -> float:
    return 0.0 if x == 0.0 else (1.0 if x > 0.0 else -1.0)


def _rare_pair_joint(b1: float, b2: float, rho: float):
    """Expansion of P[Z1 <= -b1, Z2 <= -b2] when both events are rare-ish
    (b1, b2 >= 0): either a direct product-of-rarities joint, or (when the
    rarer flip drags the other one along, so the joint is single-tail sized)
    the shared single call of the rarer wall minus a genuine rare-square
    complement.

    Returns (call_slot, joint): call_slot is None or (local wall 0/1), and
    joint = (sign, a, b, rho') to be evaluated as sign * P[Z<=-a, Z'<=-b].
    """
    s, w = (0, 1) if b1 >= b2 else (1, 0)
    bs, bw = (b1, b2) if s == 0 else (b2, b1)
    if bw - rho * bs <= 0.0:
        # conditional mean of X_w under the X_s flip is negative: drag.
        # P = Phi(-b_s) - P[X_s<0, X_w>0]
        return s, (-1.0, bs, -bw, -rho)
    return None, (1.0, b1, b2, rho)


def weight_pieces(prog: WeightProgram, x_scaled: np.ndarray):
    """Stable decomposition of sgn_hat_C+ at one sqrt(y)-scaled point.

    Returns (int_part, call_coeffs, log_calls, joints) with

        value = int_part + sum_w call_coeffs[w] * exp(log_calls[w])
                + sum(c * J for (c, J, logJ) in joints)

    where exp(log_calls[w]) = Phi(-|beta_w|).  Every term's expansion is
    anchored at its dominant sign corner with drag-aware joint rewrites, so
    each piece is either exact or a product-of-rarities tail; the shared
    calls carry exact (small rational) coefficients whose cancellations
    happen in integer arithmetic, below the float underflow line.
    """
    raw = prog.pair_rows @ x_scaled
    beta = prog.scales * raw
    n = len(beta)
    log_calls = log_ndtr(-np.abs(beta)) if n else np.zeros(0)
    call_coeffs = np.zeros(n)
    int_part = 0.0
    joints: list[tuple[float, float, float]] = []

    def add_phi(idx: int, coeff: float) -> float:
        """Add coeff * Phi(-beta_idx) in shared-call form; returns int delta."""
        if beta[idx] >= 0.0:
            call_coeffs[idx] += coeff
            return 0.0
        call_coeffs[idx] -= coeff
        return coeff

    def add_rare_joint(coeff: float, wall_pair, b1, b2, rho):
        slot, (sgn_j, ja, jb, jrho) = _rare_pair_joint(b1, b2, rho)
        if slot is not None:
            call_coeffs[wall_pair[slot]] += coeff
        val, lg = joint_tail(ja, jb, jrho)
        joints.append((coeff * sgn_j, val, lg))

    for term in prog.terms:
        sig = 1.0
        for i in term.iso:
            sig *= _sgn(raw[i])
        if sig == 0.0:
            continue
        a = term.coeff * sig
        kind = term.kind
        if kind == KIND_CONST:
            int_part += a
            continue
        if kind == KIND_SINGLE:
            i = term.smooth[0]
            int_part += a + add_phi(i, -2.0 * a)
            continue
        if kind == KIND_BIG:
            raise AssertionError("big terms are routed through weight_value")
        i, j = term.smooth
        bi, bj = beta[i], beta[j]
        # shat_E = 1 - 2 Phi(-b_i) - 2 Phi(-b_j) + 4 P[X_i<0, X_j<0]
        int_part += a
        int_part += add_phi(i, -2.0 * a) + add_phi(j, -2.0 * a)
        if kind == KIND_PAIR_DEG:
            if term.lam == 1:
                # P = Phi(-max(b_i, b_j))
                w = i if bi >= bj else j
                int_part += add_phi(w, 4.0 * a)
            else:
                # interval (b_j, -b_i) on the noise line: P = Phi(-b_i) - Phi(b_j)
                # when b_i + b_j < 0 (margin test; probability arithmetic
                # would absorb the tails), else exactly zero
                if bi + bj < 0.0:
                    int_part += add_phi(i, 4.0 * a) + add_phi(j, 4.0 * a) - 4.0 * a
            continue
        rho = term.rho
        if bi >= 0.0 and bj >= 0.0:
            add_rare_joint(4.0 * a, (i, j), bi, bj, rho)
        elif bi < 0.0 and bj < 0.0:
            # P = 1 - Phi(-|b_i|) - Phi(-|b_j|) + P[X_i>0, X_j>0]
            int_part += 4.0 * a
            call_coeffs[i] -= 4.0 * a
            call_coeffs[j] -= 4.0 * a
            add_rare_joint(4.0 * a, (i, j), -bi, -bj, rho)
        else:
            # mixed corner: rare wall r (beta >= 0), likely wall o (beta < 0)
            if bi >= 0.0:
                r_idx, o_idx, br, bo = i, j, bi, bj
            else:
                r_idx, o_idx, br, bo = j, i, bj, bi
            m_down = br + rho * abs(bo)   # X_r mean given the X_o flip tail
            m_up = bo - rho * br          # X_o mean given the X_r flip tail
            if m_down <= 0.0:
                # the o-flip drags X_r along:
                # P = Phi(-b_r) - Phi(-|b_o|) + P[X_r>0, X_o>0]
                int_part += add_phi(r_idx, 4.0 * a)
                call_coeffs[o_idx] += -4.0 * a
                add_rare_joint(4.0 * a, (r_idx, o_idx), -br, -bo, rho)
            elif m_up >= 0.0:
                # the r-flip pushes X_o positive: the lower joint is itself
                # the product-of-rarities object
                val, lg = joint_tail(br, bo, rho)
                joints.append((4.0 * a, val, lg))
            else:
                # no drag either way: P = Phi(-b_r) - P[X_r<0, X_o>0]
                int_part += add_phi(r_idx, 4.0 * a)
                val, lg = joint_tail(br, -bo, -rho)
                joints.append((-4.0 * a, val, lg))
    return int_part, call_coeffs, log_calls, joints


def weight_value(prog: WeightProgram, x_scaled) -> float:
    """Reference scalar sgn_hat_C+ value (stable assembly)."""
    x_scaled = np.asarray(x_scaled, dtype=float)
    if prog.has_big:
        return weight_value_direct(prog, x_scaled)
    int_part, call_coeffs, log_calls, joints = weight_pieces(prog, x_scaled)
    tot = int_part + float(call_coeffs @ np.exp(log_calls))
    for c, val, _lg in joints:
        tot += c * val
    return tot


def _corr_from_gram(gram):
    g = np.array([[float(x) for x in row] for row in gram])
    d = np.sqrt(-np.diag(g))
    return -g / np.outer(d, d)


def weight_value_direct(prog: WeightProgram, x_scaled) -> float:
    """Direct evaluation, including |E^-| >= 3 frames (slow path)."""
    from .orthant import expectation_sign_product
    raw = prog.pair_rows @ np.asarray(x_scaled, dtype=float)
    beta = prog.scales * raw
    tot = 0.0
    for term in prog.terms:
        sig = 1.0
        for i in term.iso:
            sig *= _sgn(raw[i])
        if sig == 0.0:
            continue
        a = term.coeff * sig
        if term.kind == KIND_CONST:
            tot += a
        elif term.kind == KIND_SINGLE:
            i = term.smooth[0]
            tot += a * (1.0 - 2.0 * ndtr(-beta[i]))
        elif term.kind == KIND_PAIR_DEF:
            i, j = term.smooth
            p = phi2_scalar(-beta[i], -beta[j], term.rho)
            tot += a * (1.0 - 2.0 * ndtr(-beta[i]) - 2.0 * ndtr(-beta[j]) + 4.0 * p)
        elif term.kind == KIND_PAIR_DEG:
            i, j = term.smooth
            bi, bj = beta[i], beta[j]
            if term.lam == 1:
                p = ndtr(min(-bi, -bj))
            elif bi + bj < 0.0:
                p = ndtr(-bi) - ndtr(bj)
            else:
                p = 0.0
            tot += a * (1.0 - 2.0 * ndtr(-bi) - 2.0 * ndtr(-bj) + 4.0 * p)
        else:
            b = np.array([beta[i] for i in term.smooth])
            corr = _corr_from_gram(term.gram)
            tot += a * expectation_sign_product(b, corr)
    return tot


# ---------------------------------------------------------------------------
# vectorised weights
# ---------------------------------------------------------------------------

def weights_easy(prog: WeightProgram, x_scaled: np.ndarray) -> np.ndarray:
    """Direct vectorised sgn_hat weights for a batch of scaled points."""
    npts = len(x_scaled)
    if prog.pair_rows.shape[0] == 0:
        return np.full(npts, sum(c for c, _ in prog.monomials))
    raw = x_scaled @ prog.pair_rows.T
    beta = raw * prog.scales
    tot = np.zeros(npts)
    for term in prog.terms:
        sig = np.ones(npts)
        for i in term.iso:
            sig = sig * np.sign(raw[:, i])
        a = term.coeff
        if term.kind == KIND_CONST:
            tot += a * sig
            continue
        if term.kind == KIND_SINGLE:
            i = term.smooth[0]
            tot += a * sig * (1.0 - 2.0 * ndtr(-beta[:, i]))
            continue
        i, j = term.smooth[0], term.smooth[1]
        bi, bj = beta[:, i], beta[:, j]
        if term.kind == KIND_PAIR_DEG:
            if term.lam == 1:
                p = ndtr(np.minimum(-bi, -bj))
            else:
                p = np.maximum(0.0, ndtr(-bi) + ndtr(-bj) - 1.0)
        else:
            p = phi2_lower(-bi, -bj, term.rho)
        tot += a * sig * (1.0 - 2.0 * ndtr(-bi) - 2.0 * ndtr(-bj) + 4.0 * p)
    return tot


def weights_sign(prog: WeightProgram, x: np.ndarray) -> np.ndarray:
    """Exact sgn_C+ weights (sign products with sgn(0) = 0), vectorised."""
    npts = len(x)
    if prog.pair_rows.shape[0] == 0:
        return np.full(npts, sum(c for c, _ in prog.monomials))
    raw = x @ prog.pair_rows.T
    signs = np.sign(raw)
    tot = np.zeros(npts)
    for coeff, key in prog.monomials:
        prod = np.full(npts, coeff)
        for i in key:
            prod = prod * signs[:, i]
        tot += prod
    return tot


def weights_cone(prog: WeightProgram, x: np.ndarray) -> np.ndarray:
    """Indicator of the closed symmetric cone C(W) union -C(W)."""
    if prog.pair_rows.shape[0] == 0:
        return np.ones(len(x))
    raw = x @ prog.pair_rows.T
    return ((raw >= 0.0).all(axis=1) | (raw <= 0.0).all(axis=1)).astype(float)


# ---------------------------------------------------------------------------
# theta accumulation over one enumeration chunk
# ---------------------------------------------------------------------------

def accumulate_chunk(prog: WeightProgram, mode: str, x: np.ndarray,
                     x_scaled: np.ndarray, lm: np.ndarray, ang: np.ndarray):
    """Sum of weight * exp(lm + i*ang) over a chunk of lattice points.

    Returns (complex partial sum, sum of |terms|, guard flag).  The guard
    flag reports pieces whose exponents exceeded GUARD_EXP (possible only
    on or next to the singular set).
    """
    if mode == "sign":
        w = weights_sign(prog, x)
    elif mode == "cone":
        w = weights_cone(prog, x)
    elif mode == "hat":
        return _accumulate_hat(prog, x_scaled, lm, ang)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    vals = np.where(w != 0.0, w * np.exp(np.minimum(lm, 700.0)), 0.0)
    phase = np.exp(1j * ang)
    return complex((vals * phase).sum()), float(np.abs(vals).sum()), False


def _accumulate_hat(prog, x_scaled, lm, ang):
    guard = False
    npts = len(x_scaled)
    vals = np.zeros(npts)
    if prog.has_big:
        for t in range(npts):
            if lm[t] > GUARD_EXP:
                guard = True
            vals[t] = weight_value_direct(prog, x_scaled[t]) * math.exp(min(lm[t], GUARD_EXP))
        phase = np.exp(1j * ang)
        return complex((vals * phase).sum()), float(np.abs(vals).sum()), guard

    easy = lm <= EASY_LM
    if easy.any():
        vals[easy] = weights_easy(prog, x_scaled[easy]) * np.exp(lm[easy])
    hard_idx = np.nonzero(~easy)[0]
    if len(hard_idx) and prog.pair_rows.shape[0]:
        raw = x_scaled[hard_idx] @ prog.pair_rows.T
        beta = raw * prog.scales
        logmax = log_ndtr(-np.abs(beta)).max(axis=1)
        bound = lm[hard_idx] + logmax + math.log(16.0 * max(prog.coeff_abs_sum, 1.0))
        survivors = hard_idx[bound > PIECE_DROP_LOG]
        for t in survivors:
            contrib, g = _hat_term(prog, x_scaled[t], lm[t])
            guard = guard or g
            vals[t] = contrib
    elif len(hard_idx):
        # constant polynomial: weight is the coefficient sum
        c = sum(cc for cc, _ in prog.monomials)
        for t in hard_idx:
            if lm[t] > GUARD_EXP:
                guard = True
            vals[t] = c * math.exp(min(lm[t], GUARD_EXP))
    phase = np.exp(1j * ang)
    return complex((vals * phase).sum()), float(np.abs(vals).sum()), guard


def _hat_term(prog, x_scaled_t, lmt):
    """Stable weight * exp(lmt) for one hard-regime point."""
    int_part, call_coeffs, log_calls, joints = weight_pieces(prog, x_scaled_t)
    guard = False
    contrib = 0.0
    if int_part != 0.0:
        e = lmt
        if e > GUARD_EXP:
            guard, e = True, GUARD_EXP
        contrib += int_part * math.exp(e)
    for wi in range(len(log_calls)):
        c = call_coeffs[wi]
        if c != 0.0:
            e = lmt + log_calls[wi]
            if e > GUARD_EXP:
                guard, e = True, GUARD_EXP
            if e > PIECE_DROP_LOG:
                contrib += c * math.exp(e)
    for c, _val, lg in joints:
        if c != 0.0 and lg > -math.inf:
            e = lmt + lg
            if e > GUARD_EXP:
                guard, e = True, GUARD_EXP
            if e > PIECE_DROP_LOG:
                contrib += c * math.exp(e)
    return contrib, guard
