"""Generalized error functions: smoothed signs, sector volumes, asymptotics.

The smoothed sign of a wall frame E is the normalised convolution of the
sign product with the Gaussian exp(4 pi q(.)) on span E.  In standardised
margins beta_w = 2 sqrt(pi) <v, w> / sqrt(-<w, w>) it reduces to expectations
of sign products of unit normals with correlation -<w,w'>/(n_w n_w'); a
single wall gives erf(beta/sqrt(2)) and a wall pair a bivariate orthant
combination.  Semidefinite spans are the limits of definite smoothings:
isotropic walls contribute exact sign factors, rank-one pairs reduce to a
one-dimensional breakpoint integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact
from ._core import compile_polynomial
from ._core import program as _program
from ._core.fallback import weight_value
from ._core.orthant import expectation_sign_product, lower_orthant
from .cone import SignPolynomial
from .errors import (FamilyNotNegative, SpanNotNegativeDefinite,
                     SpanNotNegativeSemidefinite, TooCloseToWall,
                     UnsupportedDimension)
from .quadspace import QuadSpace

TWO_SQRT_PI = 2.0 * math.sqrt(math.pi)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_depth: int = 50
    mc_check_samples: int = 0

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


DEFAULT_CFG = QuadratureConfig()


@dataclass(frozen=True)
class NegDefFrame:
    """A finite wall frame with negative semidefinite span."""

    space: QuadSpace
    vectors: tuple[tuple[Fraction, ...], ...]
    gram: tuple[tuple[Fraction, ...], ...]
    radical_dim: int
    iso_indices: tuple[int, ...]     # walls with q(w) = 0
    smooth_indices: tuple[int, ...]

    @staticmethod
    def make(space: QuadSpace, vectors) -> "NegDefFrame":
        vs = [exact.vec(v) for v in vectors]
        if len(vs) > 4:
            raise UnsupportedDimension("frames supported up to 4 walls")
        gram = [[space.bilinear(a, b) for b in vs] for a in vs]
        pos, _neg, zero = exact.inertia(gram) if vs else (0, 0, 0)
        if pos > 0:
            raise SpanNotNegativeSemidefinite("frame span has positive directions")
        iso = tuple(i for i, v in enumerate(vs) if space.quad(v) == 0)
        smooth = tuple(i for i in range(len(vs)) if i not in iso)
        return NegDefFrame(space, tuple(tuple(v) for v in vs),
                           tuple(tuple(r) for r in gram), zero, iso, smooth)

    @property
    def size(self) -> int:
        return len(self.vectors)

    @property
    def is_definite(self) -> bool:
        return self.radical_dim == 0 and self.size > 0 or self.size == 0

    def margins(self, v) -> np.ndarray:
        """Standardised signed margins beta_w of the smooth walls."""
        out = []
        for i in self.smooth_indices:
            w = self.vectors[i]
            n2 = -float(self.gram[i][i])
            out.append(TWO_SQRT_PI * self.space.bilinear_f(v, w) / math.sqrt(n2))
        return np.array(out)

    def correlation(self) -> np.ndarray:
        k = len(self.smooth_indices)
        corr = np.eye(k)
        for a in range(k):
            for b in range(k):
                if a != b:
                    i, j = self.smooth_indices[a], self.smooth_indices[b]
                    corr[a, b] = -float(self.gram[i][j]) / math.sqrt(
                        float(self.gram[i][i] * self.gram[j][j]))
        return corr

    def wall_distance(self, v) -> float:
        """Distance (w.r.t. -q) from v_E to the nearest wall of the frame."""
        b = self.margins(v)
        if len(b) == 0:
            return math.inf
        return float(np.min(np.abs(b))) / (2.0 * math.sqrt(2.0 * math.pi))


def sgn_product(space: QuadSpace, vectors, v) -> int:
    """sgn_E(v) = prod sgn<v, w>, with sgn(0) = 0 (exact for rational input)."""
    out = 1
    for w in vectors:
        try:
            val = space.bilinear(v, w)
        except (TypeError, ValueError):
            val = space.bilinear_f(v, w)
        if val == 0:
            return 0
        out *= 1 if val > 0 else -1
    return out


def vol_hat(frame: NegDefFrame, v, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """Gaussian measure of the sector opposite to v across the frame walls.

    The orthant probability P[sgn<G, w> != sgn<v, w> for all w] for the
    Gaussian centred at v with density ~ exp(4 pi q(. - v)); on-wall margins
    count with the half-space convention.  Requires a definite span.
    """
    if frame.size == 0:
        return 1.0
    if not frame.is_definite or frame.iso_indices:
        raise SpanNotNegativeDefinite("vol_hat needs a negative definite span")
    b = frame.margins(v)
    s = np.where(b == 0.0, 1.0, np.sign(b))
    corr = frame.correlation() * np.outer(s, s)
    np.fill_diagonal(corr, 1.0)
    return lower_orthant(-np.abs(b), corr)


def sgn_hat(frame: NegDefFrame, v, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """Smoothed sign of the frame at v (semidefinite spans allowed).

    Definite spans: E[prod sgn(beta_w + N_w)] via the orthant expansion.
    Semidefinite spans: exact sign factors for isotropic walls times the
    degenerate-Gaussian limit for the rest (rank-one pairs supported).
    """
    if frame.size == 0:
        return 1.0
    sig = 1.0
    for i in frame.iso_indices:
        s = sgn_product(frame.space, [frame.vectors[i]], v)
        if s == 0:
            return 0.0
        sig *= s
    smooth = frame.smooth_indices
    if not smooth:
        return sig
    b = frame.margins(v)
    corr = frame.correlation()
    sub_gram = [[frame.gram[i][j] for j in smooth] for i in smooth]
    _pos, _neg, zero = exact.inertia(sub_gram)
    if zero == 0:
        return sig * expectation_sign_product(b, corr)
    if len(smooth) == 2:
        gij = sub_gram[0][1]
        lam = -1.0 if gij > 0 else 1.0
        return sig * _deg_pair_expectation(b[0], b[1], lam)
    raise SpanNotNegativeSemidefinite(
        "degenerate spans beyond rank-one pairs are not supported")


def _deg_pair_expectation(b1: float, b2: float, lam: float) -> float:
    """E[sgn(b1 + z) sgn(b2 + lam z)] for a standard normal z, lam = +-1."""
    from scipy.special import ndtr
    if lam == 1:
        p = ndtr(min(-b1, -b2))
    else:
        p = max(0.0, ndtr(-b1) + ndtr(-b2) - 1.0)
    return 1.0 - 2.0 * ndtr(-b1) - 2.0 * ndtr(-b2) + 4.0 * p


def a_coeff(n: int, m: int) -> int:
    """Coefficients of the sector-volume refinement recursion.

    a_0(m) = (-1)^m and a_n(m) = a_{n-1}(m) - binom(m, n-1) a_{n-1}(n-1);
    in particular a_m(m) = (-2)^m.
    """
    if not 0 <= n <= m:
        raise ValueError("need 0 <= n <= m")
    row = [(-1) ** mm for mm in range(m + 1)]  # a_0
    for step in range(1, n + 1):
        prev_diag = row[step - 1]
        row = [row[mm] - math.comb(mm, step - 1) * prev_diag
               if mm >= step else row[mm]
               for mm in range(m + 1)]
    return row[m]


@lru_cache(maxsize=64)
def compile_cone_program(poly: SignPolynomial):
    return compile_polynomial(poly, poly.wall_set.space)


def sgn_hat_cone(poly: SignPolynomial, v,
                 cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """Smoothed face indicator sgn_hat_C+ at v: sum_E a_E sgn_hat_E(v)."""
    return weight_value(compile_cone_program(poly), np.asarray(v, dtype=float))


# ---------------------------------------------------------------------------
# Vigneras differential equation
# ---------------------------------------------------------------------------

def vigneras_residual(poly: SignPolynomial, v, h: float = 1e-3,
                      cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """Finite-difference residual of Vigneras's equation at v.

    Residual = Delta f / (4 pi) - E f with E the Euler operator and Delta
    the Laplacian paired by the inverse bilinear Gram matrix; the smoothed
    indicator solves it with k_0 = 0 (the one-dimensional kernel
    erf(2 sqrt(pi) t) is the calibrating closed form).  Fourth-order central
    stencils in congruence-diagonalised coordinates (no mixed derivatives).
    """
    space = poly.wall_set.space
    prog = compile_cone_program(poly)
    diag, vecs = exact.congruence_diagonalize(exact.mat(space.gram))
    t_cols = np.array([[float(x) for x in vec] for vec in vecs]).T
    d_coeffs = np.array([float(x) for x in diag])
    v = np.asarray(v, dtype=float)
    xi = np.linalg.solve(t_cols, v)

    # stencil safety: exact sign factors jump across isotropic walls
    for i, zv in enumerate(prog.zero_var):
        if zv:
            row = prog.pair_rows[i]
            dist = abs(row @ v) / np.linalg.norm(row @ t_cols)
            if dist <= 2.5 * h:
                raise TooCloseToWall(
                    f"point within stencil range of isotropic wall {i}")

    def f(xi_pt):
        return weight_value(prog, t_cols @ xi_pt)

    f0 = f(xi)
    euler = 0.0
    lap = 0.0
    n = len(xi)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fp1, fm1 = f(xi + e), f(xi - e)
        fp2, fm2 = f(xi + 2 * e), f(xi - 2 * e)
        d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
        d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
        euler += xi[i] * d1
        lap += d2 / d_coeffs[i]
    return lap / (4.0 * math.pi) - euler


# ---------------------------------------------------------------------------
# degeneration of frames (Prop 3.5 / Cor 3.6 style tabulation)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegenerationReport:
    rows: tuple[dict, ...]
    decay_expected: bool
    vol_ratio_max: float
    diff_ratio_max: float

    @property
    def bounded(self) -> bool:
        return self.vol_ratio_max < math.inf and self.diff_ratio_max < math.inf


def degeneration_check(space: QuadSpace, base_vectors, wall_of_t, v, t_grid,
                       cfg: QuadratureConfig = DEFAULT_CFG) -> DegenerationReport:
    """Tabulate sector-volume decay and smoothed-sign continuity bounds along
    a degenerating family E(t) = base + {w(t)} with q(w(t)) -> 0.

    For each t: vol_hat of the full frame against exp(pi <w,v>^2 / q(w)) and
    |sgn_hat E(t) - sgn_hat E(0)| against exp(pi <w,v>^2 / (4 q(w))).
    A vanishing pairing <w(0), v> makes both bounds vacuous; the report then
    flags that no decay is expected.
    """
    w0 = wall_of_t(0.0)
    base = [exact.vec(b) for b in base_vectors]
    pair_v0 = space.bilinear_f(v, w0)
    decay_expected = abs(pair_v0) > 1e-12

    limit_frame = NegDefFrame.make(space, base + [w0])
    shat0 = sgn_hat(limit_frame, v, cfg)

    rows = []
    vol_ratio_max = 0.0
    diff_ratio_max = 0.0
    for t in t_grid:
        if t <= 0:
            raise FamilyNotNegative("grid values must be positive")
        wt = wall_of_t(t)
        frame_t = NegDefFrame.make(space, base + [wt])
        if not frame_t.is_definite:
            raise FamilyNotNegative(f"family span degenerate at t = {t}")
        qw = space.quad_f(wt)
        pw = space.bilinear_f(v, wt)
        vol_t = vol_hat(frame_t, v, cfg)
        shat_t = sgn_hat(frame_t, v, cfg)
        vol_bound = math.exp(math.pi * pw * pw / qw) if qw < 0 else math.inf
        diff_bound = math.exp(math.pi * pw * pw / (4.0 * qw)) if qw < 0 else math.inf
        diff = abs(shat_t - shat0)
        vol_ratio = vol_t / vol_bound if vol_bound > 0 else math.inf
        diff_ratio = diff / diff_bound if diff_bound > 0 else math.inf
        vol_ratio_max = max(vol_ratio_max, vol_ratio)
        diff_ratio_max = max(diff_ratio_max, diff_ratio)
        rows.append({"t": float(t), "q_w": qw, "pair_vw": pw, "vol": vol_t,
                     "vol_bound": vol_bound, "shat": shat_t, "diff": diff,
                     "diff_bound": diff_bound})
    return DegenerationReport(tuple(rows), decay_expected,
                              vol_ratio_max, diff_ratio_max)
