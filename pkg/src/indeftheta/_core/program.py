"""Compilation of sign polynomials into evaluatable weight programs.

A WeightProgram holds, per wall, the pairing row and the standardised margin
scale, and per polynomial term an edge descriptor classifying its smoothing
structure (exact isotropic factors, single smooth wall, definite pair,
rank-one degenerate pair, or a larger frame routed to the slow path).  Both
the NumPy fallback and the compiled kernel consume this structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import exact
from ..errors import SpanNotNegativeSemidefinite, UnsupportedDegeneracy

TWO_SQRT_PI = 2.0 * math.sqrt(math.pi)

KIND_CONST = 0      # E- empty (value 1 up to isotropic sign factors)
KIND_SINGLE = 1     # one smooth wall
KIND_PAIR_DEF = 2   # two smooth walls, negative definite span
KIND_PAIR_DEG = 3   # two smooth walls, rank-one span (correlation +-1)
KIND_BIG = 4        # three or more smooth walls: slow path


@dataclass(frozen=True)
class EdgeTerm:
    coeff: float                 # a_E
    kind: int
    smooth: tuple[int, ...]      # wall indices of E^- (order fixed)
    iso: tuple[int, ...]         # wall indices of E^0 (exact sign factors)
    rho: float = 0.0             # pair correlation (definite pairs)
    lam: int = 0                 # +-1 slope (degenerate pairs)
    gram: tuple = ()             # exact Gram of the smooth part (slow path)


@dataclass(frozen=True)
class WeightProgram:
    dim: int
    pair_rows: np.ndarray        # (n_walls, dim) float rows of <., w_i>
    scales: np.ndarray           # (n_walls,) margin scale: beta = scale * <x, w>
    zero_var: np.ndarray         # (n_walls,) bool: q(w) = 0 walls
    terms: tuple[EdgeTerm, ...]
    monomials: tuple[tuple[float, tuple[int, ...]], ...]  # exact sgn polynomial
    coeff_abs_sum: float
    has_big: bool = False
    # per-wall kappa = sum of |a_E| over smooth edges containing the wall
    kappa: np.ndarray = field(default=None, repr=False)


def compile_polynomial(poly, space) -> WeightProgram:
    """Build the weight program for sum_E a_E sgn_hat_E over a wall set.

    Requires every term's span to be negative semidefinite and classifies
    each term's smoothing structure from the exact Gram matrix.
    """
    wall_set = poly.wall_set
    walls = [exact.vec(w) for w in wall_set.walls]
    n = len(walls)
    rows = np.array([[float(x) for x in r] for r in wall_set.pairing_rows()]
                    ) if n else np.zeros((0, space.dim))
    norms = []
    zero_var = np.zeros(n, dtype=bool)
    scales = np.zeros(n)
    for i, w in enumerate(walls):
        qw = space.quad(w)
        if qw > 0:
            raise SpanNotNegativeSemidefinite(
                f"wall {i} has positive norm; smoothing undefined")
        if qw == 0:
            zero_var[i] = True
            scales[i] = 1.0
            norms.append(Fraction(0))
        else:
            nw = -space.bilinear(w, w)
            norms.append(nw)
            scales[i] = TWO_SQRT_PI / math.sqrt(float(nw))

    terms = []
    monomials = []
    has_big = False
    kappa = np.zeros(n)
    for key, coeff in poly.terms:
        monomials.append((float(coeff), tuple(key)))
        iso = tuple(i for i in key if zero_var[i])
        smooth = tuple(i for i in key if not zero_var[i])
        a = float(coeff)
        if not smooth:
            terms.append(EdgeTerm(a, KIND_CONST, (), iso))
            continue
        gram = [[wall_set.space.bilinear(walls[i], walls[j]) for j in smooth]
                for i in smooth]
        pos, _neg, zero = exact.inertia(gram)
        if pos > 0:
            raise SpanNotNegativeSemidefinite(
                f"term {key} spans an indefinite subspace")
        for i in smooth:
            kappa[i] += abs(a)
        if len(smooth) == 1:
            terms.append(EdgeTerm(a, KIND_SINGLE, smooth, iso))
        elif len(smooth) == 2:
            gij = gram[0][1]
            gii, gjj = gram[0][0], gram[1][1]
            if zero == 0:
                rho = -float(gij) / math.sqrt(float(gii * gjj))
                terms.append(EdgeTerm(a, KIND_PAIR_DEF, smooth, iso, rho=rho))
            else:
                if gij * gij != gii * gjj:
                    raise UnsupportedDegeneracy(
                        f"term {key}: degenerate pair with inconsistent Gram")
                lam = -1 if gij > 0 else 1
                terms.append(EdgeTerm(a, KIND_PAIR_DEG, smooth, iso, lam=lam))
        else:
            if zero > 0:
                raise UnsupportedDegeneracy(
                    f"term {key}: degenerate span of {len(smooth)} walls is "
                    "outside the supported desk-scale cases")
            has_big = True
            gram_t = tuple(tuple(row) for row in gram)
            terms.append(EdgeTerm(a, KIND_BIG, smooth, iso, gram=gram_t))

    coeff_abs_sum = float(sum(abs(float(c)) for c, _ in monomials))
    return WeightProgram(
        dim=space.dim,
        pair_rows=rows,
        scales=scales,
        zero_var=zero_var,
        terms=tuple(terms),
        monomials=tuple(monomials),
        coeff_abs_sum=coeff_abs_sum,
        has_big=has_big,
        kappa=kappa,
    )
