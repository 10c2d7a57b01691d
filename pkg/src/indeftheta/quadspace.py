"""Rational quadratic spaces, integral lattices and discriminant groups.

Conventions: a space is presented by a symmetric Gram matrix m for the
bilinear pairing, <v, w> = v^T m w, and q(v) = <v, v>/2.  Lattices are the
integer vectors in the given coordinates; the dual lattice is m^{-1} Z^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import exact
from .errors import DegenerateForm, DegenerateSpan, NonIntegralLattice


@dataclass(frozen=True)
class QuadSpace:
    """Nondegenerate rational quadratic space in a fixed basis."""

    gram: tuple[tuple[Fraction, ...], ...]
    signature: tuple[int, int]
    _gram_np: np.ndarray = field(repr=False, compare=False, default=None)

    @staticmethod
    def from_gram(rows) -> "QuadSpace":
        g = exact.mat(rows)
        if not exact.is_symmetric(g):
            raise DegenerateForm("Gram matrix must be symmetric")
        pos, neg, zero = exact.inertia(g)
        if zero:
            raise DegenerateForm("Gram matrix is degenerate")
        gram = tuple(tuple(row) for row in g)
        gnp = np.array([[float(x) for x in row] for row in g])
        return QuadSpace(gram, (pos, neg), gnp)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def gram_np(self) -> np.ndarray:
        return self._gram_np

    def bilinear(self, v, w) -> Fraction:
        v, w = exact.vec(v), exact.vec(w)
        if len(v) != self.dim or len(w) != self.dim:
            raise ValueError("dimension mismatch")
        return sum((v[i] * self.gram[i][j] * w[j]
                    for i in range(self.dim) for j in range(self.dim)),
                   Fraction(0))

    def quad(self, v) -> Fraction:
        return self.bilinear(v, v) / 2

    def bilinear_f(self, v, w) -> float:
        """Float pairing for quadrature-side callers."""
        return float(np.asarray(v, dtype=float) @ self._gram_np @ np.asarray(w, dtype=float))

    def quad_f(self, v) -> float:
        return 0.5 * self.bilinear_f(v, v)

    def project(self, v, walls) -> list[Fraction]:
        """Orthogonal projection of v onto the span of `walls`.

        Requires the Gram matrix of the walls to be nonsingular.
        """
        v = exact.vec(v)
        ws = [exact.vec(w) for w in walls]
        g = [[self.bilinear(a, b) for b in ws] for a in ws]
        if exact.determinant(g) == 0:
            raise DegenerateSpan("projection target has singular Gram matrix")
        rhs = [self.bilinear(v, w) for w in ws]
        coef = exact.solve(g, rhs)
        out = [Fraction(0)] * self.dim
        for c, w in zip(coef, ws):
            for i in range(self.dim):
                out[i] += c * w[i]
        return out


def signature(gram_rows) -> tuple[int, int]:
    """Exact inertia counts (d+, d-) of a symmetric rational matrix."""
    return QuadSpace.from_gram(gram_rows).signature


@dataclass(frozen=True)
class Lattice:
    """Integral lattice: integer Gram matrix, lattice = Z^n in coordinates."""

    space: QuadSpace

    @staticmethod
    def from_gram(rows) -> "Lattice":
        space = QuadSpace.from_gram(rows)
        for row in space.gram:
            for x in row:
                if x.denominator != 1:
                    raise NonIntegralLattice(
                        "lattice requires an integer Gram matrix")
        return Lattice(space)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def gram_int(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.space.gram]

    def dual_basis(self) -> list[list[Fraction]]:
        """Columns of gram^{-1}: a basis of the dual lattice."""
        inv = exact.inverse(exact.mat(self.space.gram))
        return [[inv[i][j] for i in range(self.dim)] for j in range(self.dim)]


@dataclass(frozen=True)
class DiscriminantGroup:
    """Coset representatives of L^v / L together with elementary divisors."""

    lattice: Lattice
    coset_reps: tuple[tuple[Fraction, ...], ...]
    orders: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coset_reps)

    def quad_mod1(self, rep) -> Fraction:
        q = self.lattice.space.quad(rep)
        return q - Fraction(int(q // 1))

    def bilinear_mod1(self, a, b) -> Fraction:
        x = self.lattice.space.bilinear(a, b)
        return x - Fraction(int(x // 1))


def discriminant_group(lattice: Lattice) -> DiscriminantGroup:
    """Complete duplicate-free coset representatives of L^v / L.

    Via the Smith normal form of the Gram matrix: L^v/L is isomorphic to
    Z^n / m Z^n, with cyclic factors of the elementary divisors.
    """
    m = lattice.gram_int
    n = lattice.dim
    d, u, _v = exact.smith_normal_form(m)
    divisors = [abs(d[i][i]) for i in range(n)]
    u_inv = exact.inverse(exact.mat([[Fraction(x) for x in row] for row in u]))
    m_inv = exact.inverse(exact.mat(lattice.space.gram))
    gens = []
    for i in range(n):
        col = [u_inv[r][i] for r in range(n)]
        gens.append(exact.mat_vec(m_inv, col))
    reps = []
    ranges = [range(di if di > 0 else 1) for di in divisors]
    for ks in product(*ranges):
        rep = [Fraction(0)] * n
        for k, g in zip(ks, gens):
            for i in range(n):
                rep[i] += k * g[i]
        rep = tuple(x - (x // 1) for x in rep)  # reduce mod Z^n into [0,1)
        reps.append(rep)
    reps = sorted(set(reps))
    expected = abs(int(exact.determinant(exact.mat(lattice.space.gram))))
    if len(reps) != expected:
        raise AssertionError("discriminant group enumeration lost cosets")
    orders = tuple(di for di in divisors if di > 1)
    return DiscriminantGroup(lattice, tuple(reps), orders)
