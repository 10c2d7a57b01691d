"""Evaluation of cone theta series and their modular completions.

The vector-valued series runs over the cosets of L^v/L; the component of a
coset mu sums over l in mu + Z^n.  Weights are the cone indicator
(theta_cone), the exact face indicator sgn_C+ (theta_sign), or the smoothed
indicator at sqrt(y)(l + v/y) (theta_hat).  Enumeration is a fixed
lexicographic box sweep in deterministic chunks with compensated summation,
so results are independent of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact
from ._core import compile_polynomial, kernels
from .cone import SignPolynomial, WallSet, edges, require_valid
from .errors import NonRationalEdge, OnSingularSet, TruncationNotConverged
from .quadspace import Lattice, discriminant_group


@dataclass(frozen=True)
class JacobiPoint:
    """(tau, z) with Im(tau) > 0; z a complex vector of the space dimension."""

    tau: complex
    z: tuple[complex, ...]

    @staticmethod
    def make(tau, z) -> "JacobiPoint":
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("Im(tau) must be positive")
        return JacobiPoint(tau, tuple(complex(c) for c in z))

    @property
    def y(self) -> float:
        return self.tau.imag

    @property
    def x(self) -> float:
        return self.tau.real

    @property
    def u(self) -> np.ndarray:
        return np.array([c.real for c in self.z])

    @property
    def v(self) -> np.ndarray:
        return np.array([c.imag for c in self.z])


@dataclass(frozen=True)
class TruncationPolicy:
    term_tol: float = 1e-9
    initial_radius: int = 8
    max_radius: int = 64
    doubling: bool = True

    def __post_init__(self):
        if self.term_tol <= 0 or self.initial_radius <= 0 or self.max_radius <= 0:
            raise ValueError("tolerance and radii must be positive")


@dataclass(frozen=True)
class ThetaValue:
    components: np.ndarray
    coset_reps: tuple
    terms_used: int
    tail_estimate: float
    radius: int
    warnings: tuple[str, ...] = ()

    @property
    def component0(self) -> complex:
        return complex(self.components[0])

    def to_json_dict(self) -> dict:
        return {
            "components": [[z.real, z.imag] for z in self.components],
            "terms_used": int(self.terms_used),
            "tail_estimate": float(self.tail_estimate),
            "radius": int(self.radius),
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# singular set
# ---------------------------------------------------------------------------

def isotropic_edge_generators(lattice: Lattice, wall_set: WallSet):
    """Primitive generators of L^v intersected with each rational isotropic
    edge's totally isotropic subspace (the radical of the edge span)."""
    space = lattice.space
    gens = []
    for edge in edges(wall_set):
        if not edge.is_isotropic:
            continue
        if not edge.is_rational:
            raise NonRationalEdge(f"edge {edge.indices} is not rational")
        idx = list(edge.indices)
        gram = wall_set.wall_gram(idx)
        ker = exact.kernel_basis(gram)
        if not ker:
            continue  # isotropy lives in the perp, not the span: no condition
        rad_vecs = []
        for coeff in ker:
            vec = [Fraction(0)] * space.dim
            for c, i in zip(coeff, idx):
                for t in range(space.dim):
                    vec[t] += c * exact.fr(wall_set.walls[i][t])
            rad_vecs.append(vec)
        # integer lattice L^v cap span(rad_vecs):  x = m^{-1} k, k in Z^n,
        # x in U  <=>  B (m^{-1} k) = 0 for a defining matrix B of U
        m = exact.mat(space.gram)
        m_inv = exact.inverse(m)
        b_rows = _subspace_equations(rad_vecs, space.dim)
        bm = exact.mat_mul(b_rows, m_inv) if b_rows else []
        a_int = _clear_denominators(bm)
        k_basis = exact.integer_kernel_basis(a_int) if a_int else \
            [[int(i == j) for j in range(space.dim)] for i in range(space.dim)]
        for k in k_basis:
            g = exact.mat_vec(m_inv, exact.vec(k))
            if any(x != 0 for x in g):
                gens.append((edge, g))
    return gens


def _subspace_equations(basis, dim):
    """Rows b with span(basis) = {x : b . x = 0 for all rows}."""
    if not basis:
        return exact.identity(dim)
    return exact.kernel_basis([list(b) for b in basis])


def _clear_denominators(mat_rows):
    out = []
    for row in mat_rows:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def singular_set_distance(lattice: Lattice, wall_set: WallSet,
                          pt: JacobiPoint) -> float:
    """Distance from the point to the theta singular set.

    For each isotropic-edge generator g, the pairing <v/y, g> must avoid the
    arithmetic progression Z + <L^v, g>; the distance is the minimum over
    edges and generators, or +inf when no isotropic edge constrains it.
    """
    gens = isotropic_edge_generators(lattice, wall_set)
    if not gens:
        return math.inf
    vy = pt.v / pt.y
    best = math.inf
    for _edge, g in gens:
        g_np = np.array([float(x) for x in g])
        t = float(vy @ lattice.space.gram_np @ g_np)
        content = exact.vector_content(g)  # <L^v, g> = content * Z
        step = 1.0 / content.denominator  # Z + content Z = (1/den) Z
        frac = t / step
        dist = abs(frac - round(frac)) * step
        best = min(best, dist)
    return best


# ---------------------------------------------------------------------------
# series evaluation
# ---------------------------------------------------------------------------

class _Kahan:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float):
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


@lru_cache(maxsize=32)
def _disc_cached(lattice: Lattice):
    return discriminant_group(lattice)


def _chunks_for_box(ranges, limit=65536):
    """Split the first axis so that chunk sizes stay near `limit`."""
    sizes = [len(r) for r in ranges]
    total_rest = int(np.prod(sizes[1:], dtype=np.int64)) if len(sizes) > 1 else 1
    step = max(1, limit // max(total_rest, 1))
    first = ranges[0]
    out = []
    for start in range(0, len(first), step):
        out.append((first[start:start + step],) + tuple(ranges[1:]))
    return out


def _eval_at_radius(prog, lattice: Lattice, pt: JacobiPoint, mode: str,
                    radius: int):
    disc = _disc_cached(lattice)
    space = lattice.space
    d = space.dim
    y, x0 = pt.y, pt.x
    u, vz = pt.u, pt.v
    sy = math.sqrt(y)
    gram = space.gram_np
    um = u @ gram
    vm = vz @ gram
    shift0 = vz / y

    comps = np.zeros(len(disc), dtype=complex)
    mag_total = 0.0
    guard_any = False
    terms = 0

    n_threads = int(os.environ.get("INDEFTHETA_THREADS", "1") or "1")

    for ci, rep in enumerate(disc.coset_reps):
        mu = np.array([float(x) for x in rep])
        shift = mu + shift0
        ranges = [np.arange(math.ceil(-radius - s), math.floor(radius - s) + 1)
                  for s in shift]
        if any(len(r) == 0 for r in ranges):
            continue
        chunk_specs = _chunks_for_box(ranges)

        def run_chunk(spec):
            grids = np.meshgrid(*spec, indexing="ij")
            n = np.stack([g.reshape(-1) for g in grids], axis=1).astype(float)
            l = n + mu
            x = n + shift
            ql = 0.5 * np.einsum("ni,ij,nj->n", l, gram, l)
            lm = -2.0 * math.pi * y * ql - 2.0 * math.pi * (l @ vm)
            ang = 2.0 * math.pi * (ql * x0 + l @ um)
            return kernels.accumulate_chunk(prog, mode, x, sy * x, lm, ang), len(l)

        re_acc, im_acc, mag_acc = _Kahan(), _Kahan(), _Kahan()
        if n_threads > 1 and len(chunk_specs) > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                results = list(pool.map(run_chunk, chunk_specs))
        else:
            results = [run_chunk(spec) for spec in chunk_specs]
        for (partial, mag, guard), count in results:
            re_acc.add(partial.real)
            im_acc.add(partial.imag)
            mag_acc.add(mag)
            guard_any = guard_any or guard
            terms += count
        comps[ci] = complex(re_acc.value, im_acc.value)
        mag_total += mag_acc.value
    return comps, terms, mag_total, guard_any


def _evaluate(lattice: Lattice, wall_set: WallSet, poly: SignPolynomial,
              pt: JacobiPoint, policy: TruncationPolicy, mode: str,
              skip_validation: bool = False) -> ThetaValue:
    if not skip_validation:
        require_valid(wall_set, lattice)
    warnings_ = []
    dist = singular_set_distance(lattice, wall_set, pt)
    if dist < 1e-12:
        raise OnSingularSet(
            f"point lies on the singular set (distance {dist:.2e}); "
            f"violating edge generators: "
            f"{[_fmt_gen(g) for _e, g in isotropic_edge_generators(lattice, wall_set)]}")
    if dist < 0.01:
        warnings_.append(f"singular-set distance {dist:.3g} < 0.01: "
                         "convergence may be slow (possible wall-crossing)")

    prog = compile_polynomial(poly, lattice.space)
    disc = _disc_cached(lattice)

    if not policy.doubling:
        radius = policy.initial_radius
        comps, terms, _mag, guard = _eval_at_radius(prog, lattice, pt, mode, radius)
        inner_r = max(2, (3 * radius) // 4)
        comps_in, _t, _m, _g = _eval_at_radius(prog, lattice, pt, mode, inner_r)
        tail = float(np.max(np.abs(comps - comps_in))) if len(comps) else 0.0
        if guard:
            warnings_.append("term magnitudes exceeded the growth guard; "
                             "value unreliable near the singular set")
        return ThetaValue(comps, disc.coset_reps, terms, tail, radius,
                          tuple(warnings_))

    radius = policy.initial_radius
    prev = None
    prev_terms = 0
    while radius <= policy.max_radius:
        comps, terms, _mag, guard = _eval_at_radius(prog, lattice, pt, mode, radius)
        if guard:
            warnings_.append("term magnitudes exceeded the growth guard; "
                             "value unreliable near the singular set")
        if prev is not None:
            delta = float(np.max(np.abs(comps - prev)))
            boundary_terms = max(terms - prev_terms, 1)
            if delta <= policy.term_tol * boundary_terms:
                return ThetaValue(comps, disc.coset_reps, terms, delta,
                                  radius, tuple(warnings_))
        prev, prev_terms = comps, terms
        radius *= 2
    raise TruncationNotConverged(
        f"partial sums did not stabilise up to radius {policy.max_radius}")


def _fmt_gen(g):
    return [str(x) for x in g]


def theta_cone(lattice: Lattice, wall_set: WallSet, pt: JacobiPoint,
               policy: TruncationPolicy = TruncationPolicy()) -> ThetaValue:
    """sum over lattice points in the closed symmetric cone C - v/y of
    exp(2 pi i (q(l) tau + <z, l>)), per coset of L^v/L."""
    from .cone import face_indicator
    poly = face_indicator(wall_set)
    return _evaluate(lattice, wall_set, poly, pt, policy, "cone")


def theta_sign(lattice: Lattice, poly: SignPolynomial, pt: JacobiPoint,
               policy: TruncationPolicy = TruncationPolicy()) -> ThetaValue:
    """The incomplete series weighted by the exact face indicator sgn_C+.

    Signs are scale invariant, so sgn_C+(sqrt(y)(l + v/y)) equals
    sgn_C+(l + v/y)."""
    return _evaluate(lattice, poly.wall_set, poly, pt, policy, "sign")


def theta_hat(lattice: Lattice, poly: SignPolynomial, pt: JacobiPoint,
              policy: TruncationPolicy = TruncationPolicy(),
              cfg=None) -> ThetaValue:
    """The completed series weighted by sgn_hat_C+(sqrt(y)(l + v/y)).

    The smoothed weight satisfies Vigneras's equation with k_0 = 0, so the
    y^{-k_0/2} prefactor is 1."""
    return _evaluate(lattice, poly.wall_set, poly, pt, policy, "hat")
