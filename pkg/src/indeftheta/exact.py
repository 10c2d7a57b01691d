"""Exact linear algebra over the rationals.

Everything lattice-level in this package (signatures, radicals, discriminant
groups, edge classification, copositivity) is decided here with Fraction
arithmetic; floating point enters only at the quadrature/theta boundary.
Matrices are lists of lists of Fraction, vectors are lists of Fraction.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import DegenerateForm, UnsupportedDimension

Vec = list[Fraction]
Mat = list[list[Fraction]]


def fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def vec(xs: Iterable) -> Vec:
    return [fr(x) for x in xs]


def mat(rows: Iterable[Iterable]) -> Mat:
    return [[fr(x) for x in row] for row in rows]


def mat_vec(a: Mat, v: Sequence[Fraction]) -> Vec:
    return [sum((aij * vj for aij, vj in zip(row, v)), Fraction(0)) for row in a]


def mat_mul(a: Mat, b: Mat) -> Mat:
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)]
            for i in range(n)]


def transpose(a: Mat) -> Mat:
    return [list(col) for col in zip(*a)]


def identity(n: int) -> Mat:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def is_symmetric(a: Mat) -> bool:
    n = len(a)
    return all(len(row) == n for row in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(n)
    )


def determinant(a: Mat) -> Fraction:
    """Gaussian elimination with exact pivots."""
    n = len(a)
    m = [row[:] for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def inverse(a: Mat) -> Mat:
    n = len(a)
    m = [row[:] + ident_row for row, ident_row in zip([r[:] for r in a], identity(n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise DegenerateForm("matrix not invertible")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def solve(a: Mat, b: Vec) -> Vec | None:
    """One solution of a x = b, or None if inconsistent (a may be singular)."""
    n, m = len(a), len(a[0])
    aug = [a[i][:] + [b[i]] for i in range(n)]
    piv_cols: list[int] = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    for i in range(r, n):
        if aug[i][m] != 0:
            return None
    x = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][m]
    return x


def kernel_basis(a: Mat) -> list[Vec]:
    """Basis of the rational null space of a."""
    if not a:
        return []
    n, m = len(a), len(a[0])
    red = [row[:] for row in a]
    piv_cols: list[int] = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if red[i][c] != 0), None)
        if piv is None:
            continue
        red[r], red[piv] = red[piv], red[r]
        inv = 1 / red[r][c]
        red[r] = [x * inv for x in red[r]]
        for i in range(n):
            if i != r and red[i][c] != 0:
                f = red[i][c]
                red[i] = [x - f * y for x, y in zip(red[i], red[r])]
        piv_cols.append(c)
        r += 1
        if r == n:
            break
    basis = []
    free = [c for c in range(m) if c not in piv_cols]
    for fc in free:
        v = [Fraction(0)] * m
        v[fc] = Fraction(1)
        for i, pc in enumerate(piv_cols):
            v[pc] = -red[i][fc]
        basis.append(v)
    return basis


def inertia(gram: Mat) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts of a symmetric rational
    matrix, by exact congruence diagonalisation."""
    n = len(gram)
    m = [row[:] for row in gram]
    pos = neg = zero = 0
    idx = list(range(n))

    def swap(i, j):
        m[i], m[j] = m[j], m[i]
        for row in m:
            row[i], row[j] = row[j], row[i]

    k = 0
    while k < n:
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][i] != 0), None)
            if piv is not None:
                swap(k, piv)
            else:
                off = next(((i, j) for i in range(k, n) for j in range(i + 1, n)
                            if m[i][j] != 0), None)
                if off is None:
                    zero += n - k
                    break
                i, j = off
                # row/col combination makes a nonzero diagonal entry
                for col in range(n):
                    m[i][col] += m[j][col]
                for row in range(n):
                    row_i = m[row]
                    row_i[i] += row_i[j]
                if i != k:
                    swap(k, i)
        d = m[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for r in range(k + 1, n):
            if m[r][k] != 0:
                f = m[r][k] / d
                for col in range(n):
                    m[r][col] -= f * m[k][col]
                for row in range(n):
                    m[row][r] -= f * m[row][k]
        k += 1
    del idx
    return pos, neg, zero


def smith_normal_form(a_int: list[list[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix: returns (d, u, v) with
    u a v = d, u and v unimodular, d diagonal with d[i][i] | d[i+1][i+1]."""
    a = [row[:] for row in a_int]
    n, m = len(a), len(a[0])
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    v = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_op(i, j, f):  # row_i -= f*row_j
        a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        u[i] = [x - f * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, f):  # col_i -= f*col_j
        for row in a:
            row[i] -= f * row[j]
        for row in v:
            row[i] -= f * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(n, m):
        # find pivot of minimal absolute value
        entries = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, m)
                   if a[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        again = True
        while again:
            again = False
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                        again = True
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        again = True
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    # enforce divisibility chain
    r = min(n, m)
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            for j in range(i + 1, r):
                bad = (a[j][j] % a[i][i] != 0) if a[i][i] != 0 else (a[j][j] != 0)
                if bad:
                    col_op(i, j, -1)  # mix the two diagonal entries
                    smith_2x2_fix(a, u, v, i, j)
                    changed = True
    return a, u, v


def smith_2x2_fix(a, u, v, i, j):
    """Local re-reduction used by the divisibility pass of the SNF."""
    def row_op(r, s, f):
        a[r] = [x - f * y for x, y in zip(a[r], a[s])]
        u[r] = [x - f * y for x, y in zip(u[r], u[s])]

    def col_op(r, s, f):
        for row in a:
            row[r] -= f * row[s]
        for row in v:
            row[r] -= f * row[s]

    while a[j][i] != 0 or a[i][j] != 0:
        if a[j][i] != 0:
            q = a[j][i] // a[i][i]
            row_op(j, i, q)
            if a[j][i] != 0:
                a[i], a[j] = a[j], a[i]
                u[i], u[j] = u[j], u[i]
        if a[i][j] != 0:
            q = a[i][j] // a[i][i]
            col_op(j, i, q)
            if a[i][j] != 0:
                for row in a:
                    row[i], row[j] = row[j], row[i]
                for row in v:
                    row[i], row[j] = row[j], row[i]
    if a[i][i] < 0:
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
    if a[j][j] < 0:
        a[j] = [-x for x in a[j]]
        u[j] = [-x for x in u[j]]


def integer_kernel_basis(a_int: list[list[int]]) -> list[list[int]]:
    """Z-basis of {x in Z^m : a x = 0} (saturated by construction)."""
    if not a_int:
        return []
    d, _u, v = smith_normal_form(a_int)
    m = len(a_int[0])
    rank = sum(1 for i in range(min(len(d), m)) if i < len(d) and d[i][i] != 0)
    cols = []
    for j in range(rank, m):
        cols.append([v[i][j] for i in range(m)])
    return cols


def vector_content(g: Sequence[Fraction]) -> Fraction:
    """Positive generator of the additive group sum Z*g_i (0 if g = 0)."""
    den = 1
    for x in g:
        x = fr(x)
        den = den * x.denominator // gcd(den, x.denominator)
    num = 0
    for x in g:
        num = gcd(num, int(fr(x) * den))
    return Fraction(num, den)


def primitivize(g: Sequence[Fraction]) -> list[int]:
    """Scale a nonzero rational vector to a primitive integer vector."""
    c = vector_content(g)
    if c == 0:
        raise ValueError("zero vector")
    return [int(fr(x) / c) for x in g]


# ---------------------------------------------------------------------------
# strict/nonstrict linear feasibility by Fourier-Motzkin (desk-scale dims)
# ---------------------------------------------------------------------------

def _fm_eliminate(ineqs: list[tuple[Vec, Fraction, bool]], k: int):
    """Eliminate variable k from constraints (c, b, strict): c.x <(=) b."""
    zero, pos, neg = [], [], []
    for c, b, s in ineqs:
        if c[k] == 0:
            zero.append((c, b, s))
        elif c[k] > 0:
            pos.append((c, b, s))
        else:
            neg.append((c, b, s))
    out = list(zero)
    for cp, bp, sp in pos:
        for cn, bn, sn in neg:
            f_p, f_n = -cn[k], cp[k]
            c = [f_p * x + f_n * y for x, y in zip(cp, cn)]
            b = f_p * bp + f_n * bn
            out.append((c, b, sp or sn))
    return out


def feasible_point(ineqs: list[tuple[Vec, Fraction, bool]], nvars: int) -> Vec | None:
    """A rational point satisfying all constraints c.x <(=) b, or None."""
    systems = [ineqs]
    for k in range(nvars):
        systems.append(_fm_eliminate(systems[-1], k))
    for c, b, s in systems[-1]:
        if (b < 0) or (s and b == 0):
            return None
    point: Vec = []
    for k in reversed(range(nvars)):
        sys_k = systems[k]
        lo, lo_strict, hi, hi_strict = None, False, None, False
        for c, b, s in sys_k:
            if c[k] == 0:
                continue
            rest = sum((c[j] * point[j - k - 1] for j in range(k + 1, nvars)),
                       Fraction(0))
            bound = (b - rest) / c[k]
            if c[k] > 0:
                if hi is None or bound < hi or (bound == hi and s):
                    hi, hi_strict = bound, s
            else:
                if lo is None or bound > lo or (bound == lo and s):
                    lo, lo_strict = bound, s
        if lo is None and hi is None:
            x = Fraction(0)
        elif lo is None:
            x = hi - 1 if hi_strict else hi
        elif hi is None:
            x = lo + 1 if lo_strict else lo
        else:
            x = (lo + hi) / 2
            if x == lo and not lo_strict:
                x = lo
        point.insert(0, x)
    # verify (cheap; guards midpoint edge cases)
    for c, b, s in ineqs:
        val = sum((ci * xi for ci, xi in zip(c, point)), Fraction(0))
        if val > b or (s and val == b):
            return None
    return point


def strict_positive_point(rows: list[Vec]) -> Vec | None:
    """A rational v with row.v > 0 for every row, or None.

    Homogeneous strict feasibility is equivalent to row.v >= 1 by scaling.
    """
    nvars = len(rows[0])
    ineqs = [([-x for x in row], Fraction(-1), False) for row in rows]
    return feasible_point(ineqs, nvars)


def all_negative_solution(particular: Vec, kernel: list[Vec]) -> Vec | None:
    """Some u = particular + span(kernel) with every component < 0, or None."""
    n = len(particular)
    kd = len(kernel)
    if kd == 0:
        return particular if all(x < 0 for x in particular) else None
    # constraints: particular_i + sum_j t_j kernel_j_i < 0
    ineqs = [([kernel[j][i] for j in range(kd)], -particular[i], True)
             for i in range(n)]
    t = feasible_point(ineqs, kd)
    if t is None:
        return None
    return [particular[i] + sum((t[j] * kernel[j][i] for j in range(kd)),
                                Fraction(0)) for i in range(n)]


# ---------------------------------------------------------------------------
# copositivity of a symmetric rational matrix over the nonnegative orthant
# ---------------------------------------------------------------------------

def copositive_witness(q: Mat) -> Vec | None:
    """None if x^T q x >= 0 for all x >= 0; else an x >= 0 with negative value.

    KKT/face enumeration: a negative minimum on the standard simplex is
    attained in the relative interior of some face S, where q_S u = 1_S has a
    componentwise-negative solution u; the witness is x_S = u / sum(u).
    """
    k = len(q)
    if k > 8:
        raise UnsupportedDimension("exact copositivity supported up to 8 rays")
    for mask in range(1, 1 << k):
        idx = [i for i in range(k) if mask >> i & 1]
        qs = [[q[i][j] for j in idx] for i in idx]
        ones = [Fraction(1)] * len(idx)
        part = solve(qs, ones)
        if part is None:
            continue
        ker = kernel_basis(qs)
        u = all_negative_solution(part, ker)
        if u is not None:
            s = sum(u)
            x = [Fraction(0)] * k
            for pos_i, i in enumerate(idx):
                x[i] = u[pos_i] / s
            return x
    return None


# ---------------------------------------------------------------------------
# rational isotropy (Witt index ingredients), dimensions <= 3
# ---------------------------------------------------------------------------

def _squarefree_part(n: int) -> int:
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    d = 2
    while d * d <= n:
        cnt = 0
        while n % d == 0:
            n //= d
            cnt += 1
        if cnt % 2:
            out *= d
        d += 1
    return sign * out * n


def is_rational_square(x: Fraction) -> bool:
    if x < 0:
        return False
    return _squarefree_part(x.numerator) == 1 and _squarefree_part(x.denominator) in (0, 1)


def _is_qr(a: int, m: int) -> bool:
    """Is a a square modulo m (m squarefree positive)?"""
    a %= m
    return any((x * x - a) % m == 0 for x in range(m))


def diagonalize_form(gram: Mat) -> list[Fraction]:
    """Diagonal entries of a congruence-diagonalisation of a symmetric matrix."""
    n = len(gram)
    m = [row[:] for row in gram]
    diag: list[Fraction] = []
    k = 0
    while k < n:
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][i] != 0), None)
            if piv is not None:
                m[k], m[piv] = m[piv], m[k]
                for row in m:
                    row[k], row[piv] = row[piv], row[k]
            else:
                off = next(((i, j) for i in range(k, n) for j in range(i + 1, n)
                            if m[i][j] != 0), None)
                if off is None:
                    diag.extend([Fraction(0)] * (n - k))
                    break
                i, j = off
                for col in range(n):
                    m[i][col] += m[j][col]
                for row in m:
                    row[i] += row[j]
                if i != k:
                    m[k], m[i] = m[i], m[k]
                    for row in m:
                        row[k], row[i] = row[i], row[k]
        d = m[k][k]
        diag.append(d)
        for r in range(k + 1, n):
            if m[r][k] != 0:
                f = m[r][k] / d
                for col in range(n):
                    m[r][col] -= f * m[k][col]
                for row in m:
                    row[r] -= f * row[k]
        k += 1
    return diag


def form_is_isotropic(gram: Mat) -> bool:
    """Does the nondegenerate rational form represented by gram have a
    nontrivial rational zero?  Supported up to dimension 3."""
    diag = [d for d in diagonalize_form(gram) if d != 0]
    n = len(diag)
    if n != len(gram):
        return True  # degenerate: radical vectors are isotropic
    if n <= 1:
        return False
    pos = sum(1 for d in diag if d > 0)
    if pos == 0 or pos == n:
        return False
    if n == 2:
        # a x^2 + b y^2 isotropic iff -b/a is a square
        return is_rational_square(-diag[1] / diag[0])
    if n == 3:
        return _legendre_ternary(diag)
    raise UnsupportedDimension("rational isotropy implemented up to dim 3")


def _legendre_ternary(diag: list[Fraction]) -> bool:
    """Legendre's criterion for a x^2 + b y^2 + c z^2 = 0."""
    # scale to squarefree pairwise-coprime integers
    coeffs = []
    for d in diag:
        coeffs.append(_squarefree_part(d.numerator * d.denominator))
    a, b, c = coeffs
    # remove common factors pairwise: a prime dividing two coefficients can be
    # divided out after multiplying the third by it (preserves equivalence)
    changed = True
    while changed:
        changed = False
        for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
            g = gcd(abs(coeffs[i]), abs(coeffs[j]))
            if g > 1:
                coeffs[i] //= g
                coeffs[j] //= g
                coeffs[k] = _squarefree_part(coeffs[k] * g)
                changed = True
    a, b, c = coeffs
    if a > 0 and b > 0 and c > 0 or (a < 0 and b < 0 and c < 0):
        return False
    return (_is_qr(-b * c, abs(a)) and _is_qr(-a * c, abs(b))
            and _is_qr(-a * b, abs(c)))


def witt_index_real(gram: Mat) -> int:
    pos, neg, zero = inertia(gram)
    return min(pos, neg) + zero


def max_isotropic_dimension_rational(gram: Mat) -> int:
    """Dimension of a maximal totally isotropic rational subspace.

    Radical plus the Witt index of the nondegenerate part (supported for
    nondegenerate part of dimension <= 3, where the index is 0 or 1).
    """
    pos, neg, zero = inertia(gram)
    nondeg_dim = pos + neg
    if min(pos, neg) == 0:
        return zero
    if nondeg_dim > 3:
        raise UnsupportedDimension(
            "rational Witt decomposition implemented for nondegenerate part <= 3")
    # restrict to a complement of the radical: diagonalise and drop zeros
    diag = [d for d in diagonalize_form(gram) if d != 0]
    sub = [[Fraction(0)] * len(diag) for _ in diag]
    for i, d in enumerate(diag):
        sub[i][i] = d
    return zero + (1 if form_is_isotropic(sub) else 0)


def congruence_diagonalize(gram: Mat) -> tuple[list[Fraction], Mat]:
    """(diag, vectors): vectors[i]^T gram vectors[j] = diag[i] delta_ij."""
    n = len(gram)
    m = [row[:] for row in gram]
    vecs = identity(n)
    k = 0
    while k < n:
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][i] != 0), None)
            if piv is not None:
                m[k], m[piv] = m[piv], m[k]
                vecs[k], vecs[piv] = vecs[piv], vecs[k]
                for row in m:
                    row[k], row[piv] = row[piv], row[k]
            else:
                off = next(((i, j) for i in range(k, n) for j in range(i + 1, n)
                            if m[i][j] != 0), None)
                if off is None:
                    break
                i, j = off
                for col in range(n):
                    m[i][col] += m[j][col]
                vecs[i] = [x + y for x, y in zip(vecs[i], vecs[j])]
                for row in m:
                    row[i] += row[j]
                if i != k:
                    m[k], m[i] = m[i], m[k]
                    vecs[k], vecs[i] = vecs[i], vecs[k]
        d = m[k][k]
        if d != 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    f = m[r][k] / d
                    for col in range(n):
                        m[r][col] -= f * m[k][col]
                    vecs[r] = [x - f * y for x, y in zip(vecs[r], vecs[k])]
                    for row in m:
                        row[r] -= f * row[k]
        k += 1
    return [m[i][i] for i in range(n)], vecs
