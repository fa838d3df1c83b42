"""Exact integer lattice algebra: HNF, SNF, saturation, adapted bases.

Everything here works over plain Python ints (arbitrary precision) and
fractions.Fraction; no floats, no modular shortcuts.  Matrices are lists or
tuples of equal-length integer rows.  All functions are pure and all returned
matrices are tuples of tuples, safe to hash and share.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotContained, NotSaturated


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and g == a*x + b*y."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def freeze(mat):
    return tuple(tuple(int(x) for x in row) for row in mat)


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    if not a:
        return []
    n = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def is_zero_row(row):
    return all(x == 0 for x in row)


def hermite_normal_form(mat, *, transform=False):
    """Row-style Hermite normal form of an integer matrix.

    Returns H, the canonical basis of the row lattice: pivot columns strictly
    increase, pivots are positive, entries above a pivot are reduced into
    [0, pivot).  Zero rows are dropped.  With transform=True also returns a
    unimodular U with U * mat == [H; zero rows].
    """
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m) if transform else None
    r = 0
    for j in range(n):
        # gather a pivot for column j among rows r..m-1
        piv = None
        for i in range(r, m):
            if a[i][j]:
                piv = i
                break
        if piv is None:
            continue
        for i in range(piv + 1, m):
            if a[i][j] == 0:
                continue
            g, x, y = xgcd(a[piv][j], a[i][j])
            p, q = a[piv][j] // g, a[i][j] // g
            # unimodular 2x2 op: new piv row spans gcd, other row cleared
            a[piv], a[i] = (
                [x * s + y * t for s, t in zip(a[piv], a[i])],
                [-q * s + p * t for s, t in zip(a[piv], a[i])],
            )
            if transform:
                u[piv], u[i] = (
                    [x * s + y * t for s, t in zip(u[piv], u[i])],
                    [-q * s + p * t for s, t in zip(u[piv], u[i])],
                )
        if a[piv][j] < 0:
            a[piv] = [-x for x in a[piv]]
            if transform:
                u[piv] = [-x for x in u[piv]]
        a[r], a[piv] = a[piv], a[r]
        if transform:
            u[r], u[piv] = u[piv], u[r]
        p = a[r][j]
        for i in range(r):
            q = a[i][j] // p
            if q:
                a[i] = [s - q * t for s, t in zip(a[i], a[r])]
                if transform:
                    u[i] = [s - q * t for s, t in zip(u[i], u[r])]
        r += 1
    h = freeze(a[:r])
    if transform:
        return h, freeze(u)
    return h


def smith_normal_form(mat):
    """Smith normal form with transforms: U * mat * V == D.

    U and V are unimodular; D is diagonal with nonnegative entries and
    d1 | d2 | ... .  Pivot selection is deterministic: smallest nonzero
    absolute value, ties broken by lowest row then column index.
    Returns (U, D, V, Vinv) with Vinv the exact integer inverse of V.
    """
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u = identity(m)
    v = identity(n)
    vinv = identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        # col_dst += q * col_src; Vinv gets the inverse op on rows
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]
        vinv[src] = [x - q * y for x, y in zip(vinv[src], vinv[dst])]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < m and t < n:
        # deterministic pivot: min |value|, then row, then column
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            moved = False
            for i in range(t + 1, m):
                if a[i][t]:
                    swap_rows(t, i)
                    moved = True
                    break
            if moved:
                continue
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            moved = False
            for j in range(t + 1, n):
                if a[t][j]:
                    swap_cols(t, j)
                    moved = True
                    break
            if moved:
                continue
            break
        if a[t][t] < 0:
            negate_row(t)
        # enforce divisibility of the remaining block by the pivot
        bad = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(t, bad, 1)
            continue
        t += 1
    return freeze(u), freeze(a), freeze(v), freeze(vinv)


def elementary_divisors(mat):
    """Nonzero diagonal of the Smith form."""
    _, d, _, _ = smith_normal_form(mat)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i]:
            out.append(d[i][i])
    return tuple(out)


def det(mat):
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(mat)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k]), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def kernel_basis(mat, n=None):
    """HNF basis of the integer right kernel {v : mat @ v == 0} as rows."""
    m = len(mat)
    if n is None:
        n = len(mat[0]) if m else 0
    if m == 0:
        return hermite_normal_form(identity(n))
    _, d, v, _ = smith_normal_form(mat)
    rank = sum(1 for i in range(min(m, n)) if d[i][i])
    cols = [[v[i][j] for i in range(n)] for j in range(rank, n)]
    return hermite_normal_form(cols)


def solve_in_lattice(basis, target):
    """Integer coords of target in the row lattice of basis, or None.

    basis rows need not be in HNF but must be linearly independent.
    """
    if not basis:
        return () if is_zero_row(target) else None
    h, u = hermite_normal_form(basis, transform=True)
    if len(h) != len(basis):
        raise ValueError("basis rows are dependent")
    t = list(map(int, target))
    coeffs = [0] * len(h)
    for i, row in enumerate(h):
        j = next(k for k, x in enumerate(row) if x)
        if t[j] % row[j]:
            return None
        q = t[j] // row[j]
        coeffs[i] = q
        t = [s - q * x for s, x in zip(t, row)]
    if not is_zero_row(t):
        return None
    return tuple(sum(coeffs[i] * u[i][k] for i in range(len(h))) for k in range(len(basis)))


@dataclass(frozen=True)
class Sublattice:
    """A sublattice of Z^ambient_rank, stored via its canonical HNF basis."""

    ambient_rank: int
    basis: tuple  # tuple of int row tuples, HNF, no zero rows

    @property
    def rank(self):
        return len(self.basis)

    def contains_vector(self, v):
        return solve_in_lattice(self.basis, v) is not None

    def contains(self, other):
        return all(self.contains_vector(row) for row in other.basis)


def sublattice(rows, ambient_rank, *, allow_dependent=False):
    """Build a Sublattice from generating rows (canonicalized via HNF)."""
    rows = [list(map(int, r)) for r in rows]
    for r in rows:
        if len(r) != ambient_rank:
            raise ValueError("row length does not match ambient rank")
    h = hermite_normal_form(rows)
    if not allow_dependent and len(h) != len(rows):
        raise ValueError("generators are linearly dependent")
    return Sublattice(ambient_rank, h)


def span_rows(rows, ambient_rank):
    return sublattice(rows, ambient_rank, allow_dependent=True)


def saturate(lat):
    """Smallest split direct summand of Z^n containing lat."""
    if lat.rank == 0:
        return lat
    _, d, _, vinv = smith_normal_form(lat.basis)
    s = lat.rank
    sat_rows = [list(vinv[i]) for i in range(s)]
    return Sublattice(lat.ambient_rank, hermite_normal_form(sat_rows))


def saturation_index(lat):
    """Index of lat inside its saturation (product of elementary divisors)."""
    idx = 1
    for d in elementary_divisors(lat.basis):
        idx *= d
    return idx


def is_split_summand(lat):
    """True iff Z^n / lat is torsion free (all elementary divisors 1)."""
    return all(d == 1 for d in elementary_divisors(lat.basis))


@dataclass(frozen=True)
class AdaptedBasis:
    """Basis of the larger lattice whose first split_index rows span the smaller."""

    vectors: tuple  # tuple of int row tuples
    split_index: int


def adapted_basis(g_lat, m_lat):
    """Basis b1..bs of g_lat whose first k rows are a basis of m_lat.

    Both lattices must be saturated and m_lat must sit inside g_lat.  The
    result is deterministic: the m-part is m_lat's HNF basis and the
    completion is Hermite-reduced against it.
    """
    if not is_split_summand(g_lat):
        raise NotSaturated("larger lattice is not saturated")
    if not is_split_summand(m_lat):
        raise NotSaturated("smaller lattice is not saturated")
    if not g_lat.contains(m_lat):
        raise NotContained("smaller lattice is not inside the larger one")
    s, k = g_lat.rank, m_lat.rank
    if k == s:
        return AdaptedBasis(m_lat.basis, k)
    if k == 0:
        return AdaptedBasis(g_lat.basis, 0)
    # coordinates of the m basis inside the g basis; saturated, so the
    # coordinate lattice is a split summand of Z^s and completes to a basis
    coords = [solve_in_lattice(g_lat.basis, row) for row in m_lat.basis]
    _, d, _, vinv = smith_normal_form(coords)
    completion = [list(vinv[i]) for i in range(k, s)]
    # Hermite-reduce the completion against the m coordinate pivots
    chnf = hermite_normal_form(coords)
    pivots = [(next(j for j, x in enumerate(row) if x), i) for i, row in enumerate(chnf)]
    reduced = []
    for w in completion:
        w = list(w)
        for j, i in pivots:
            q = w[j] // chnf[i][j]
            if q:
                w = [a - q * b for a, b in zip(w, chnf[i])]
        reduced.append(w)
    vectors = list(m_lat.basis) + [mat_vec(transpose(g_lat.basis), w) for w in reduced]
    return AdaptedBasis(freeze(vectors), k)


def qz(value):
    """Canonical representative of a rational in Q/Z: Fraction in [0, 1)."""
    f = Fraction(value)
    return Fraction(f.numerator % f.denominator, f.denominator)


def solve_torsion_congruences(gens, values, ambient_rank):
    """All torsion characters on the saturation of span(gens) hitting values.

    gens are integer vectors (possibly dependent), values their prescribed
    images in Q/Z.  Characters are returned as tuples of Q/Z values on the
    canonical HNF basis of saturate(span(gens)), sorted; the empty list means
    the constraints are inconsistent.  The number of solutions always equals
    the index of span(gens) inside its saturation.
    """
    gens = [list(map(int, g)) for g in gens]
    values = [qz(v) for v in values]
    if len(gens) != len(values):
        raise ValueError("one value per generator required")
    span = span_rows(gens, ambient_rank)
    if span.rank == 0:
        return [()] if all(v == 0 for v in values) else []
    sat = saturate(span)
    coords = [solve_in_lattice(sat.basis, g) for g in gens]
    u, d, v, _ = smith_normal_form(coords)
    m, s = len(gens), sat.rank
    w = [qz(sum(Fraction(u[i][j]) * values[j] for j in range(m))) for i in range(m)]
    for i in range(s, m):
        if w[i] != 0:
            return []
    divisors = [d[i][i] for i in range(s)]
    sols = []

    def rec(i, ys):
        if i == s:
            x = tuple(
                qz(sum(Fraction(v[row][col]) * ys[col] for col in range(s)))
                for row in range(s)
            )
            sols.append(x)
            return
        base = w[i] / divisors[i]
        for k in range(divisors[i]):
            rec(i + 1, ys + [qz(base + Fraction(k, divisors[i]))])

    rec(0, [])
    return sorted(set(sols))
