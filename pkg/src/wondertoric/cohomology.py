"""Integer cohomology of smooth complete toric varieties.

Rings are presented on named degree-2 generators with homogeneous integer
relations.  All graded queries reduce to exact integer linear algebra on one
graded slice at a time: no Groebner machinery, no rational arithmetic in the
quotients.

Polynomials are dicts mapping exponent tuples (one slot per generator) to
integer coefficients; `canon_terms` freezes them for storage.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotValidated
from .fans import induced_fan, rays_in_kernel, validate_complete, validate_smooth
from .lattice import elementary_divisors, xgcd

# ---------------------------------------------------------------------------
# polynomial helpers


def pzero():
    return {}


def pconst(c, nvars):
    return {(0,) * nvars: int(c)} if c else {}


def pvar(i, nvars, coeff=1):
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): int(coeff)}


def padd(a, b):
    out = dict(a)
    for e, c in b.items():
        c2 = out.get(e, 0) + c
        if c2:
            out[e] = c2
        else:
            out.pop(e, None)
    return out


def pscale(a, c):
    c = int(c)
    if not c:
        return {}
    return {e: c * v for e, v in a.items()}


def pmul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def pmul_mono(a, exps, coeff=1):
    return {tuple(x + y for x, y in zip(e, exps)): c * coeff for e, c in a.items()}


def ppow(a, k, nvars):
    out = pconst(1, nvars)
    for _ in range(k):
        out = pmul(out, a)
    return out


def pdegree(a):
    degs = {sum(e) for e in a}
    if len(degs) > 1:
        raise ValueError("polynomial is not homogeneous: degrees %r" % sorted(degs))
    return degs.pop() if degs else 0


def psplit(a):
    parts = {}
    for e, c in a.items():
        parts.setdefault(sum(e), {})[e] = c
    return parts


def canon_terms(a):
    return tuple(sorted((e, c) for e, c in a.items() if c))


def from_terms(terms):
    return {tuple(e): int(c) for e, c in terms if c}


# ---------------------------------------------------------------------------
# incremental integer row echelon


class RowEchelon:
    """Integer row-echelon accumulator over a fixed number of columns.

    Rows can be inserted one at a time; the stored rows always span the same
    lattice as everything inserted.  back_reduce() turns them into the
    canonical HNF of that lattice.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self.pivots = {}
        self._reduced = True

    @property
    def rank(self):
        return len(self.pivots)

    def insert(self, row):
        row = list(row)
        while True:
            j = next((k for k, x in enumerate(row) if x), None)
            if j is None:
                return
            if j not in self.pivots:
                if row[j] < 0:
                    row = [-x for x in row]
                self.pivots[j] = row
                self._reduced = False
                return
            p = self.pivots[j]
            if row[j] % p[j] == 0:
                q = row[j] // p[j]
                row = [x - q * y for x, y in zip(row, p)]
            else:
                g, a, b = xgcd(p[j], row[j])
                pj, rj = p[j] // g, row[j] // g
                self.pivots[j] = [a * x + b * y for x, y in zip(p, row)]
                row = [-rj * x + pj * y for x, y in zip(p, row)]
                self._reduced = False

    def back_reduce(self):
        if self._reduced:
            return
        cols = sorted(self.pivots)
        for pos in range(len(cols) - 1, -1, -1):
            j = cols[pos]
            for j2 in cols[pos + 1 :]:
                p2 = self.pivots[j2]
                q = self.pivots[j][j2] // p2[j2]
                if q:
                    self.pivots[j] = [
                        x - q * y for x, y in zip(self.pivots[j], p2)
                    ]
        self._reduced = True

    def hnf_rows(self):
        self.back_reduce()
        return [tuple(self.pivots[j]) for j in sorted(self.pivots)]

    def reduce_vector(self, vec):
        self.back_reduce()
        v = list(vec)
        for j in sorted(self.pivots):
            p = self.pivots[j]
            q = v[j] // p[j]
            if q:
                v = [x - q * y for x, y in zip(v, p)]
        return v

    def contains(self, vec):
        return all(x == 0 for x in self.reduce_vector(vec))

    def torsion(self):
        """Elementary divisors > 1 of the row lattice (torsion of the
        quotient restricted to the pivot-supported part)."""
        rows = self.hnf_rows()
        if all(row[j] == 1 for row, j in zip(rows, sorted(self.pivots))):
            return ()
        return tuple(d for d in elementary_divisors(rows) if d != 1)


# ---------------------------------------------------------------------------
# graded rings


@dataclass(frozen=True)
class RingElement:
    ring: "GradedRing"
    terms: tuple

    def is_zero(self):
        return not self.terms

    def poly(self):
        return from_terms(self.terms)


class GradedRing:
    """Z-algebra on named degree-2 generators modulo homogeneous relations.

    `eliminate` lists generator indices removed via the degree-1 relations;
    `substitutions` maps each of them to its expression in the surviving
    generators.  Slice tables are cached per degree.
    """

    def __init__(self, names, relations, eliminate=(), substitutions=None, fan=None):
        self.names = tuple(names)
        self.nvars = len(self.names)
        rels = []
        for r in relations:
            p = dict(r) if isinstance(r, dict) else from_terms(r)
            pdegree(p)  # homogeneity check
            rels.append(canon_terms(p))
        self.relations = tuple(rels)
        self.eliminate = tuple(eliminate)
        self.substitutions = {int(v): dict(p) for v, p in (substitutions or {}).items()}
        assert set(self.substitutions) == set(self.eliminate)
        self.fan = fan
        self.surviving = tuple(i for i in range(self.nvars) if i not in set(eliminate))
        self._subbed = None
        self._tables = {}
        self._powers = {}

    # -- substitution ------------------------------------------------------

    def _power(self, var, k):
        key = (var, k)
        if key not in self._powers:
            self._powers[key] = ppow(self.substitutions[var], k, self.nvars)
        return self._powers[key]

    def substitute(self, p):
        """Rewrite a polynomial in the surviving generators only."""
        out = {}
        for e, c in p.items():
            if len(e) != self.nvars:
                raise ValueError("exponent length mismatch")
            base = [0] * self.nvars
            factor = None
            for i, k in enumerate(e):
                if not k:
                    continue
                if i in self.substitutions:
                    piece = self._power(i, k)
                    factor = piece if factor is None else pmul(factor, piece)
                else:
                    base[i] = k
            term = {tuple(base): c}
            if factor is not None:
                term = pmul_mono(factor, tuple(base), c)
            out = padd(out, term)
        return out

    def substituted_relations(self):
        if self._subbed is None:
            subbed = []
            for r in self.relations:
                s = self.substitute(from_terms(r))
                if s:
                    subbed.append(canon_terms(s))
            self._subbed = tuple(subbed)
        return self._subbed

    # -- graded slices -------------------------------------------------------

    def monomials(self, d):
        """Canonical list of degree-d exponent tuples in surviving vars."""
        out = []
        for combo in itertools.combinations_with_replacement(self.surviving, d):
            e = [0] * self.nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
        return out

    def slice_table(self, d):
        if d not in self._tables:
            momos = self.monomials(d)
            index = {e: k for k, e in enumerate(momos)}
            ech = RowEchelon(len(momos))
            for r in self.substituted_relations():
                p = from_terms(r)
                e = pdegree(p)
                if e > d:
                    continue
                for shift in self.monomials(d - e):
                    shifted = pmul_mono(p, shift)
                    row = [0] * len(momos)
                    for exp, c in shifted.items():
                        row[index[exp]] = c
                    ech.insert(row)
            self._tables[d] = (momos, index, ech)
        return self._tables[d]

    def vector_of(self, p, d):
        momos, index, _ = self.slice_table(d)
        row = [0] * len(momos)
        for e, c in p.items():
            row[index[e]] = c
        return row

    def normal_form(self, p):
        """Canonical representative: substitute, then reduce each homogeneous
        part against the HNF of its relation slice."""
        if isinstance(p, RingElement):
            p = p.poly()
        s = self.substitute(p)
        out = {}
        for d, part in psplit(s).items():
            momos, _, ech = self.slice_table(d)
            reduced = ech.reduce_vector(self.vector_of(part, d))
            for e, c in zip(momos, reduced):
                if c:
                    out[e] = c
        return RingElement(self, canon_terms(out))

    def is_zero(self, p):
        return self.normal_form(p).is_zero()

    def graded_rank(self, d):
        momos, _, ech = self.slice_table(d)
        return len(momos) - ech.rank

    def graded_torsion(self, d):
        return self.slice_table(d)[2].torsion()


# ---------------------------------------------------------------------------
# toric constructions


def minimal_nonfaces(f):
    """Inclusion-minimal ray sets spanning no cone; sizes are at most n+1
    since every proper subset of a minimal non-face is a face."""
    faces = set()
    for c in f.max_cones:
        for k in range(len(c) + 1):
            faces.update(itertools.combinations(c, k))
    out = []
    nrays = len(f.rays)
    for size in range(2, f.rank + 2):
        for s in itertools.combinations(range(nrays), size):
            if s in faces:
                continue
            if all(s[:k] + s[k + 1 :] in faces for k in range(size)):
                out.append(s)
    return tuple(out)


def toric_elimination(f):
    """Eliminate the variables of the lexicographically first max cone using
    the degree-1 relations.  Returns (eliminated indices, substitutions)."""
    if not f.max_cones:
        return (), {}
    ref = min(f.max_cones)
    if not ref:
        return (), {}
    n = f.rank
    rest = [i for i in range(len(f.rays)) if i not in set(ref)]
    # solve A x_ref = -B x_rest with A the ref-ray column matrix
    A = [[Fraction(f.rays[j][i]) for j in ref] for i in range(n)]
    B = [[Fraction(f.rays[j][i]) for j in rest] for i in range(n)]
    aug = [A[i] + B[i] for i in range(n)]
    for col in range(len(ref)):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        aug[col] = [x / aug[col][col] for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                aug[i] = [x - aug[i][col] * y for x, y in zip(aug[i], aug[col])]
    subst = {}
    nvars = len(f.rays)
    for pos, var in enumerate(ref):
        p = {}
        for k, r in enumerate(rest):
            val = -aug[pos][len(ref) + k]
            assert val.denominator == 1  # smooth cone: unimodular system
            if val:
                e = [0] * nvars
                e[r] = 1
                p[tuple(e)] = int(val)
        subst[var] = p
    return tuple(ref), subst


def danilov_ring(f):
    """Presentation of the integer cohomology of the toric variety of a
    validated smooth complete fan, on one generator per ray."""
    smooth = validate_smooth(f)
    complete = validate_complete(f)
    if not (smooth.ok and complete.ok):
        raise NotValidated(
            "fan must be smooth and complete: %r" % (smooth.failures + complete.failures,)
        )
    nvars = len(f.rays)
    names = tuple("c:%d" % i for i in range(nvars))
    relations = []
    for s in minimal_nonfaces(f):
        e = [0] * nvars
        for i in s:
            e[i] += 1
        relations.append({tuple(e): 1})
    for i in range(f.rank):
        p = {}
        for r in range(nvars):
            if f.rays[r][i]:
                e = [0] * nvars
                e[r] = 1
                p[tuple(e)] = f.rays[r][i]
        relations.append(p)
    eliminate, subst = toric_elimination(f)
    return GradedRing(names, relations, eliminate, subst, fan=f)


def h_vector_oracle(f):
    """h-vector straight from the face counts of the fan."""
    from math import comb

    n = f.rank
    faces = set()
    for c in f.max_cones:
        for k in range(len(c) + 1):
            faces.update(itertools.combinations(c, k))
    count = {}
    for s in faces:
        count[len(s)] = count.get(len(s), 0) + 1
    out = []
    for k in range(n + 1):
        h = 0
        for i in range(k + 1):
            h += (-1) ** (k - i) * comb(n - i, k - i) * count.get(i, 0)
        out.append(h)
    return tuple(out)


@dataclass(frozen=True)
class RingMap:
    source: GradedRing
    target: GradedRing
    images: tuple  # per source generator: a polynomial in target vars, or None

    def apply(self, p):
        if isinstance(p, RingElement):
            p = p.poly()
        out = {}
        for e, c in p.items():
            term = pconst(c, self.target.nvars)
            dead = False
            for i, k in enumerate(e):
                if not k:
                    continue
                if self.images[i] is None:
                    dead = True
                    break
                term = pmul(term, ppow(self.images[i], k, self.target.nvars))
            if not dead:
                out = padd(out, term)
        return out


def restriction_map(ring, lat, f):
    """Surjection onto the cohomology of the layer closure: c_r keeps its
    class when the ray survives into the induced fan, dies otherwise."""
    sub_fan = induced_fan(f, lat)
    target = danilov_ring(sub_fan)
    inside = sorted(rays_in_kernel(f, lat))
    position = {r: k for k, r in enumerate(inside)}
    images = []
    for r in range(len(f.rays)):
        if r in position:
            images.append(pvar(position[r], target.nvars))
        else:
            images.append(None)
    return target, RingMap(ring, target, tuple(images))


def kernel_lattice(rmap, d):
    """HNF basis of the degree-d part of the full kernel lattice: source
    slice vectors whose image lands in the target relation span."""
    from .lattice import hermite_normal_form, kernel_basis

    src, tgt = rmap.source, rmap.target
    src_momos, _, src_ech = src.slice_table(d)
    tgt_momos, tgt_index, tgt_ech = tgt.slice_table(d)
    cols = []
    for e in src_momos:
        image = tgt.substitute(rmap.apply({e: 1}))
        col = [0] * len(tgt_momos)
        for exp, c in image.items():
            col[tgt_index[exp]] = c
        cols.append(col)
    rel_rows = tgt_ech.hnf_rows()
    # kernel of [images | -relations] projected onto the source coordinates
    width = len(src_momos) + len(rel_rows)
    mat = []
    for row_idx in range(len(tgt_momos)):
        row = [cols[j][row_idx] for j in range(len(src_momos))]
        row += [-r[row_idx] for r in rel_rows]
        mat.append(row)
    ker = kernel_basis(mat, width)
    projected = [row[: len(src_momos)] for row in ker]
    return hermite_normal_form(projected)


def ideal_slice(ring, extra_gens, d):
    """HNF of the degree-d span of the ring's relations plus extra ideal
    generators (given as polynomials)."""
    momos, index, ech = ring.slice_table(d)
    full = RowEchelon(len(momos))
    for row in ech.hnf_rows():
        full.insert(list(row))
    for g in extra_gens:
        p = ring.substitute(g)
        if not p:
            continue
        e = pdegree(p)
        if e > d:
            continue
        for shift in ring.monomials(d - e):
            shifted = pmul_mono(p, shift)
            row = [0] * len(momos)
            for exp, c in shifted.items():
                row[index[exp]] = c
            full.insert(row)
    return tuple(full.hnf_rows())


def restriction_kernel_report(rmap, kernel_gens, max_degree):
    """Check that the stated generators span the kernel of the restriction in
    every degree up to max_degree.  Exact lattice comparison, no ranks."""
    from .fans import Report

    bad = []
    for d in range(1, max_degree + 1):
        got = tuple(kernel_lattice(rmap, d))
        want = ideal_slice(rmap.source, kernel_gens, d)
        if got != want:
            bad.append(("kernel_mismatch", d))
    return Report(not bad, tuple(bad))
