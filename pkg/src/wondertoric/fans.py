"""Smooth complete fans: validation, induced fans, stellar subdivision.

A Fan stores primitive integer rays and maximal cones as sorted tuples of ray
indices.  All geometry is exact: sign checks are integer pairings and the
relative-interior tests run a rational phase-1 simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExhausted, MalformedFan, NotCompatible, RayNotInterior
from .lattice import (
    elementary_divisors,
    hermite_normal_form,
    kernel_basis,
    solve_in_lattice,
)


@dataclass(frozen=True)
class Report:
    """Outcome of a validator: ok flag plus a tuple of failure descriptions."""

    ok: bool
    failures: tuple = ()

    def __bool__(self):
        return self.ok


def merge_reports(*reports):
    fails = tuple(f for r in reports for f in r.failures)
    return Report(not fails, fails)


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: tuple  # tuple of primitive int vectors
    max_cones: tuple  # tuple of strictly increasing ray-index tuples

    def ray(self, i):
        return self.rays[i]


def fan(rank, rays, max_cones):
    """Validate structural invariants and build a Fan.

    Raises MalformedFan on any structural defect: non-primitive or repeated
    rays, bad indices, repeated indices inside a cone, non-simplicial cones,
    unused rays, or one max cone contained in another.
    """
    rank = int(rank)
    if rank < 0:
        raise MalformedFan("rank must be nonnegative")
    rays = tuple(tuple(int(x) for x in r) for r in rays)
    for r in rays:
        if len(r) != rank:
            raise MalformedFan("ray length does not match rank: %r" % (r,))
        if all(x == 0 for x in r):
            raise MalformedFan("zero ray")
        if math.gcd(*r) != 1:
            raise MalformedFan("ray not primitive: %r" % (r,))
    if len(set(rays)) != len(rays):
        raise MalformedFan("repeated ray")
    cones = []
    for c in max_cones:
        c = tuple(int(i) for i in c)
        if len(set(c)) != len(c):
            raise MalformedFan("max cone repeats a ray: %r" % (c,))
        if any(i < 0 or i >= len(rays) for i in c):
            raise MalformedFan("ray index out of range: %r" % (c,))
        c = tuple(sorted(c))
        if len(hermite_normal_form([rays[i] for i in c])) != len(c):
            raise MalformedFan("max cone not simplicial: %r" % (c,))
        cones.append(c)
    if len(set(cones)) != len(cones):
        raise MalformedFan("repeated max cone")
    for a, b in itertools.permutations(cones, 2):
        if set(a) < set(b):
            raise MalformedFan("max cone %r contained in %r" % (a, b))
    if rank == 0:
        if rays or list(cones) != [()]:
            raise MalformedFan("rank-0 fan must be the single empty cone")
    else:
        if not cones:
            raise MalformedFan("no max cones")
        used = {i for c in cones for i in c}
        if used != set(range(len(rays))):
            raise MalformedFan("unused rays: %r" % (sorted(set(range(len(rays))) - used),))
    return Fan(rank, rays, tuple(cones))


def fan_to_dict(f):
    return {
        "rank": f.rank,
        "rays": [list(r) for r in f.rays],
        "max_cones": [list(c) for c in f.max_cones],
    }


def fan_from_dict(doc):
    try:
        return fan(doc["rank"], doc["rays"], doc["max_cones"])
    except MalformedFan:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFan("bad fan document: %s" % exc)


def primitive(vec):
    g = math.gcd(*vec)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in vec)


def pairing(chi, ray):
    return sum(int(a) * int(b) for a, b in zip(chi, ray))


def validate_smooth(f):
    """Each max cone's rays must extend to a basis of the ambient lattice."""
    bad = []
    for c in f.max_cones:
        if c and any(d != 1 for d in elementary_divisors([f.rays[i] for i in c])):
            bad.append(("not_smooth", c))
    return Report(not bad, tuple(bad))


def validate_complete(f):
    """Wall criterion: all max cones full-dimensional, every wall shared by
    exactly two of them, and the wall-adjacency graph connected."""
    if f.rank == 0:
        return Report(True)
    bad = []
    for c in f.max_cones:
        if len(c) != f.rank:
            bad.append(("not_full_dimensional", c))
    if bad:
        return Report(False, tuple(bad))
    walls = {}
    for ci, c in enumerate(f.max_cones):
        for drop in c:
            walls.setdefault(tuple(i for i in c if i != drop), []).append(ci)
    for w, owners in sorted(walls.items()):
        if len(owners) != 2:
            bad.append(("wall_count", w, len(owners)))
    if not bad:
        seen = {0}
        frontier = [0]
        adj = {}
        for owners in walls.values():
            if len(owners) == 2:
                a, b = owners
                adj.setdefault(a, set()).add(b)
                adj.setdefault(b, set()).add(a)
        while frontier:
            cur = frontier.pop()
            for nxt in adj.get(cur, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        if len(seen) != len(f.max_cones):
            bad.append(("disconnected", len(seen), len(f.max_cones)))
    return Report(not bad, tuple(bad))


def feasible_nonneg(A, b):
    """Exact feasibility of {x >= 0 : A x = b} via phase-1 simplex.

    A is a list of Fraction/int rows, b a vector.  Bland's rule, so the loop
    always terminates.  Returns True/False.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    rhs = []
    for row, bv in zip(A, b):
        row = [Fraction(x) for x in row]
        bv = Fraction(bv)
        if bv < 0:
            row = [-x for x in row]
            bv = -bv
        rows.append(row)
        rhs.append(bv)
    if m == 0:
        return True
    # tableau columns: n originals + m artificials
    T = [rows[i] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    # objective: minimize sum of artificials; reduced costs start from that
    cost = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n + m + 1):
            cost[j] -= T[i][j]
    for j in range(n, n + m):
        cost[j] += 1
    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            # unbounded phase-1 objective cannot happen; defensive
            return False
        _, pivot_row = best
        piv = T[pivot_row][enter]
        T[pivot_row] = [x / piv for x in T[pivot_row]]
        for i in range(m):
            if i != pivot_row and T[i][enter]:
                coef = T[i][enter]
                T[i] = [x - coef * y for x, y in zip(T[i], T[pivot_row])]
        if cost[enter]:
            coef = cost[enter]
            cost = [x - coef * y for x, y in zip(cost, T[pivot_row])]
        basis[pivot_row] = enter
    return -cost[-1] == 0


def rays_in_kernel(f, lat):
    """Indices of fan rays killed by every character in the sublattice."""
    return frozenset(
        i
        for i, r in enumerate(f.rays)
        if all(pairing(chi, r) == 0 for chi in lat.basis)
    )


def cone_face_compat(f, lat):
    """For each max cone C, {x in C : all of lat vanishes on x} must be the
    face spanned by the rays of C lying in that kernel subspace."""
    inside = rays_in_kernel(f, lat)
    bad = []
    for c in f.max_cones:
        outside = [j for j in c if j not in inside]
        if not outside:
            continue
        # violation iff some x = sum lam_j r_j with lam >= 0, lam_j >= 1 for
        # one outside j, pairing zero against every basis character
        for j in outside:
            k = len(c)
            A = [[Fraction(pairing(chi, f.rays[i])) for i in c] for chi in lat.basis]
            b = [Fraction(-pairing(chi, f.rays[j])) for chi in lat.basis]
            # substitute lam_j = 1 + mu_j
            if feasible_nonneg(A, b):
                bad.append(("interior_meets_kernel", c, j))
                break
    return Report(not bad, tuple(bad))


def equal_sign_check(f, basis):
    """Each basis character must pair with the rays of any single cone using
    one sign only (the sign may differ between cones and characters)."""
    bad = []
    for c in f.max_cones:
        for bi, chi in enumerate(basis):
            vals = [pairing(chi, f.rays[i]) for i in c]
            if any(v > 0 for v in vals) and any(v < 0 for v in vals):
                bad.append(("mixed_signs", c, bi))
    return Report(not bad, tuple(bad))


def find_equal_sign_basis(f, lat, bound=2):
    """Search a basis of lat that passes equal_sign_check, or return None.

    Candidates are integer combinations of the canonical basis with
    coefficients in [0, 1, -1, ..., bound, -bound], enumerated in product
    order, so simple coordinate characters are found first.  A unimodular
    subset of the surviving candidates is then picked greedily.
    """
    s = lat.rank
    if s == 0:
        return ()
    coeff_pool = [0]
    for v in range(1, bound + 1):
        coeff_pool += [v, -v]
    candidates = []
    for combo in itertools.product(coeff_pool, repeat=s):
        combo = combo[::-1]  # vary the first basis coefficient fastest
        if math.gcd(*combo) != 1:
            continue
        chi = tuple(
            sum(c * row[j] for c, row in zip(combo, lat.basis))
            for j in range(lat.ambient_rank)
        )
        if equal_sign_check(f, [chi]).ok:
            candidates.append((combo, chi))
    for subset in itertools.combinations(range(len(candidates)), s):
        mat = [list(candidates[i][0]) for i in subset]
        h = hermite_normal_form(mat)
        if len(h) == s and all(h[i][i] == 1 for i in range(s)):
            return tuple(candidates[i][1] for i in subset)
    return None


def validate_good(f, lattices, bases=None):
    """Smooth + complete + equal-sign basis and face compatibility for every
    arrangement sublattice.  bases may supply a candidate basis per lattice;
    missing ones are searched for."""
    reports = [validate_smooth(f), validate_complete(f)]
    for idx, lat in enumerate(lattices):
        cand = bases[idx] if bases and bases[idx] is not None else find_equal_sign_basis(f, lat)
        if cand is None:
            reports.append(Report(False, (("no_equal_sign_basis", idx),)))
            compat = cone_face_compat(f, lat)
            if not compat.ok:
                reports.append(Report(False, tuple(("lattice", idx) + fl for fl in compat.failures)))
            continue
        es = equal_sign_check(f, cand)
        if not es.ok:
            reports.append(Report(False, tuple(("lattice", idx) + fl for fl in es.failures)))
        compat = cone_face_compat(f, lat)
        if not compat.ok:
            reports.append(Report(False, tuple(("lattice", idx) + fl for fl in compat.failures)))
        # equal-sign success forces face compatibility
        assert not (es.ok and not compat.ok)
    return merge_reports(*reports)


def induced_fan(f, lat):
    """Fan induced on the sublattice of vectors annihilated by lat.

    Cones are the cones of f lying inside that subspace, with rays rewritten
    in the canonical basis of the kernel sublattice.  Requires face
    compatibility; raises NotCompatible otherwise.
    """
    compat = cone_face_compat(f, lat)
    if not compat.ok:
        raise NotCompatible("fan is not compatible with the sublattice: %r" % (compat.failures,))
    if lat.rank == 0:
        return f
    kernel = kernel_basis(lat.basis, lat.ambient_rank)
    new_rank = len(kernel)
    inside = rays_in_kernel(f, lat)
    sub_cones = []
    for c in f.max_cones:
        sc = tuple(i for i in c if i in inside)
        if sc not in sub_cones:
            sub_cones.append(sc)
    maximal = [c for c in sub_cones if not any(set(c) < set(d) for d in sub_cones)]
    if maximal == [()]:
        return fan(0, (), ((),))
    used = sorted({i for c in maximal for i in c})
    new_rays = []
    for i in used:
        y = solve_in_lattice(kernel, f.rays[i])
        assert y is not None
        new_rays.append(y)
    renumber = {old: new for new, old in enumerate(used)}
    cones = sorted(tuple(sorted(renumber[i] for i in c)) for c in maximal)
    return fan(new_rank, new_rays, cones)


def relint_coords(f, cone, vec):
    """Rational coordinates of vec on the cone's rays, or None if outside the
    rational span.  Cone rays are independent so coordinates are unique."""
    rows = [f.rays[i] for i in cone]
    # solve vec = sum x_i rows_i exactly over Q by elimination
    m = len(rows)
    n = f.rank
    aug = [[Fraction(rows[i][j]) for i in range(m)] + [Fraction(vec[j])] for j in range(n)]
    piv_cols = []
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, n) if aug[i][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        aug[r] = [x / aug[r][col] for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][col]:
                aug[i] = [x - aug[i][col] * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(col)
        r += 1
    for i in range(r, n):
        if aug[i][-1]:
            return None
    coords = [Fraction(0)] * m
    for row_idx, col in enumerate(piv_cols):
        coords[col] = aug[row_idx][-1]
    if r < m:
        # dependent rays cannot occur for simplicial cones; defensive
        raise ValueError("cone rays are dependent")
    return coords


def stellar_subdivide(f, cone, new_ray):
    """Star subdivision at new_ray, which must sit in the relative interior
    of the given cone (a face of some max cone)."""
    cone = tuple(sorted(int(i) for i in cone))
    if not any(set(cone) <= set(c) for c in f.max_cones):
        raise MalformedFan("not a face of any max cone: %r" % (cone,))
    if not cone:
        raise RayNotInterior("the zero cone has no interior ray")
    new_ray = tuple(int(x) for x in new_ray)
    if math.gcd(*new_ray) != 1:
        raise MalformedFan("new ray not primitive: %r" % (new_ray,))
    if new_ray in f.rays:
        raise RayNotInterior("ray already present: %r" % (new_ray,))
    coords = relint_coords(f, cone, new_ray)
    if coords is None or any(x <= 0 for x in coords):
        raise RayNotInterior("not in the relative interior of %r" % (cone,))
    rays = f.rays + (new_ray,)
    star = len(f.rays)
    cones = []
    for c in f.max_cones:
        if set(cone) <= set(c):
            for drop in cone:
                cones.append(tuple(sorted([i for i in c if i != drop] + [star])))
        else:
            cones.append(c)
    return fan(f.rank, rays, cones)


def canonicalize(f):
    """Relabel rays in lexicographic order and sort the max cones."""
    order = sorted(range(len(f.rays)), key=lambda i: f.rays[i])
    renumber = {old: new for new, old in enumerate(order)}
    rays = [f.rays[i] for i in order]
    cones = sorted(tuple(sorted(renumber[i] for i in c)) for c in f.max_cones)
    return fan(f.rank, rays, cones)


def first_equal_sign_violation(f, lat):
    """Deterministic pick of a (cone, character) violation for the canonical
    basis of lat, or None when every cone is fine."""
    for c in f.max_cones:
        for chi in lat.basis:
            vals = [pairing(chi, f.rays[i]) for i in c]
            if any(v > 0 for v in vals) and any(v < 0 for v in vals):
                face = tuple(i for i, v in zip(c, vals) if v != 0)
                return c, chi, face
    return None


def search_good_fan(f, lattices, budget=64):
    """Greedy repair loop: while some lattice lacks an equal-sign basis,
    stellar-subdivide the smallest violating face at the primitive sum of its
    rays.  Returns (fan, subdivision count).  Raises BudgetExhausted."""
    current = f
    steps = 0
    while True:
        pending = None
        for lat in lattices:
            if find_equal_sign_basis(current, lat) is None:
                pending = first_equal_sign_violation(current, lat)
                if pending is None:
                    # no single-character repair target; subdivide the first
                    # cone paired nontrivially with the lattice
                    for c in current.max_cones:
                        if any(pairing(chi, current.rays[i]) for chi in lat.basis for i in c):
                            pending = (c, lat.basis[0], c)
                            break
                break
        if pending is None:
            return current, steps
        if steps >= budget:
            raise BudgetExhausted("no good fan within %d subdivisions" % budget)
        _, _, face = pending
        total = [sum(current.rays[i][j] for i in face) for j in range(current.rank)]
        current = stellar_subdivide(current, face, primitive(total))
        steps += 1
