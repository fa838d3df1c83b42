"""Relation ideals of the compactified model and of its boundary strata.

The model ring lives on one generator per fan ray plus one generator t_i per
ordered building-set member.  Four relation families cut it down: the toric
relations of the base, the annihilators t_i c_r, the lifted Chern relations
F(i,A), and the monomials F(0,A) for empty intersections.  Strata get the
same families rebuilt relative to a nested set, plus degree-one c_r
relations for rays whose divisor misses the stratum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .building import (
    BuildingSet,
    combined_lattice,
    is_nested_plus,
    validate_building,
    validate_well_connected,
)
from .chern import lift_chern_relative
from .cohomology import (
    GradedRing,
    canon_terms,
    danilov_ring,
    from_terms,
    minimal_nonfaces,
    padd,
    pdegree,
    pmul,
    pmul_mono,
    ppow,
    pvar,
)
from .errors import BadOrder, DegreeMismatch, NotBuilding, NotGood, NotNested
from .fans import fan_to_dict, merge_reports, pairing, rays_in_kernel, validate_good
from .layers import (
    closure_nonempty_with_orbit,
    intersect_layers,
    layer_inclusion,
    layer_to_dict,
    torus,
)


@dataclass(frozen=True)
class NestedSet:
    members: tuple  # positions into the building order
    rays: tuple  # fan ray indices


def nested_set(members=(), rays=()):
    return NestedSet(
        tuple(sorted(set(int(p) for p in members))),
        tuple(sorted(set(int(r) for r in rays))),
    )


@dataclass(frozen=True)
class ModelPresentation:
    fan: object
    building: BuildingSet
    base: GradedRing
    ring: GradedRing
    groups: tuple  # (group name, provenance dict, frozen terms) triples


@dataclass(frozen=True)
class StratumPresentation(ModelPresentation):
    nested: NestedSet = nested_set()


def check_model_preconditions(f, building):
    poset = building.poset
    rep = validate_good(f, [e.gamma for e in poset.elements])
    if not rep.ok:
        raise NotGood("fan is not good for the arrangement: %r" % (rep.failures,))
    rep = merge_reports(
        validate_building(building.members, poset),
        validate_well_connected(building.members, poset),
    )
    if not rep.ok:
        raise NotBuilding("not a well-connected building set: %r" % (rep.failures,))
    layers = [building.member_layer(p) for p in range(building.size)]
    for a in range(len(layers)):
        for b in range(a + 1, len(layers)):
            if layers[b] != layers[a] and layer_inclusion(layers[b], layers[a]):
                raise BadOrder(
                    "member %d is contained in earlier member %d" % (b, a)
                )


def _dead_rays(f, building, nested):
    """Rays whose divisor misses the stratum: adding the ray to the nested
    set must keep it nested, i.e. the enlarged ray set spans a cone whose
    rays are annihilated by the combined member lattice."""
    t_ids = [building.members[p] for p in nested.members]
    lam = combined_lattice(t_ids, building) if t_ids else None
    base_rays = set(nested.rays)
    out = []
    for r in range(len(f.rays)):
        want = base_rays | {r}
        spans = any(want <= set(c) for c in f.max_cones)
        perp = lam is None or all(
            pairing(chi, f.rays[r]) == 0 for chi in lam.basis
        )
        if not (spans and perp):
            out.append(r)
    return out


def _mixed_empty(positions, nested, member_layers, f):
    """Whether the member intersection over `positions`, cut further by the
    nested set's members and ray orbits, is empty inside the base variety."""
    lays = [member_layers[p] for p in positions]
    lays += [member_layers[p] for p in nested.members]
    if not lays:
        return False
    comps = intersect_layers(lays)
    if not comps:
        return True
    if not nested.rays:
        return False
    return not any(
        closure_nonempty_with_orbit(k, tuple(nested.rays), f) for k in comps
    )


def _assemble(f, building, nested, lift_rel):
    base = danilov_ring(f)
    m = building.size
    nc = len(f.rays)
    nvars = nc + m
    n = f.rank
    member_layers = [building.member_layer(p) for p in range(m)]

    def ext(p):
        return {e + (0,) * m: c for e, c in p.items()}

    def tvar(pos):
        return pvar(nc + pos, nvars)

    groups = []

    for s in minimal_nonfaces(f):
        e = [0] * nvars
        for i in s:
            e[i] += 1
        groups.append(("SR", {"rays": list(s)}, canon_terms({tuple(e): 1})))
    for i in range(n):
        p = {}
        for r in range(nc):
            if f.rays[r][i]:
                p = padd(p, pvar(r, nvars, f.rays[r][i]))
        groups.append(("linear", {"coordinate": i}, canon_terms(p)))

    for r in _dead_rays(f, building, nested):
        groups.append(("stratum_c", {"ray": r}, canon_terms(pvar(r, nvars))))

    for i in range(m):
        inside = rays_in_kernel(f, member_layers[i].gamma)
        for r in range(nc):
            if r in inside:
                continue
            e = [0] * nvars
            e[r] = 1
            e[nc + i] = 1
            groups.append(("tc", {"member": i, "ray": r}, canon_terms({tuple(e): 1})))

    for i in range(m):
        g_layer = member_layers[i]
        supersets = [
            j
            for j in range(m)
            if j != i
            and member_layers[j] != g_layer
            and layer_inclusion(g_layer, member_layers[j])
        ]
        s_i = [
            p
            for p in nested.members
            if member_layers[p] != g_layer and layer_inclusion(g_layer, member_layers[p])
        ]
        b_i = [
            h for h in range(m) if layer_inclusion(member_layers[h], g_layer)
        ]
        shift = {}
        for h in b_i:
            shift = padd(shift, pvar(nc + h, nvars, -1))
        for size in range(len(supersets) + 1):
            for a in itertools.combinations(supersets, size):
                combo = sorted(set(a) | set(s_i))
                if not combo:
                    mlayer = torus(n)
                else:
                    comps = intersect_layers([member_layers[j] for j in combo])
                    holding = [
                        k for k in comps if layer_inclusion(g_layer, k)
                    ]
                    assert len(holding) == 1  # components are disjoint
                    mlayer = holding[0]
                p = lift_rel(g_layer, mlayer, base, f)
                poly = {}
                for k, coeff in enumerate(p.coeff_polys()):
                    piece = pmul(ext(coeff), ppow(shift, k, nvars))
                    poly = padd(poly, piece)
                e = [0] * nvars
                for j in a:
                    e[nc + j] += 1
                poly = pmul_mono(poly, tuple(e))
                assert pdegree(poly) == g_layer.codim - mlayer.codim + len(a)
                groups.append(
                    (
                        "F",
                        {
                            "member": i,
                            "others": list(a),
                            "component": layer_to_dict(mlayer),
                        },
                        canon_terms(poly),
                    )
                )

    found = []
    for size in range(1, m + 1):
        for a in itertools.combinations(range(m), size):
            if any(set(prev) <= set(a) for prev in found):
                continue
            if not _mixed_empty(a, nested, member_layers, f):
                continue
            found.append(a)
            e = [0] * nvars
            for j in a:
                e[nc + j] += 1
            groups.append(("F0", {"others": list(a)}, canon_terms({tuple(e): 1})))

    names = base.names + tuple("t:%d" % p for p in range(m))
    subst = {v: ext(p) for v, p in base.substitutions.items()}
    ring = GradedRing(
        names,
        [from_terms(t) for (_, _, t) in groups],
        eliminate=base.eliminate,
        substitutions=subst,
        fan=f,
    )
    return base, ring, tuple(groups)


def assemble_model_ideal(f, building, *, lift_rel=None):
    """Presentation of the cohomology of the compactified model."""
    check_model_preconditions(f, building)
    lift = lift_rel or lift_chern_relative
    base, ring, groups = _assemble(f, building, nested_set(), lift)
    return ModelPresentation(f, building, base, ring, groups)


def assemble_stratum_ideal(f, building, nested, *, lift_rel=None):
    """Presentation of the cohomology of the boundary stratum cut out by the
    divisors of a nested set (member positions plus fan rays)."""
    check_model_preconditions(f, building)
    for p in nested.members:
        if not 0 <= p < building.size:
            raise ValueError("nested member position out of range: %r" % (p,))
    for r in nested.rays:
        if not 0 <= r < len(f.rays):
            raise ValueError("nested ray index out of range: %r" % (r,))
    ids = [building.members[p] for p in nested.members]
    if not is_nested_plus(ids, nested.rays, building, f):
        raise NotNested("set is not nested: %r" % (nested,))
    lift = lift_rel or lift_chern_relative
    base, ring, groups = _assemble(f, building, nested, lift)
    return StratumPresentation(f, building, base, ring, groups, nested)


def stratum_size(pres):
    if isinstance(pres, StratumPresentation):
        return len(pres.nested.members) + len(pres.nested.rays)
    return 0


def hilbert_function(pres, max_degree=None):
    """Per-degree free ranks of the quotient, with a torsion report.

    The expected top degree (dimension of the model, shrunk by one per
    nested-set element for a stratum) must carry rank one, everything above
    it must vanish, and full models must be palindromic.
    """
    n = pres.fan.rank
    if max_degree is None:
        max_degree = n + 1
    ranks = tuple(pres.ring.graded_rank(d) for d in range(max_degree + 1))
    torsion = tuple(pres.ring.graded_torsion(d) for d in range(max_degree + 1))
    top = n - stratum_size(pres)
    if max_degree >= top:
        assert ranks[top] == 1, "top degree rank is %d" % ranks[top]
        assert all(r == 0 for r in ranks[top + 1 :])
    if stratum_size(pres) == 0 and max_degree >= n:
        assert all(ranks[d] == ranks[n - d] for d in range(n + 1))
    return ranks, torsion


def ideal_equal_up_to(pres_a, pres_b, max_degree):
    """Degree-by-degree equality of the relation lattices of two
    presentations on the same generators."""
    if pres_a.ring.names != pres_b.ring.names:
        raise DegreeMismatch("presentations live on different generators")
    for d in range(max_degree + 1):
        rows_a = tuple(pres_a.ring.slice_table(d)[2].hnf_rows())
        rows_b = tuple(pres_b.ring.slice_table(d)[2].hnf_rows())
        if rows_a != rows_b:
            return False
    return True


def presentation_to_dict(pres, max_degree=None):
    ranks, torsion = hilbert_function(pres, max_degree)
    nc = len(pres.base.names)
    doc = {
        "base_ring": {
            "names": list(pres.base.names),
            "fan": fan_to_dict(pres.fan),
        },
        "t_vars": list(pres.ring.names[nc:]),
        "relations": [
            {
                "group": g,
                "provenance": prov,
                "poly": [[c, list(e)] for e, c in terms],
            }
            for g, prov, terms in pres.groups
        ],
        "hilbert": list(ranks),
        "torsion": [list(t) for t in torsion],
    }
    if isinstance(pres, StratumPresentation):
        doc["nested"] = {
            "members": list(pres.nested.members),
            "rays": list(pres.nested.rays),
        }
    return doc
