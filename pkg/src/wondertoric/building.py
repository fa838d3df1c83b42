"""Building sets, well-connectedness, ordering, and nested sets.

Members of a building set are referenced by their index in a LayerPoset.
Transversality is decided by codimension additivity, which is equivalent to
the geometric condition here because all the intersections involved are
clean.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import CycleDetected, NotBuilding, NotLast
from .fans import Report, merge_reports, pairing
from .layers import LayerPoset, build_layer_poset, intersect_layers, layer_inclusion
from .lattice import saturate, span_rows


def minimal_containing(candidate_ids, poset, lam):
    """Ids of the inclusion-minimal candidate members containing the layer."""
    containing = [
        i for i in candidate_ids if layer_inclusion(lam, poset.elements[i])
    ]
    return sorted(
        i
        for i in containing
        if not any(
            j != i and layer_inclusion(poset.elements[j], poset.elements[i])
            for j in containing
        )
    )


def validate_building(candidate_ids, poset):
    """Every non-member must be a transversal component of the intersection
    of its minimal containing members."""
    candidate_ids = set(candidate_ids)
    bad = []
    for idx, lam in enumerate(poset.elements):
        if idx in candidate_ids:
            continue
        mins = minimal_containing(candidate_ids, poset, lam)
        if not mins:
            bad.append(("no_containing_member", idx))
            continue
        comps = intersect_layers([poset.elements[i] for i in mins])
        if lam not in comps:
            bad.append(("not_a_component", idx, tuple(mins)))
            continue
        if lam.codim != sum(poset.elements[i].codim for i in mins):
            bad.append(("not_transversal", idx, tuple(mins)))
    return Report(not bad, tuple(bad))


def is_antichain(ids, poset):
    return not any(
        a != b and poset.inclusion[a][b] for a, b in itertools.permutations(ids, 2)
    )


def validate_well_connected(candidate_ids, poset):
    """Intersections of members must be empty, connected, or split into
    components that are themselves members.  Only antichains matter:
    comparable elements never change an intersection."""
    ids = sorted(set(candidate_ids))
    member_layers = [poset.elements[i] for i in ids]
    bad = []
    for k in range(2, len(ids) + 1):
        for sub in itertools.combinations(ids, k):
            if not is_antichain(sub, poset):
                continue
            comps = intersect_layers([poset.elements[i] for i in sub])
            if len(comps) <= 1:
                continue
            for c in comps:
                if c not in member_layers:
                    bad.append(("stray_component", sub))
                    break
    return Report(not bad, tuple(bad))


def order_refining_inclusion(member_ids, poset):
    """Topological order by strict inclusion, contained elements first, ties
    broken by element id."""
    ids = sorted(set(member_ids))
    remaining = list(ids)
    ordered = []
    while remaining:
        pick = None
        for i in remaining:
            if not any(
                j != i and poset.inclusion[j][i] for j in remaining
            ):
                pick = i
                break
        if pick is None:
            raise CycleDetected("inclusion relation has a cycle")
        ordered.append(pick)
        remaining.remove(pick)
    return tuple(ordered)


@dataclass(frozen=True)
class BuildingSet:
    poset: LayerPoset
    members: tuple  # ordered element ids, inclusion-refining

    @property
    def size(self):
        return len(self.members)

    def member_layer(self, pos):
        return self.poset.elements[self.members[pos]]


def building_set(poset, member_ids=None):
    """Order and validate a building set; member_ids defaults to the whole
    poset (the maximal building set).  Raises NotBuilding on failure."""
    if member_ids is None:
        member_ids = range(len(poset.elements))
    ordered = order_refining_inclusion(member_ids, poset)
    rep = merge_reports(
        validate_building(ordered, poset), validate_well_connected(ordered, poset)
    )
    if not rep.ok:
        raise NotBuilding("not a well-connected building set: %r" % (rep.failures,))
    return BuildingSet(poset, ordered)


def induced_building_on(z_id, building):
    """Building set induced on the last member Z: the connected intersections
    G_i cap Z, each tagged with the position of the first member cutting it.

    Disconnected intersections are skipped; their components are members on
    their own and re-enter through their own positions.
    """
    poset = building.poset
    if not building.members or building.members[-1] != z_id:
        raise NotLast("induced building requires the last member")
    z_layer = poset.elements[z_id]
    out = []
    seen = []
    for pos in range(len(building.members) - 1):
        g_layer = building.member_layer(pos)
        comps = intersect_layers([g_layer, z_layer])
        if len(comps) != 1:
            continue
        h = comps[0]
        if h == z_layer:
            # cannot happen when the order refines inclusion; defensive
            continue
        if h not in seen:
            seen.append(h)
            out.append((poset.index_of(h), pos))
    return out


def induced_poset(poset, z_id):
    """Layer poset of everything strictly below Z, rebuilt from the elements
    strictly contained in it."""
    z_layer = poset.elements[z_id]
    below = [
        e
        for e in poset.elements
        if e != z_layer and layer_inclusion(e, z_layer)
    ]
    elements = tuple(sorted(below, key=lambda l: l.sort_key()))
    incl = tuple(tuple(layer_inclusion(a, b) for b in elements) for a in elements)
    return LayerPoset(elements, incl)


def is_nested(t_ids, building):
    """Every antichain of size > 1 must be the set of factors of a component
    of its intersection, with additive codimension."""
    poset = building.poset
    t_ids = sorted(set(t_ids))
    if any(i not in building.members for i in t_ids):
        raise ValueError("nested candidates must be building members")
    for k in range(2, len(t_ids) + 1):
        for sub in itertools.combinations(t_ids, k):
            if not is_antichain(sub, poset):
                continue
            comps = intersect_layers([poset.elements[i] for i in sub])
            target_codim = sum(poset.elements[i].codim for i in sub)
            ok = False
            for lam in comps:
                if lam.codim != target_codim:
                    continue
                if minimal_containing(building.members, poset, lam) == list(sub):
                    ok = True
                    break
            if not ok:
                return False
    return True


def combined_lattice(t_ids, building):
    """Saturation of the sum of the member lattices; the common lattice of
    every component of the intersection."""
    poset = building.poset
    n = poset.elements[t_ids[0]].ambient_rank if t_ids else None
    if n is None:
        raise ValueError("empty member set has no combined lattice")
    rows = [list(r) for i in t_ids for r in poset.elements[i].gamma.basis]
    return saturate(span_rows(rows, n))


def is_nested_plus(t_ids, ray_indices, building, f):
    """Nestedness in the augmented building set: layer members plus boundary
    divisors indexed by fan rays.

    True iff the layer part is nested, the rays span a cone of the fan, and
    each ray is annihilated by the combined lattice of the layer part.
    """
    t_ids = sorted(set(t_ids))
    rays = sorted(set(ray_indices))
    if not is_nested(t_ids, building):
        return False
    if rays and not any(set(rays) <= set(c) for c in f.max_cones):
        return False
    if t_ids and rays:
        lam = combined_lattice(t_ids, building)
        for r in rays:
            if any(pairing(chi, f.rays[r]) != 0 for chi in lam.basis):
                return False
    return True
