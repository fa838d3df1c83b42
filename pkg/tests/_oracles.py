"""Independent reference computations used by several test files.

These deliberately take a different route from the library code they verify:
nestedness in the augmented building set is re-derived from the full
stratified poset of (layer, cone) pairs.
"""

import itertools

from wondertoric.building import is_antichain, minimal_containing
from wondertoric.fans import pairing
from wondertoric.layers import intersect_layers


def cone_of(rays, f):
    """The spanned cone as a sorted tuple, or None if no cone of the fan has
    exactly these rays among its faces."""
    rays = tuple(sorted(rays))
    if not rays:
        return ()
    if any(set(rays) <= set(c) for c in f.max_cones):
        return rays
    return None


def nested_plus_reference(t_ids, ray_indices, building, f):
    """Ground-truth nestedness for layer members plus boundary divisors.

    Works over the mixed poset whose elements are pairs (layer, cone):
    divisors are incomparable with every layer member, so the antichains are
    exactly (layer antichain) x (ray subset).  Each one of size >= 2 must be
    the factor set of a nonempty stratum with additive codimension.
    """
    poset = building.poset
    t_ids = sorted(set(t_ids))
    rays = sorted(set(ray_indices))
    for lk in range(len(t_ids) + 1):
        for lt in itertools.combinations(t_ids, lk):
            if not is_antichain(lt, poset):
                continue
            for rk in range(len(rays) + 1):
                for rt in itertools.combinations(rays, rk):
                    if len(lt) + len(rt) < 2:
                        continue
                    if not witness_exists(lt, rt, building, f):
                        return False
    return True


def witness_exists(layer_part, ray_part, building, f):
    poset = building.poset
    if cone_of(ray_part, f) is None:
        return False
    if not layer_part:
        # the dense layer of the torus: no member contains it
        return True
    comps = intersect_layers([poset.elements[i] for i in layer_part])
    target = sum(poset.elements[i].codim for i in layer_part)
    for lam in comps:
        if lam.codim != target:
            continue
        if minimal_containing(building.members, poset, lam) != list(layer_part):
            continue
        if all(
            pairing(chi, f.rays[r]) == 0
            for r in ray_part
            for chi in lam.gamma.basis
        ):
            return True
    return False
