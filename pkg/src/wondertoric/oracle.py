"""Independent Betti numbers for the model via the blowup recursion.

Everything here is additive bookkeeping: start from the h-vector of the base
toric variety, then walk the blowup sequence, adding the shifted Betti
numbers of each center.  Centers are wonderful models of induced
arrangements in their own right, so the computation recurses; no cohomology
rings are ever touched, which is what makes this an oracle for them.

All stages stay in ambient coordinates: the toric variety of a stage is cut
by the cones lying in the kernel of the stage lattice, and the arrangement
of a stage is a set of ambient poset elements.
"""

from __future__ import annotations

from dataclasses import dataclass

from .building import BuildingSet, induced_building_on
from .cohomology import h_vector_oracle
from .errors import CycleDetected
from .fans import Report, induced_fan
from .layers import torus
from .present import check_model_preconditions


def keel_step(b_y, b_z, d):
    """Betti vector of the blowup of Y along a codimension-d center Z."""
    if d < 1:
        raise ValueError("codimension must be positive: %r" % (d,))
    if d == 1:
        return tuple(b_y)
    out = list(b_y)
    for j in range(1, d):
        for k, v in enumerate(b_z):
            idx = k + j
            while len(out) <= idx:
                out.append(0)
            out[idx] += v
    assert sum(out) == sum(b_y) + (d - 1) * sum(b_z)  # Euler bookkeeping
    return tuple(out)


@dataclass(frozen=True)
class BlowupStep:
    member_id: int  # ambient poset element id of the center's layer
    codim: int  # codimension of the center in its stage
    induced: tuple  # ordered ambient ids of the induced arrangement on it


@dataclass(frozen=True)
class BlowupPlan:
    steps: tuple


def _refining_order(ids, poset):
    """Inclusion-refining order preferring the given (source) order."""
    remaining = list(ids)
    out = []
    while remaining:
        pick = None
        for i in remaining:
            if not any(j != i and poset.inclusion[j][i] for j in remaining):
                pick = i
                break
        if pick is None:
            raise CycleDetected("inclusion relation has a cycle")
        out.append(pick)
        remaining.remove(pick)
    return tuple(out)


def _induced_members(poset, prefix_ids, z_id):
    helper = BuildingSet(poset, tuple(prefix_ids) + (z_id,))
    pairs = induced_building_on(z_id, helper)
    return _refining_order([i for i, _ in pairs], poset)


def _plan(poset, member_ids):
    steps = []
    for pos, mid in enumerate(member_ids):
        induced = _induced_members(poset, member_ids[:pos], mid)
        steps.append(BlowupStep(mid, poset.elements[mid].codim, induced))
    return BlowupPlan(tuple(steps))


def blowup_plan(f, building):
    """Top-level blowup sequence of the model, one step per ordered member."""
    check_model_preconditions(f, building)
    return _plan(building.poset, tuple(building.members))


def _stage_betti(f, poset, stage, member_ids, memo):
    lat = stage.gamma
    key = (
        lat.basis,
        stage.phi,
        tuple((poset.elements[i].gamma.basis, poset.elements[i].phi) for i in member_ids),
    )
    if key in memo:
        return memo[key]
    b = h_vector_oracle(induced_fan(f, lat))
    for pos, mid in enumerate(member_ids):
        center = poset.elements[mid]
        d = center.codim - lat.rank
        assert d >= 1
        if d == 1:
            continue  # divisorial center: blowup is an isomorphism
        induced = _induced_members(poset, member_ids[:pos], mid)
        b_z = _stage_betti(f, poset, center, induced, memo)
        b = keel_step(b, b_z, d)
    memo[key] = tuple(b)
    return memo[key]


def model_betti(f, building):
    """Betti vector of the model, one entry per even cohomological degree."""
    check_model_preconditions(f, building)
    memo = {}
    return _stage_betti(
        f, building.poset, torus(f.rank), tuple(building.members), memo
    )


def _strip(vec):
    v = list(vec)
    while v and v[-1] == 0:
        v.pop()
    return tuple(v)


def verify(pres_hilbert, oracle, torsion=()):
    """Compare a presentation's Hilbert vector against the oracle.

    Degrees in failure records are cohomological (twice the vector index)."""
    failures = []
    h = _strip(pres_hilbert)
    o = _strip(oracle)
    if not h or h[0] != 1:
        failures.append(("b0", "hilbert"))
    if not o or o[0] != 1:
        failures.append(("b0", "oracle"))
    if h and o:
        for k in range(max(len(h), len(o))):
            a = h[k] if k < len(h) else 0
            b = o[k] if k < len(o) else 0
            if a != b:
                failures.append(("mismatch", 2 * k, a, b))
        if h == o:
            if h != tuple(reversed(h)):
                failures.append(("not_palindromic", h))
            if h[-1] != 1:
                failures.append(("top_rank", h[-1]))
    for k, t in enumerate(torsion):
        if t:
            failures.append(("torsion", 2 * k, tuple(t)))
    return Report(not failures, tuple(failures))
