"""Toric arrangement layers and their intersection poset.

A layer is a coset-like subvariety of the torus cut out by character
equations: a saturated sublattice gamma of the character lattice plus the
prescribed values phi of those characters, as elements of Q/Z.  phi is stored
on the canonical HNF basis of gamma, so equal layers compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSplit
from .lattice import (
    Sublattice,
    is_split_summand,
    qz,
    saturate,
    solve_in_lattice,
    span_rows,
    sublattice,
)


@dataclass(frozen=True)
class Layer:
    gamma: Sublattice
    phi: tuple  # Q/Z value per basis row of gamma

    @property
    def ambient_rank(self):
        return self.gamma.ambient_rank

    @property
    def codim(self):
        return self.gamma.rank

    def value_on(self, chi):
        """phi extended linearly to an arbitrary character of gamma."""
        coords = solve_in_lattice(self.gamma.basis, chi)
        if coords is None:
            raise ValueError("character not in the layer's lattice: %r" % (chi,))
        return qz(sum(Fraction(c) * v for c, v in zip(coords, self.phi)))

    def sort_key(self):
        return (self.codim, self.gamma.basis, self.phi)


def layer(gamma_rows, phi, ambient_rank):
    """Build a Layer from basis rows and their Q/Z values.

    The rows must be independent.  phi is re-expressed on the canonical HNF
    basis, so any basis of the same lattice with matching values gives the
    same Layer object.
    """
    rows = [list(map(int, r)) for r in gamma_rows]
    phi = [qz(v) for v in phi]
    if len(rows) != len(phi):
        raise ValueError("one phi value per basis row required")
    lat = sublattice(rows, ambient_rank)
    canon_phi = []
    for h in lat.basis:
        coords = solve_in_lattice(rows, list(h)) if rows else ()
        canon_phi.append(qz(sum(Fraction(c) * v for c, v in zip(coords, phi))))
    return Layer(lat, tuple(canon_phi))


def torus(ambient_rank):
    """The dense torus itself: the codimension-0 layer."""
    return Layer(span_rows([], ambient_rank), ())


def layer_to_dict(lay):
    return {
        "gamma": [list(r) for r in lay.gamma.basis],
        "phi": [format_qz(v) for v in lay.phi],
    }


def layer_from_dict(doc, ambient_rank):
    return layer(doc["gamma"], [parse_qz(s) for s in doc["phi"]], ambient_rank)


def format_qz(v):
    v = qz(v)
    return "%d/%d" % (v.numerator, v.denominator)


def parse_qz(s):
    return qz(Fraction(s))


def layer_inclusion(a, b):
    """True iff a is contained in b as subvarieties of the torus."""
    if a.ambient_rank != b.ambient_rank:
        raise ValueError("ambient ranks differ")
    if not a.gamma.contains(b.gamma):
        return False
    return all(a.value_on(row) == v for row, v in zip(b.gamma.basis, b.phi))


def intersect_layers(layers):
    """Connected components of the intersection of the given layers.

    Every component lives on the saturation of the sum of the gammas; the
    components correspond to the consistent torsion extensions of the glued
    character values.  Empty list means empty intersection.
    """
    from .lattice import solve_torsion_congruences

    if not layers:
        raise ValueError("need at least one layer")
    n = layers[0].ambient_rank
    if any(l.ambient_rank != n for l in layers):
        raise ValueError("ambient ranks differ")
    gens = []
    values = []
    for l in layers:
        for row, v in zip(l.gamma.basis, l.phi):
            gens.append(list(row))
            values.append(v)
    if not gens:
        return [torus(n)]
    span = span_rows(gens, n)
    sat = saturate(span)
    sols = solve_torsion_congruences(gens, values, n)
    return [Layer(sat, phi) for phi in sols]


@dataclass(frozen=True)
class LayerPoset:
    elements: tuple  # Layers, sorted by (codim, basis, phi)
    inclusion: tuple  # inclusion[i][j] == elements[i] contained in elements[j]

    @property
    def codims(self):
        return tuple(e.codim for e in self.elements)

    def leq(self, i, j):
        # order by reverse inclusion of subvarieties: smaller variety = larger
        return self.inclusion[i][j]

    def index_of(self, lay):
        return self.elements.index(lay)


def build_layer_poset(arrangement):
    """Close the arrangement under pairwise component-wise intersection.

    Elements are deduplicated Layers sorted canonically; the ambient torus is
    not included.  Raises NotSplit when an input gamma is not saturated.
    """
    if not arrangement:
        raise ValueError("empty arrangement")
    n = arrangement[0].ambient_rank
    for l in arrangement:
        if not is_split_summand(l.gamma):
            raise NotSplit("layer lattice is not saturated: %r" % (l.gamma.basis,))
    pool = []
    for l in arrangement:
        if l not in pool:
            pool.append(l)
    while True:
        new = []
        for a in pool:
            for b in pool:
                for comp in intersect_layers([a, b]):
                    if comp not in pool and comp not in new:
                        new.append(comp)
        if not new:
            break
        pool.extend(new)
    elements = tuple(sorted(pool, key=lambda l: l.sort_key()))
    incl = tuple(
        tuple(layer_inclusion(a, b) for b in elements) for a in elements
    )
    return LayerPoset(elements, incl)


def closure_nonempty_with_orbit(lay, cone, f):
    """Whether the closure of the layer meets the orbit of the cone: true iff
    every ray of the cone is annihilated by the layer's lattice."""
    from .fans import pairing

    return all(
        pairing(chi, f.rays[i]) == 0 for i in cone for chi in lay.gamma.basis
    )
