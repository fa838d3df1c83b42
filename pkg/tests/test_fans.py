import itertools
from fractions import Fraction

import pytest

from wondertoric.errors import BudgetExhausted, MalformedFan, NotCompatible, RayNotInterior
from wondertoric.fans import (
    canonicalize,
    cone_face_compat,
    equal_sign_check,
    fan,
    fan_from_dict,
    fan_to_dict,
    feasible_nonneg,
    find_equal_sign_basis,
    induced_fan,
    search_good_fan,
    stellar_subdivide,
    validate_complete,
    validate_good,
    validate_smooth,
)
from wondertoric.lattice import sublattice

P1 = fan(1, [(1,), (-1,)], [(0,), (1,)])
P1xP1 = fan(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (0, 3), (1, 2), (1, 3)])
P2 = fan(2, [(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def lat(rows, n):
    return sublattice(rows, n)


def test_factory_rejects_structural_defects():
    with pytest.raises(MalformedFan):
        fan(2, [(2, 0)], [(0,)])  # not primitive
    with pytest.raises(MalformedFan):
        fan(2, [(1, 0), (1, 0)], [(0,), (1,)])  # repeated ray
    with pytest.raises(MalformedFan):
        fan(2, [(1, 0), (0, 1)], [(0, 0, 1)])  # repeated index in cone
    with pytest.raises(MalformedFan):
        fan(2, [(1, 0), (-1, 0)], [(0, 1)])  # not simplicial
    with pytest.raises(MalformedFan):
        fan(2, [(1, 0), (0, 1)], [(0,)])  # unused ray
    with pytest.raises(MalformedFan):
        fan(2, [(1, 0), (0, 1)], [(0, 1), (0,)])  # nested max cones


def test_smoothness_reports():
    assert validate_smooth(P1).ok
    assert validate_smooth(P1xP1).ok
    bad = fan(2, [(1, 0), (1, 2)], [(0, 1)])
    rep = validate_smooth(bad)
    assert not rep.ok
    assert rep.failures == (("not_smooth", (0, 1)),)


def test_completeness_reports():
    assert validate_complete(P1).ok
    assert validate_complete(P2).ok
    missing = fan(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (1, 2), (1, 3)])
    rep = validate_complete(missing)
    assert not rep.ok
    walls = [f for f in rep.failures if f[0] == "wall_count"]
    assert len(walls) == 2  # the two boundary walls of the removed quadrant


def test_feasibility_solver_small_cases():
    # x + y = 1, x,y >= 0 feasible; x + y = -1 infeasible
    assert feasible_nonneg([[1, 1]], [1])
    assert not feasible_nonneg([[1, 1]], [-1])
    # x - y = 0, x + y = 2 -> x = y = 1
    assert feasible_nonneg([[1, -1], [1, 1]], [0, 2])
    # x = 1 and x = 2 contradictory
    assert not feasible_nonneg([[1], [1]], [1, 2])


def brute_face_violation(f, lattice, cone, denominator=4, top=3):
    # search a rational point of the cone, killed by the lattice, whose
    # support uses a ray outside the kernel subspace
    inside = [
        i
        for i in cone
        if all(sum(a * b for a, b in zip(chi, f.rays[i])) == 0 for chi in lattice.basis)
    ]
    grid = [Fraction(k, denominator) for k in range(top * denominator + 1)]
    for lams in itertools.product(grid, repeat=len(cone)):
        if all(l == 0 for i, l in zip(cone, lams) if i not in inside):
            continue
        point = [
            sum(l * r for l, r in zip(lams, [Fraction(f.rays[i][j]) for i in cone]))
            for j in range(f.rank)
        ]
        if all(sum(a * b for a, b in zip(chi, point)) == 0 for chi in lattice.basis):
            return lams
    return None


def test_cone_face_compat_examples_and_brute_force():
    coord = lat([[1, 0]], 2)
    assert cone_face_compat(P1xP1, coord).ok
    for cone in P1xP1.max_cones:
        assert brute_face_violation(P1xP1, coord, cone) is None

    diag = lat([[1, -1]], 2)
    rep = cone_face_compat(P2, diag)
    assert not rep.ok
    assert any(f[1] == (0, 1) for f in rep.failures)
    witness = brute_face_violation(P2, diag, (0, 1))
    assert witness is not None  # e.g. e1 + e2 on the diagonal

    zero = sublattice([], 2, allow_dependent=True)
    assert cone_face_compat(P1xP1, zero).ok


def test_equal_sign_examples():
    assert equal_sign_check(P1xP1, [(1, 0)]).ok
    rep = equal_sign_check(P2, [(1, -1)])
    assert not rep.ok
    assert ("mixed_signs", (0, 1), 0) in rep.failures
    assert equal_sign_check(P2, []).ok


def test_equal_sign_implies_face_compat():
    # checked on every lattice/fan pair used in this file
    pairs = [
        (P1xP1, lat([[1, 0]], 2)),
        (P1xP1, lat([[0, 1]], 2)),
        (P1xP1, lat([[1, 0], [0, 1]], 2)),
        (P2, lat([[1, -1]], 2)),
        (P2, lat([[1, 0]], 2)),
    ]
    for f, L in pairs:
        basis = find_equal_sign_basis(f, L)
        if basis is not None:
            assert equal_sign_check(f, basis).ok
            assert cone_face_compat(f, L).ok


def test_find_equal_sign_basis_prefers_coordinates():
    full = lat([[1, 0], [0, 1]], 2)
    assert find_equal_sign_basis(P1xP1, full) == ((1, 0), (0, 1))
    assert find_equal_sign_basis(P2, lat([[1, -1]], 2)) is None


def test_validate_good_examples():
    coord_lats = [lat([[1, 0]], 2), lat([[0, 1]], 2), lat([[1, 0], [0, 1]], 2)]
    assert validate_good(P1xP1, coord_lats).ok
    assert not validate_good(P2, [lat([[1, -1]], 2)]).ok
    assert validate_good(P1, [lat([[1]], 1)]).ok


def test_induced_fan_examples():
    sub = induced_fan(P1xP1, lat([[1, 0]], 2))
    assert sub.rank == 1
    assert sorted(sub.rays) == [(-1,), (1,)]
    assert validate_smooth(sub).ok and validate_complete(sub).ok

    assert induced_fan(P1xP1, sublattice([], 2, allow_dependent=True)) is P1xP1

    point = induced_fan(P1xP1, lat([[1, 0], [0, 1]], 2))
    assert point.rank == 0 and point.max_cones == ((),)

    with pytest.raises(NotCompatible):
        induced_fan(P2, lat([[1, -1]], 2))


def test_stellar_subdivision_examples():
    bl = stellar_subdivide(P2, (0, 1), (1, 1))
    assert len(bl.rays) == 4
    assert validate_smooth(bl).ok and validate_complete(bl).ok
    assert len(bl.max_cones) == 4

    with pytest.raises(RayNotInterior):
        stellar_subdivide(P2, (0, 1), (1, 0))
    with pytest.raises(RayNotInterior):
        stellar_subdivide(P2, (0, 1), (2, -1))

    five = stellar_subdivide(P1xP1, (0, 2), (1, 1))
    assert len(five.rays) == 5
    assert validate_smooth(five).ok and validate_complete(five).ok


def test_stellar_preserves_completeness_report():
    before = validate_complete(P1xP1).ok
    after = validate_complete(stellar_subdivide(P1xP1, (0, 2), (1, 1))).ok
    assert before == after
    # and on an incomplete fan the defect stays a defect
    half = fan(2, [(1, 0), (-1, 0), (0, 1), (0, -1)], [(0, 2), (1, 2), (1, 3)])
    assert not validate_complete(half).ok
    assert not validate_complete(stellar_subdivide(half, (0, 2), (1, 1))).ok


def test_induced_fan_of_good_fan_is_smooth_complete():
    for L in [lat([[1, 0]], 2), lat([[0, 1]], 2)]:
        sub = induced_fan(P1xP1, L)
        assert validate_smooth(sub).ok
        assert validate_complete(sub).ok


def test_json_roundtrip_bit_exact():
    doc = fan_to_dict(P1xP1)
    assert fan_to_dict(fan_from_dict(doc)) == doc
    assert doc == {
        "rank": 2,
        "rays": [[1, 0], [-1, 0], [0, 1], [0, -1]],
        "max_cones": [[0, 2], [0, 3], [1, 2], [1, 3]],
    }
    with pytest.raises(MalformedFan):
        fan_from_dict({"rank": 2, "rays": [[1, 0]], "max_cones": "nope"})


def test_search_good_fan_fixes_p2_diagonal_in_one_step():
    fixed, steps = search_good_fan(P2, [lat([[1, -1]], 2)])
    assert steps == 1
    assert (1, 1) in fixed.rays
    assert validate_good(fixed, [lat([[1, -1]], 2)]).ok


def test_search_good_fan_skew_arrangement():
    lats = [lat([[1, 1]], 2), lat([[1, -1]], 2)]
    fixed, steps = search_good_fan(P1xP1, lats)
    assert steps == 4
    assert len(fixed.rays) == 8
    assert set(fixed.rays) == {
        (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1),
    }
    assert validate_good(fixed, lats).ok
    assert validate_smooth(fixed).ok and validate_complete(fixed).ok


def test_search_good_fan_budget():
    with pytest.raises(BudgetExhausted):
        search_good_fan(P2, [lat([[1, -1]], 2)], budget=0)
    # a fan that is already good needs no steps even with budget 0
    done, steps = search_good_fan(P1xP1, [lat([[1, 0]], 2)], budget=0)
    assert steps == 0 and done is P1xP1


def test_canonicalize_sorts_rays():
    c = canonicalize(P1xP1)
    assert list(c.rays) == sorted(c.rays)
    assert validate_complete(c).ok
    assert canonicalize(c) == c
