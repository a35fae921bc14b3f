import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from extremesets.groups import (
    GroupError,
    add,
    element_order,
    enumerate_elements,
    enumerate_subgroups,
    format_elements,
    make_group,
    make_subgroup,
    neg,
    pairing_turn,
    parse_elements,
    parse_group,
    quotient,
    units,
    zero,
)

small_orders = st.lists(st.integers(2, 6), min_size=1, max_size=3)


def test_make_group():
    assert make_group([7]).order == 7
    assert make_group([2, 2, 2]).order == 8
    for bad in ([1], [], [0, 3], [2**40, 2**40]):
        with pytest.raises(GroupError):
            make_group(bad)


def test_arithmetic_examples():
    Z12, Z2Z4 = make_group([12]), make_group([2, 4])
    assert add(Z12, (7,), (9,)) == (4,)
    assert neg(Z2Z4, (1, 3)) == (1, 1)
    assert add(Z2Z4, (1, 3), zero(Z2Z4)) == (1, 3)
    with pytest.raises(GroupError):
        add(Z12, (1, 2), (3,))


def test_pairing_examples():
    assert pairing_turn(make_group([12]), (1,), (6,)) == Fraction(1, 2)
    assert pairing_turn(make_group([2, 4]), (1, 1), (1, 2)) == 0
    assert pairing_turn(make_group([7]), (3,), (2,)) == Fraction(6, 7)


def test_enumeration_order():
    assert enumerate_elements(make_group([3])) == [(0,), (1,), (2,)]
    assert enumerate_elements(make_group([2, 2])) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert len(enumerate_elements(make_group([2, 4]))) == 8
    with pytest.raises(GroupError):
        enumerate_elements(make_group([10, 10]), cap=50)


def test_index_roundtrip():
    G = make_group([3, 4, 5])
    for i, g in enumerate(enumerate_elements(G)):
        assert G.index(g) == i and G.element(i) == g


def test_units():
    assert units(12) == [1, 5, 7, 11]
    assert units(7) == [1, 2, 3, 4, 5, 6]
    assert units(2) == [1]


def test_subgroup_examples():
    assert [H.elements for H in enumerate_subgroups(make_group([12]), 3)] == [((0,), (4,), (8,))]
    (H,) = enumerate_subgroups(make_group([7]), 7)
    assert H.order == 7
    assert len(enumerate_subgroups(make_group([2, 2]), 2)) == 3


@pytest.mark.parametrize("orders", [(4,), (2, 2), (2, 4), (3, 3), (2, 6), (4, 4)])
def test_subgroups_match_brute_force(orders):
    # rank 2, so every subgroup is generated by a pair of elements
    found = {frozenset(H.elements) for H in enumerate_subgroups(make_group(orders))}
    assert found == oracles.subgroups(orders)


def test_subgroups_of_elementary_abelian_group():
    # 1 + 7 + 7 + 1 subspaces of F_2^3
    assert len(enumerate_subgroups(make_group([2, 2, 2]))) == 16


def test_subgroup_count_of_cyclic_groups():
    for n in range(2, 61):
        assert len(enumerate_subgroups(make_group([n]))) == len(oracles.divisors(n))


def test_quotient_examples():
    Z8 = make_group([8])
    Q = quotient(Z8, make_subgroup(Z8, [(0,), (4,)]))
    assert Q.group.order == 4
    assert Q.coset_label((5,)) == (1,)
    assert Q.project((0,)) == zero(Q.group)

    Z6 = make_group([6])
    Q = quotient(Z6, make_subgroup(Z6, [(0,)]))
    assert Q.group.order == 6 and len({Q.project(g) for g in enumerate_elements(Z6)}) == 6

    V = make_group([2, 2])
    Q = quotient(V, make_subgroup(V, [(0, 0), (1, 1)]))
    assert Q.group.order == 2
    assert Q.project((1, 0)) == Q.project((0, 1)) != Q.project((0, 0))


def test_quotient_rejects_non_subgroup():
    from extremesets.groups import Subgroup

    Z8 = make_group([8])
    with pytest.raises(GroupError):
        quotient(Z8, Subgroup(Z8, ((0,), (3,))))


@pytest.mark.parametrize("orders", [(8,), (12,), (2, 4), (2, 6), (3, 3), (2, 2, 2), (4, 4), (2, 2, 4)])
def test_quotient_is_homomorphism(orders):
    G = make_group(orders)
    elems = enumerate_elements(G)
    for H in enumerate_subgroups(G):
        Q = quotient(G, H)
        assert Q.group.order * H.order == G.order
        for a in elems:
            for b in elems:
                assert Q.project(add(G, a, b)) == add(Q.group, Q.project(a), Q.project(b))
        # kernel is exactly H
        assert {g for g in elems if Q.project(g) == zero(Q.group)} == set(H.elements)


@settings(max_examples=60, deadline=None)
@given(small_orders, st.data())
def test_character_orthogonality(orders, data):
    G = make_group(orders)
    gamma = tuple(data.draw(st.integers(0, n - 1)) for n in orders)
    total = sum(cmath.exp(2j * math.pi * float(pairing_turn(G, gamma, g))) for g in enumerate_elements(G))
    if any(gamma):
        assert abs(total) <= 1e-10
    else:
        assert abs(total - G.order) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(small_orders, st.data())
def test_pairing_is_bilinear(orders, data):
    G = make_group(orders)
    pick = lambda: tuple(data.draw(st.integers(0, n - 1)) for n in orders)
    gamma, a, b = pick(), pick(), pick()
    assert pairing_turn(G, gamma, add(G, a, b)) == (pairing_turn(G, gamma, a) + pairing_turn(G, gamma, b)) % 1
    assert pairing_turn(G, gamma, a) == oracles.pairing(orders, gamma, a)
    assert pairing_turn(G, gamma, a) == pairing_turn(G, a, gamma)


def test_element_order():
    G = make_group([2, 6])
    assert element_order(G, (1, 2)) == 6
    assert element_order(G, (0, 3)) == 2
    assert element_order(G, (0, 0)) == 1


def test_literals():
    assert parse_group("2,4") == parse_group("2x4") == make_group([2, 4])
    G = parse_group("2,4")
    assert G.literal() == "2,4"
    pts = parse_elements(G, "(0,0);(1,3)")
    assert pts == [(0, 0), (1, 3)]
    assert format_elements(pts) == "(0,0);(1,3)"
    Z7 = parse_group("7")
    assert parse_elements(Z7, "0,1,9") == [(0,), (1,), (2,)]
    with pytest.raises(GroupError):
        parse_elements(G, "0,1")
    with pytest.raises(GroupError):
        parse_group("seven")
