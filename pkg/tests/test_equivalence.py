import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from extremesets.equivalence import (
    are_equivalent,
    canonical_form,
    enumerate_class_representatives,
    orbit,
    uses_full_automorphism_group,
)
from extremesets.groups import make_group
from extremesets.measures import PhaseMeasure, sup_transform
from extremesets.search import Objective, SearchConfig, grid_pass


def cyc(*xs):
    return [(x,) for x in xs]


def rep(G, E):
    return [g[0] for g in canonical_form(G, cyc(*E)).representative]


def test_canonical_examples():
    Z7 = make_group([7])
    assert rep(Z7, [0, 2, 6]) == [0, 1, 3]
    assert rep(Z7, [0, 1, 2]) == [0, 1, 2]
    assert rep(Z7, [5]) == [0]
    G = make_group([2, 4])
    assert canonical_form(G, [(1, 3)]).representative == ((0, 0),)
    with pytest.raises(ValueError):
        canonical_form(Z7, [])


def test_canonical_matches_affine_brute_force():
    for n in range(2, 13):
        for k in range(1, min(n, 5) + 1):
            for E in itertools.combinations(range(n), k):
                assert tuple(rep(make_group([n]), E)) == oracles.affine_canonical(n, E)


def test_equivalence_examples():
    Z12, Z16 = make_group([12]), make_group([16])
    r = are_equivalent(Z12, cyc(0, 2, 4, 6, 8), cyc(0, 2, 3, 4, 7))
    assert not r and r.exact
    assert not are_equivalent(Z16, cyc(0, 2, 4, 6, 8, 10, 12), cyc(0, 1, 2, 4, 5, 7, 11))
    assert are_equivalent(Z16, cyc(0, 1, 5), cyc(3, 4, 8))


def test_product_group_results_are_flagged():
    G = make_group([2, 2])
    assert not uses_full_automorphism_group(G)
    r = are_equivalent(G, [(0, 0), (0, 1)], [(0, 0), (1, 1)])
    assert not r.exact
    if not r:
        assert "generated subgroup" in r.describe()
    assert uses_full_automorphism_group(make_group([3, 4]))


def test_class_enumeration_examples():
    Z7 = make_group([7])
    classes = enumerate_class_representatives(Z7, 3)
    assert [[g[0] for g in c.representative] for c in classes] == [[0, 1, 2], [0, 1, 3]]
    assert len(enumerate_class_representatives(Z7, 2)) == 1
    for n in (2, 5, 12):
        assert [c.representative for c in enumerate_class_representatives(make_group([n]), 1)] == [((0,),)]
    with pytest.raises(ValueError):
        enumerate_class_representatives(make_group([30]), 10, work_cap=1000)


@pytest.mark.parametrize("orders", [(6,), (8,), (9,), (12,), (16,), (2, 4), (2, 2, 2), (3, 3)])
def test_orbits_partition_subsets(orders):
    G = make_group(orders)
    for k in range(1, 5):
        covered = set()
        for c in enumerate_class_representatives(G, k):
            o = orbit(G, c.representative)
            assert not (o & covered)
            covered |= o
        assert covered == set(itertools.combinations(range(G.order), k))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_canonical_form_constant_on_orbits(data):
    n = data.draw(st.integers(2, 30))
    E = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=min(n, 8), unique=True))
    units = [u for u in range(1, n) if math.gcd(u, n) == 1]
    u, t = data.draw(st.sampled_from(units)), data.draw(st.integers(0, n - 1))
    G = make_group([n])
    image = [(u * x + t) % n for x in E]
    assert canonical_form(G, cyc(*E)) == canonical_form(G, cyc(*image))
    # idempotent
    c = canonical_form(G, cyc(*E))
    assert canonical_form(G, c.representative) == c


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_affine_maps_preserve_transform_sup(data):
    n = data.draw(st.integers(3, 20))
    E = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 6), unique=True))
    turns = [Fraction(data.draw(st.integers(0, 11)), 12) for _ in E]
    units = [u for u in range(1, n) if math.gcd(u, n) == 1]
    u, t = data.draw(st.sampled_from(units)), data.draw(st.integers(0, n - 1))
    G = make_group([n])
    mu = PhaseMeasure.unimodular(G, cyc(*E), turns)
    nu = PhaseMeasure.unimodular(G, cyc(*[(u * x + t) % n for x in E]), turns)
    assert abs(sup_transform(mu) - sup_transform(nu)) <= 1e-12


def test_equivalent_sets_have_equal_search_values():
    G = make_group([11])
    E, F = cyc(0, 1, 3, 4), cyc(*sorted((5 * x + 2) % 11 for x in (0, 1, 3, 4)))
    assert are_equivalent(G, E, F)
    config = SearchConfig(objective=Objective.TRANSFORM)
    a = grid_pass(G, E, 8, config=config)
    b = grid_pass(G, F, 8, config=config)
    assert abs(a.best_score - b.best_score) <= 1e-12
