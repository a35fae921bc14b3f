import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremesets.catalog import load_catalog
from extremesets.cyclotomic import exact_extremality_check
from extremesets.groups import make_group
from extremesets.search import (
    CertifiedNotExtreme,
    ExtremeFound,
    Inconclusive,
    Objective,
    SearchConfig,
    SupportProblem,
    certify_not_extreme,
    coefficient_certificate,
    default_mesh_starts,
    grid_pass,
    per_coefficient_bound,
    psc_lower_bound,
    psc_upper_bound,
    residual_window,
    run_search,
    transform_lipschitz,
    window_epsilon,
)
from extremesets.structure import two_element_psc

F = Fraction
Z7_PDS = [(0,), (1,), (2,), (4,)]


def cyc(*xs):
    return [(x,) for x in xs]


def without_timing(record):
    record = dict(record)
    record["passes"] = [{k: v for k, v in p.items() if k != "seconds"} for p in record["passes"]]
    return record


def test_grid_pass_finds_real_measure_on_z7():
    r = grid_pass(make_group([7]), Z7_PDS, 2)
    assert r.best_turns[0].tolist() == [1, 1, 1]
    assert r.best_score <= 1e-12
    assert r.discarded == 0 and r.evaluated == 8


def test_grid_pass_full_z3():
    r = grid_pass(make_group([3]), cyc(0, 1, 2), 3)
    zeros = [k.tolist() for k, s in zip(r.best_turns, r.best_scores) if s <= 1e-12]
    assert [2, 0] in zeros
    assert r.min_score <= 1e-12


def test_grid_pass_singleton():
    G = make_group([5])
    r = grid_pass(G, cyc(3), 2)
    assert r.best_score == 0
    t = grid_pass(G, cyc(3), 2, config=SearchConfig(objective=Objective.TRANSFORM))
    assert t.best_score == pytest.approx(1)


def test_grid_pass_errors():
    G = make_group([7])
    with pytest.raises(ValueError):
        grid_pass(G, Z7_PDS, 1)
    with pytest.raises(ValueError):
        grid_pass(G, Z7_PDS, 4, config=SearchConfig(memory_budget=1))
    with pytest.raises(ValueError):
        grid_pass(G, [], 4)
    with pytest.raises(ValueError):
        SearchConfig(mesh_max=1)
    with pytest.raises(ValueError):
        SearchConfig(refinement_factor=1)


def test_bound_examples():
    assert window_epsilon(6, 64) == pytest.approx(5.890, abs=1e-3)
    assert residual_window(6, 64) == pytest.approx(5.890 * math.sqrt(2), abs=1e-2)
    assert per_coefficient_bound(6, 120) == pytest.approx(0.2618, abs=1e-4)
    assert per_coefficient_bound(2, 4) == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        per_coefficient_bound(1, 4)


def test_certify_not_extreme_examples():
    c = certify_not_extreme(100.0, 64, 6, 0)
    assert c is not None and c.epsilon == pytest.approx(5.890, abs=1e-3)
    assert certify_not_extreme(100.0, 64, 6, 1) is None
    assert certify_not_extreme(0.0, 64, 6, 0) is None
    assert certify_not_extreme(residual_window(6, 64), 64, 6, 0) is None


def test_default_mesh_starts():
    assert default_mesh_starts(4) == [2, 3, 4]
    assert default_mesh_starts(7) == [2, 3, 6, 7]
    assert default_mesh_starts(2) == [2]


def test_run_search_verdicts():
    Z7 = make_group([7])
    r = run_search(Z7, Z7_PDS)
    assert isinstance(r.verdict, ExtremeFound)
    assert exact_extremality_check(r.verdict.measure).extreme
    assert r.mesh_reached == 2

    r = run_search(Z7, cyc(0, 1, 2))
    assert isinstance(r.verdict, CertifiedNotExtreme)
    assert r.discarded == 0 and r.verdict.lower_bound > residual_window(3, r.verdict.mesh)
    assert r.to_record()["verdict"]["kind"] == "CertifiedNotExtreme"


def test_coset_found_at_subgroup_order():
    G = make_group([12])
    r = run_search(G, cyc(1, 5, 9), SearchConfig(mesh_start=3))
    assert isinstance(r.verdict, ExtremeFound) and r.mesh_reached == 3


def test_z10_six_element_set_is_found():
    G = make_group([10])
    r = run_search(G, cyc(0, 1, 2, 3, 4, 7))
    assert isinstance(r.verdict, ExtremeFound)
    assert exact_extremality_check(r.verdict.measure).extreme


def test_tiny_budget_is_inconclusive():
    G = make_group([7])
    per = 4 * 5 + 8
    r = run_search(G, cyc(0, 1, 2, 3, 4, 5), SearchConfig(mesh_max=8, memory_budget=per * 10))
    assert isinstance(r.verdict, Inconclusive)
    assert r.discarded > 0 and "discarded" in r.verdict.reason


def test_psc_upper_bound_examples():
    assert psc_upper_bound(make_group([2]), cyc(0, 1), SearchConfig(mesh_start=4, mesh_max=4)) == pytest.approx(math.sqrt(2))
    assert psc_upper_bound(make_group([7]), Z7_PDS, SearchConfig(mesh_start=2, mesh_max=2)) == pytest.approx(2)


def test_psc_upper_bound_decreases_with_mesh():
    G = make_group([9])
    E = cyc(0, 1, 3, 4)
    values = [psc_upper_bound(G, E, SearchConfig(mesh_start=m, mesh_max=m)) for m in (3, 6, 12, 24)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n", [3, 5, 8])
def test_psc_lower_bound_brackets_two_element_value(n):
    G = make_group([n])
    b = psc_lower_bound(G, cyc(0, 1), target=1.9, meshes=(15, 45))
    exact = two_element_psc(n)
    assert b.lower_bound <= exact + 1e-12 <= b.upper_bound + 2e-12
    assert b.discarded == 0


def test_coefficient_certificate():
    G = make_group([7])
    c = coefficient_certificate(G, cyc(0, 1, 2), meshes=(15, 45))
    assert c.certified and c.survivors == 0 and c.discarded == 0
    c = coefficient_certificate(G, Z7_PDS, meshes=(15, 45))
    assert not c.certified and c.survivors > 0
    with pytest.raises(ValueError):
        coefficient_certificate(G, cyc(0, 1), meshes=(15, 30))


def test_search_is_deterministic():
    G = make_group([11])
    E = cyc(0, 1, 3, 7)
    config = dict(mesh_max=16, objective=Objective.TRANSFORM)
    a = run_search(G, E, SearchConfig(**config)).to_record()
    b = run_search(G, E, SearchConfig(**config)).to_record()
    c = run_search(G, E, SearchConfig(**config, workers=2, chunk_size=97)).to_record()
    assert without_timing(a) == without_timing(b) == without_timing(c)


def test_checkpoint_resume_matches_uninterrupted(tmp_path):
    G = make_group([11])
    E = cyc(0, 1, 3, 7)
    base = dict(objective=Objective.TRANSFORM, mesh_start=3)
    full = run_search(G, E, SearchConfig(mesh_max=48, **base)).to_record()
    path = str(tmp_path / "ck.npz")
    first = run_search(G, E, SearchConfig(mesh_max=12, checkpoint=path, **base)).to_record()
    rest = run_search(G, E, SearchConfig(mesh_max=48, checkpoint=path, **base)).to_record()
    head = without_timing(first)["passes"]
    tail = without_timing(rest)["passes"]
    assert head + tail == without_timing(full)["passes"]
    assert rest["best_value"] == pytest.approx(full["best_value"], abs=1e-12)


def test_mismatched_checkpoint_is_ignored(tmp_path):
    G = make_group([11])
    path = str(tmp_path / "ck.npz")
    run_search(G, cyc(0, 1, 3), SearchConfig(objective=Objective.TRANSFORM, mesh_max=8, checkpoint=path))
    other = run_search(G, cyc(0, 1, 4), SearchConfig(objective=Objective.TRANSFORM, mesh_max=8, checkpoint=path))
    assert other.passes and other.passes[0]["mesh"] == 2


# -- properties --------------------------------------------------------------------


def phases_of(turns):
    return np.exp(2j * np.pi * np.asarray(turns, dtype=float))[None, :]


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_objectives_ignore_a_common_rotation(data):
    n = data.draw(st.integers(3, 16))
    E = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 7), unique=True))
    problem = SupportProblem(make_group([n]), cyc(*E))
    turns = np.array([data.draw(st.floats(0, 1)) for _ in range(problem.N)])
    c = data.draw(st.floats(0, 1))
    Z, W = phases_of(turns), phases_of(turns + c)
    assert abs(problem.residual(Z)[0] - problem.residual(W)[0]) <= 1e-12
    assert abs(problem.transform_max(Z)[0] - problem.transform_max(W)[0]) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_nearest_grid_point_stays_inside_the_bounds(data):
    n = data.draw(st.integers(3, 16))
    E = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 7), unique=True))
    mesh = data.draw(st.integers(2, 200))
    problem = SupportProblem(make_group([n]), cyc(*E))
    N = problem.N
    turns = np.array([0.0] + [data.draw(st.floats(0, 1)) for _ in range(N - 1)])
    grid = np.round(turns * mesh) / mesh
    Z, W = phases_of(turns), phases_of(grid)
    assert abs(problem.residual(Z)[0] - problem.residual(W)[0]) <= window_epsilon(N, mesh) * math.sqrt(2) + 1e-9
    dc = np.abs(problem.coefficients(Z) - problem.coefficients(W)).max()
    assert dc <= per_coefficient_bound(N, mesh) + 1e-9
    dt = np.abs(np.abs(Z @ problem.characters) - np.abs(W @ problem.characters)).max()
    assert dt <= transform_lipschitz(N, mesh) + 1e-9


@settings(max_examples=300, deadline=None)
@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_l1_of_parts_is_within_root_two_of_modulus(z):
    s = abs(z.real) + abs(z.imag)
    assert abs(z) <= s * (1 + 1e-12) + 1e-300
    assert s <= math.sqrt(2) * abs(z) * (1 + 1e-12) + 1e-300


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_finer_full_grid_never_does_worse(data):
    n = data.draw(st.integers(3, 12))
    E = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=min(n, 4), unique=True))
    m = data.draw(st.integers(2, 6))
    G = make_group([n])
    for objective in Objective:
        config = SearchConfig(objective=objective)
        coarse = grid_pass(G, cyc(*E), m, config=config)
        fine = grid_pass(G, cyc(*E), 2 * m, config=config)
        assert fine.best_score <= coarse.best_score + 1e-12


def _catalog_measures():
    for e in load_catalog():
        for k in range(len(e.measures)):
            mu = e.measure(k)
            if exact_extremality_check(mu).extreme:
                yield e, mu


def test_catalog_measures_sit_on_grids_inside_the_window():
    checked = 0
    for e, mu in _catalog_measures():
        problem = SupportProblem(e.group, e.set)
        turns = dict(zip(mu.points, mu.turns))
        rel = [(turns[p] - turns[problem.points[0]]) % 1 for p in problem.points]
        d = math.lcm(*(t.denominator for t in rel))
        for mesh in (max(d, 2), 2 * d, 3 * d):
            K = np.array([[int(t * mesh) for t in rel[1:]]])
            score = problem.residual(problem.phases(K, mesh))[0]
            assert score <= 1e-9 < residual_window(problem.N, mesh)
        checked += 1
    assert checked >= 40


def test_window_keeps_catalog_measures_in_small_full_grids():
    checked = 0
    for e, mu in _catalog_measures():
        problem = SupportProblem(e.group, e.set)
        turns = dict(zip(mu.points, mu.turns))
        rel = [(turns[p] - turns[problem.points[0]]) % 1 for p in problem.points]
        mesh = max(2, math.lcm(*(t.denominator for t in rel)))
        if mesh ** problem.n_free > 200_000:
            continue
        r = grid_pass(e.group, e.set, mesh, problem=problem)
        target = [int(t * mesh) for t in rel[1:]]
        assert r.discarded == 0
        assert target in r.kept.turns.tolist()
        checked += 1
    assert checked >= 8
