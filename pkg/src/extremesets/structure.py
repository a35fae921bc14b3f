"""Necessary conditions and constructions for extreme sets."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .groups import (
    Element,
    GroupSpec,
    Subgroup,
    add,
    element_order,
    enumerate_elements,
    enumerate_subgroups,
    is_closed,
    pairing_turn,
    quotient,
    sub,
    zero,
)
from .measures import PhaseMeasure


@dataclass(frozen=True)
class DifferenceMultiset:
    group: GroupSpec
    counts: dict[Element, int]

    def __getitem__(self, g: Element) -> int:
        return self.counts.get(self.group.reduce(g), 0)

    def unique_differences(self) -> list[Element]:
        """Nonzero differences occurring exactly once."""
        origin = zero(self.group)
        return [g for g, c in self.counts.items() if c == 1 and g != origin]


def _as_set(G: GroupSpec, E: Iterable[Element]) -> list[Element]:
    return sorted({G.reduce(g) for g in E}, key=G.index)


def difference_multiset(G: GroupSpec, E: Iterable[Element]) -> DifferenceMultiset:
    E = _as_set(G, E)
    if not E:
        raise ValueError("empty set")
    counts: dict[Element, int] = {}
    for x in E:
        for y in E:
            h = sub(G, x, y)
            counts[h] = counts.get(h, 0) + 1
    return DifferenceMultiset(G, dict(sorted(counts.items(), key=lambda kv: G.index(kv[0]))))


def passes_difference_test(G: GroupSpec, E: Iterable[Element]) -> bool:
    """False when some nonzero difference has a unique representation.

    Such a set supports no measure with flat transform, so it is not extreme.
    """
    return not difference_multiset(G, E).unique_differences()


def is_subgroup(G: GroupSpec, E: Iterable[Element]) -> bool:
    return is_closed(G, set(_as_set(G, E)))


def is_coset(G: GroupSpec, E: Iterable[Element]) -> bool:
    E = _as_set(G, E)
    if not E:
        return False
    return is_subgroup(G, [sub(G, x, E[0]) for x in E])


def _is_union_of_cosets(G: GroupSpec, E: set[Element], H: Subgroup) -> bool:
    return all(add(G, x, h) in E for x in E for h in H.elements)


def coset_union_decomposition(G: GroupSpec, E: Iterable[Element]) -> tuple[Subgroup, list[Element]] | None:
    """Write E as a union of N cosets of an N-element subgroup, if possible."""
    E = _as_set(G, E)
    N = math.isqrt(len(E))
    if N * N != len(E):
        return None
    members = set(E)
    for H in enumerate_subgroups(G, N):
        if _is_union_of_cosets(G, members, H):
            reps, covered = [], set()
            for x in E:
                if x not in covered:
                    reps.append(x)
                    covered.update(add(G, x, h) for h in H.elements)
            return H, reps
    return None


def build_coset_union_measure(G: GroupSpec, H: Subgroup, reps: Sequence[Element]) -> PhaseMeasure:
    """Extreme measure on a union of #H distinct cosets of H.

    Each coset g_n + H carries a character of G whose restriction to H is
    different for every n; the restrictions then exhaust the dual of H.
    """
    N = H.order
    reps = [G.reduce(g) for g in reps]
    if len(reps) != N:
        raise ValueError(f"need {N} coset representatives, got {len(reps)}")
    labels = {min((add(G, g, h) for h in H.elements), key=G.index) for g in reps}
    if len(labels) != N:
        raise ValueError("coset representatives are not in distinct cosets")
    characters, seen = [], set()
    for gamma in enumerate_elements(G):
        signature = tuple(pairing_turn(G, gamma, h) for h in H.elements)
        if signature not in seen:
            seen.add(signature)
            characters.append(gamma)
            if len(characters) == N:
                break
    points, turns = [], []
    for g, lam in zip(reps, characters):
        for h in H.elements:
            points.append(add(G, g, h))
            turns.append(pairing_turn(G, lam, h))
    return PhaseMeasure.unimodular(G, points, turns)


def sumset_decomposition(G: GroupSpec, E: Iterable[Element]) -> list[tuple[list[Element], list[Element]]]:
    """All E = A + B with #A * #B = #E and #A, #B >= 2, up to swapping A and B.

    Each pair is normalised so that 0 is in B (hence A is a subset of E).
    """
    E = _as_set(G, E)
    members = set(E)
    n = len(E)
    origin = zero(G)
    diffs = sorted({sub(G, x, y) for x in E for y in E} - {origin}, key=G.index)
    found: dict[frozenset, tuple[list[Element], list[Element]]] = {}
    for d in range(2, n // 2 + 1):
        if n % d:
            continue
        for rest in itertools.combinations(diffs, d - 1):
            B = [origin, *rest]
            A_max = [a for a in E if all(add(G, a, b) in members for b in B)]
            for A in itertools.combinations(A_max, n // d):
                sums = {add(G, a, b) for a in A for b in B}
                if len(sums) == n and sums == members:
                    key = frozenset((_normalised(G, A), _normalised(G, B)))
                    found.setdefault(key, (list(A), B))
    return list(found.values())


def _normalised(G: GroupSpec, S: Sequence[Element]) -> tuple[Element, ...]:
    m = min(S, key=G.index)
    return tuple(sorted((sub(G, x, m) for x in S), key=G.index))


def project_measure(mu: PhaseMeasure, H: Subgroup) -> PhaseMeasure | None:
    """Push mu to G/H when its support points lie in distinct cosets."""
    Q = quotient(mu.group, H)
    images = [Q.project(p) for p in mu.points]
    if len(set(images)) != len(images):
        return None
    return PhaseMeasure(Q.group, tuple(images), mu.turns, mu.magnitudes)


def two_element_psc(n: int) -> float:
    """|1 + exp(pi i / n)|, the smallest sup-norm over unimodular measures on {0, 1} in Z_n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return 2 * math.cos(math.pi / (2 * n))


def two_element_extreme(G: GroupSpec, E: Iterable[Element]) -> bool:
    """A pair is extreme iff it is a coset, i.e. its difference has order 2."""
    E = _as_set(G, E)
    if len(E) != 2:
        raise ValueError("need exactly two elements")
    return element_order(G, sub(G, E[1], E[0])) == 2

