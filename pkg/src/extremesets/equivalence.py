"""Canonical forms of subsets under translations and automorphisms.

For cyclic groups (and products of cyclic groups of pairwise coprime order)
the maps ``x -> u*x + t`` are the whole affine group, so canonical forms are
exact.  For other products we only use the automorphisms generated by
per-coordinate unit multiplications and permutations of equal-order factors;
results from that subgroup carry ``exact=False``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .groups import Element, GroupSpec, units

WORK_CAP = 10**8


@dataclass(frozen=True)
class SubsetClass:
    group: GroupSpec
    representative: tuple[Element, ...]
    exact: bool


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    exact: bool

    def __bool__(self) -> bool:
        return self.equivalent

    def describe(self) -> str:
        if self.equivalent:
            return "equivalent"
        if self.exact:
            return "not equivalent"
        return "not equivalent under the generated subgroup of automorphisms"


def uses_full_automorphism_group(G: GroupSpec) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(G.orders, 2))


@lru_cache(maxsize=64)
def automorphism_table(G: GroupSpec) -> np.ndarray:
    """(count, #G) array; row k maps element indices through the k-th automorphism."""
    coords = G.coordinate_table
    blocks: dict[int, list[int]] = {}
    for j, n in enumerate(G.orders):
        blocks.setdefault(n, []).append(j)
    perms = []
    for choice in itertools.product(*(itertools.permutations(idx) for idx in blocks.values())):
        q = list(range(G.rank))
        for idx, p in zip(blocks.values(), choice):
            for dst, src in zip(idx, p):
                q[dst] = src
        perms.append(q)
    rows = []
    seen = set()
    for scale_ in itertools.product(*(units(n) for n in G.orders)):
        scaled = coords * np.array(scale_, dtype=np.int64)
        for p in perms:
            row = G.indices(scaled[:, p])
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                rows.append(row)
    return np.array(rows, dtype=np.int64)


def _canonical_indices(G: GroupSpec, idx: np.ndarray) -> tuple[int, ...]:
    autos = automorphism_table(G)
    images = autos[:, idx]  # (A, k)
    table = G.addition_table
    negation = G.negation
    best = None
    for image in images:
        for x in image:
            cand = tuple(sorted(table[negation[x]][image].tolist()))
            if best is None or cand < best:
                best = cand
    return best


def canonical_form(G: GroupSpec, E: Iterable[Element]) -> SubsetClass:
    elems = sorted({G.reduce(g) for g in E}, key=G.index)
    if not elems:
        raise ValueError("canonical form of the empty set")
    idx = np.array([G.index(g) for g in elems], dtype=np.int64)
    rep = _canonical_indices(G, idx)
    return SubsetClass(G, tuple(G.element(i) for i in rep), uses_full_automorphism_group(G))


def are_equivalent(G: GroupSpec, E: Iterable[Element], F: Iterable[Element]) -> EquivalenceResult:
    a = canonical_form(G, E)
    b = canonical_form(G, F)
    return EquivalenceResult(a.representative == b.representative, a.exact)


def enumerate_class_representatives(G: GroupSpec, size: int, work_cap: int = WORK_CAP) -> list[SubsetClass]:
    """One representative per orbit of ``size``-subsets, each containing 0."""
    if size < 1 or size > G.order:
        raise ValueError(f"size must be in [1, {G.order}]")
    work = math.comb(G.order - 1, size - 1)
    if work > work_cap:
        raise ValueError(f"{work} candidate subsets exceed the work cap {work_cap}")
    exact = uses_full_automorphism_group(G)
    out = []
    for rest in itertools.combinations(range(1, G.order), size - 1):
        idx = (0,) + rest
        if _canonical_indices(G, np.array(idx, dtype=np.int64)) == idx:
            out.append(SubsetClass(G, tuple(G.element(i) for i in idx), exact))
    return out


def orbit(G: GroupSpec, E: Iterable[Element]) -> set[tuple[int, ...]]:
    """All images of E (as sorted index tuples) under the automorphisms in use and translations."""
    idx = np.array(sorted(G.index(G.reduce(g)) for g in E), dtype=np.int64)
    table = G.addition_table
    out = set()
    for image in automorphism_table(G)[:, idx]:
        for t in range(G.order):
            out.add(tuple(sorted(table[t][image].tolist())))
    return out
