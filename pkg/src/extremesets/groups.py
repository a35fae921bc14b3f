"""Finite abelian groups as products of cyclic groups.

Elements and characters are plain tuples of residues.  The dual group is
identified with the group itself through the pairing
``<gamma, g> = exp(2 pi i sum_j gamma_j g_j / n_j)``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Element = tuple[int, ...]
Character = tuple[int, ...]

INT64_MAX = 2**63 - 1
ENUMERATION_CAP = 10**6
SUBGROUP_CAP = 10**4


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """Z_{n_1} x ... x Z_{n_k}.  An empty ``orders`` is the trivial group."""

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        if any(n < 2 for n in self.orders):
            raise GroupError(f"cyclic factor orders must be >= 2, got {self.orders}")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def is_cyclic_factor(self) -> bool:
        return self.rank == 1

    def __str__(self) -> str:
        if not self.orders:
            return "Z1"
        return " x ".join(f"Z{n}" for n in self.orders)

    def literal(self) -> str:
        return ",".join(str(n) for n in self.orders)

    def reduce(self, g: Iterable[int]) -> Element:
        coords = tuple(int(x) for x in g)
        if len(coords) != self.rank:
            raise GroupError(f"element {coords} has wrong shape for {self}")
        return tuple(x % n for x, n in zip(coords, self.orders))

    def index(self, g: Element) -> int:
        """Mixed-radix position of g, last coordinate fastest."""
        i = 0
        for x, n in zip(g, self.orders):
            i = i * n + x
        return i

    def element(self, i: int) -> Element:
        coords = []
        for n in reversed(self.orders):
            i, r = divmod(i, n)
            coords.append(r)
        return tuple(reversed(coords))

    @cached_property
    def _strides(self) -> np.ndarray:
        strides = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            strides[j] = strides[j + 1] * self.orders[j + 1]
        return strides

    @cached_property
    def coordinate_table(self) -> np.ndarray:
        """(order, rank) array of all elements in enumeration order."""
        if self.order > ENUMERATION_CAP:
            raise GroupError(f"group order {self.order} exceeds enumeration cap")
        idx = np.arange(self.order, dtype=np.int64)
        return (idx[:, None] // self._strides[None, :]) % np.array(self.orders, dtype=np.int64)

    def indices(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64) % np.array(self.orders, dtype=np.int64)
        return coords @ self._strides

    @cached_property
    def addition_table(self) -> np.ndarray:
        """table[i, j] = index(element(i) + element(j))."""
        c = self.coordinate_table
        return self.indices(c[:, None, :] + c[None, :, :])

    @cached_property
    def negation(self) -> np.ndarray:
        return self.indices(-self.coordinate_table)

    @cached_property
    def character_matrix(self) -> np.ndarray:
        """M[gamma, g] = exp(-2 pi i <gamma, g>), the kernel of the transform."""
        c = self.coordinate_table
        turns = np.zeros((self.order, self.order), dtype=np.float64)
        for j, n in enumerate(self.orders):
            # reduce the integer products first so the phases stay exact
            turns += np.mod(np.outer(c[:, j], c[:, j]), n) / n
        return np.exp(-2j * np.pi * turns)


def make_group(orders: Sequence[int] | int) -> GroupSpec:
    if isinstance(orders, int):
        orders = [orders]
    orders = [int(n) for n in orders]
    if not orders:
        raise GroupError("a group needs at least one cyclic factor")
    if any(n <= 1 for n in orders):
        raise GroupError(f"cyclic factor orders must be >= 2, got {orders}")
    if math.prod(orders) > INT64_MAX:
        raise GroupError("group order does not fit in 64 bits")
    return GroupSpec(tuple(orders))


def parse_group(text: str) -> GroupSpec:
    """Parse ``"12"`` or ``"2,2,3"``."""
    try:
        orders = [int(t) for t in text.replace("x", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise GroupError(f"bad group literal {text!r}") from exc
    return make_group(orders)


def zero(G: GroupSpec) -> Element:
    return (0,) * G.rank


def _check(G: GroupSpec, *elements: Element) -> None:
    for g in elements:
        if len(g) != G.rank:
            raise GroupError(f"element {g} has wrong shape for {G}")


def add(G: GroupSpec, a: Element, b: Element) -> Element:
    _check(G, a, b)
    return tuple((x + y) % n for x, y, n in zip(a, b, G.orders))


def sub(G: GroupSpec, a: Element, b: Element) -> Element:
    _check(G, a, b)
    return tuple((x - y) % n for x, y, n in zip(a, b, G.orders))


def neg(G: GroupSpec, a: Element) -> Element:
    _check(G, a)
    return tuple(-x % n for x, n in zip(a, G.orders))


def scale(G: GroupSpec, k: int, a: Element) -> Element:
    return tuple(k * x % n for x, n in zip(a, G.orders))


def pairing_turn(G: GroupSpec, gamma: Character, g: Element) -> Fraction:
    """Exponent of <gamma, g> in turns, reduced into [0, 1)."""
    _check(G, gamma, g)
    return sum((Fraction(c * x, n) for c, x, n in zip(gamma, g, G.orders)), Fraction(0)) % 1


def enumerate_elements(G: GroupSpec, cap: int = ENUMERATION_CAP) -> list[Element]:
    if G.order > cap:
        raise GroupError(f"group order {G.order} exceeds enumeration cap {cap}")
    return list(itertools.product(*(range(n) for n in G.orders)))


def element_order(G: GroupSpec, g: Element) -> int:
    return math.lcm(1, *(n // math.gcd(n, x) for x, n in zip(g, G.orders)))


def units(n: int) -> list[int]:
    if n < 2:
        raise GroupError("units need n >= 2")
    return [u for u in range(1, n) if math.gcd(u, n) == 1]


@dataclass(frozen=True)
class Subgroup:
    parent: GroupSpec
    elements: tuple[Element, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(sorted(self.elements)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g in self._members

    @cached_property
    def _members(self) -> frozenset[Element]:
        return frozenset(self.elements)

    def cosets(self) -> list[tuple[Element, ...]]:
        seen: set[Element] = set()
        out = []
        for g in enumerate_elements(self.parent):
            if g in seen:
                continue
            coset = tuple(sorted(add(self.parent, g, h) for h in self.elements))
            seen.update(coset)
            out.append(coset)
        return out


def closure(G: GroupSpec, generators: Iterable[Element]) -> frozenset[Element]:
    members = {zero(G)}
    frontier = [zero(G)]
    gens = [G.reduce(g) for g in generators]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = add(G, x, g)
                if y not in members:
                    members.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(members)


def make_subgroup(G: GroupSpec, elements: Iterable[Element]) -> Subgroup:
    elems = {G.reduce(g) for g in elements}
    if not is_closed(G, elems):
        raise GroupError("elements do not form a subgroup")
    return Subgroup(G, tuple(elems))


def is_closed(G: GroupSpec, elems: set[Element] | frozenset[Element]) -> bool:
    if zero(G) not in elems:
        return False
    return all(sub(G, a, b) in elems for a in elems for b in elems)


def enumerate_subgroups(G: GroupSpec, order: int | None = None) -> list[Subgroup]:
    """Every subgroup, built by closing generator sets.

    A finite abelian group of rank k is generated by at most k elements, so
    closing all sets of up to ``rank`` generators reaches every subgroup.
    """
    if G.order > SUBGROUP_CAP:
        raise GroupError(f"group order {G.order} exceeds subgroup cap {SUBGROUP_CAP}")
    if order is not None and G.order % order:
        return []
    found: set[frozenset[Element]] = {frozenset([zero(G)])}
    layer = {frozenset([zero(G)])}
    elements = enumerate_elements(G)
    for _ in range(max(G.rank, 1)):
        nxt = set()
        for H in layer:
            for g in elements:
                if g in H:
                    continue
                K = closure(G, list(H) + [g])
                if K not in found:
                    found.add(K)
                    nxt.add(K)
        layer = nxt
    groups = [Subgroup(G, tuple(H)) for H in found if order is None or len(H) == order]
    return sorted(groups, key=lambda H: (H.order, H.elements))


@dataclass(frozen=True)
class Quotient:
    """G/H in invariant-factor form together with the projection map."""

    source: GroupSpec
    subgroup: Subgroup
    group: GroupSpec
    transform: tuple[tuple[int, ...], ...]
    moduli: tuple[int, ...]
    labels: dict[Element, Element] = field(compare=False, repr=False)

    def project(self, g: Element) -> Element:
        g = self.source.reduce(g)
        coords = []
        for col, d in zip(self.transform, self.moduli):
            coords.append(sum(x * c for x, c in zip(g, col)) % d)
        return tuple(coords)

    def coset_label(self, g: Element) -> Element:
        """Minimal element of the coset g + H in enumeration order."""
        return self.labels[self.project(g)]


def quotient(G: GroupSpec, H: Subgroup) -> Quotient:
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_decomp

    if H.parent != G or not is_closed(G, set(H.elements)):
        raise GroupError("H is not a subgroup of G")
    # the relation lattice: lifts of H together with n_j e_j
    rows = [list(h) for h in H.elements if any(h)]
    rows += [[n if i == j else 0 for i in range(G.rank)] for j, n in enumerate(G.orders)]
    D, _, V = smith_normal_decomp(Matrix(rows))
    diag = [abs(int(D[i, i])) for i in range(G.rank)]
    transform, moduli = [], []
    for j, d in enumerate(diag):
        if d > 1:
            transform.append(tuple(int(V[i, j]) for i in range(G.rank)))
            moduli.append(d)
    order_ = sorted(range(len(moduli)), key=lambda j: moduli[j])
    transform = [transform[j] for j in order_]
    moduli = [moduli[j] for j in order_]
    Q = GroupSpec(tuple(moduli))
    labels: dict[Element, Element] = {}
    quo = Quotient(G, H, Q, tuple(transform), tuple(moduli), labels)
    for g in enumerate_elements(G):
        labels.setdefault(quo.project(g), g)
    if len(labels) * H.order != G.order:
        raise GroupError("quotient construction failed")
    return quo


def parse_element(G: GroupSpec, text: str) -> Element:
    text = text.strip().strip("()")
    parts = [int(t) for t in text.split(",") if t.strip()]
    return G.reduce(parts)


def parse_elements(G: GroupSpec, text: str) -> list[Element]:
    """``"0,1,2,4"`` for cyclic groups, ``"(0,0);(1,3)"`` or ``"(0,0),(1,3)"`` otherwise."""
    text = text.strip()
    if not text:
        return []
    if "(" in text:
        return [parse_element(G, m) for m in re.findall(r"\(([^)]*)\)", text)]
    if G.rank != 1:
        raise GroupError("product-group elements must be written as tuples, e.g. (0,1)")
    return [G.reduce([int(t)]) for t in text.replace(";", ",").split(",") if t.strip()]


def format_element(g: Element) -> str:
    if len(g) == 1:
        return str(g[0])
    return "(" + ",".join(str(x) for x in g) + ")"


def format_elements(elements: Iterable[Element], sep: str | None = None) -> str:
    elements = list(elements)
    if sep is None:
        sep = "," if elements and len(elements[0]) == 1 else ";"
    return sep.join(format_element(g) for g in elements)

