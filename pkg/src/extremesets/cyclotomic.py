"""Exact arithmetic with sums of roots of unity.

A sum ``sum_j c_j zeta_M^j`` vanishes iff the polynomial ``sum_j c_j x^j``
is divisible by the M-th cyclotomic polynomial.  Python integers are
unbounded, so no overflow guard is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .groups import Element, format_element, sub
from .measures import PhaseMeasure

DENOMINATOR_CAP = 10**6


def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial; coefficients low degree first."""
    num = list(num)
    dn = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    if len(num) <= dn:
        return [0], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            quot[i - dn] = c
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    return quot, num[:dn]


def _trim(p: list[int]) -> list[int]:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


@lru_cache(maxsize=None)
def _cyclotomic(M: int) -> tuple[int, ...]:
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num, rem = _poly_divmod(num, list(_cyclotomic(d)))
            if any(rem):
                raise ArithmeticError(f"x^{M}-1 not divisible by Phi_{d}")
    return tuple(_trim(num))


def cyclotomic_polynomial(M: int) -> list[int]:
    """Coefficients of Phi_M, lowest degree first."""
    if M < 1:
        raise ValueError("M must be positive")
    if M > DENOMINATOR_CAP:
        raise ValueError(f"M = {M} exceeds the cap {DENOMINATOR_CAP}")
    return list(_cyclotomic(M))


@dataclass(frozen=True)
class CycloSum:
    """sum_j coeffs[j] * zeta_M^j with integer coefficients."""

    order: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.order:
            raise ValueError("need exactly one coefficient per M-th root")

    @classmethod
    def zero(cls, M: int) -> "CycloSum":
        return cls(M, (0,) * M)

    @classmethod
    def constant(cls, c: int, M: int) -> "CycloSum":
        return cls(M, (c,) + (0,) * (M - 1))

    @classmethod
    def from_turns(cls, turns: Iterable[Fraction], M: int | None = None) -> "CycloSum":
        turns = [Fraction(t) % 1 for t in turns]
        if M is None:
            M = math.lcm(1, *(t.denominator for t in turns))
        coeffs = [0] * M
        for t in turns:
            k = t * M
            if k.denominator != 1:
                raise ValueError(f"turn {t} is not a multiple of 1/{M}")
            coeffs[int(k)] += 1
        return cls(M, tuple(coeffs))

    def __add__(self, other: "CycloSum") -> "CycloSum":
        self._same_order(other)
        return CycloSum(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CycloSum":
        return CycloSum(self.order, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CycloSum") -> "CycloSum":
        return self + (-other)

    def __mul__(self, other: "CycloSum") -> "CycloSum":
        self._same_order(other)
        M = self.order
        out = [0] * M
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % M] += a * b
        return CycloSum(M, tuple(out))

    def _same_order(self, other: "CycloSum") -> None:
        if self.order != other.order:
            raise ValueError("sums of roots of different orders")

    def evaluate(self) -> complex:
        j = np.arange(self.order)
        return complex(np.dot(np.array(self.coeffs, dtype=np.float64), np.exp(2j * np.pi * j / self.order)))

    def exponents(self) -> list[Fraction]:
        """The multiset of turns, negative coefficients repeated as half-turn shifts."""
        out = []
        for j, c in enumerate(self.coeffs):
            t = Fraction(j, self.order)
            out.extend([t] * max(c, 0))
            out.extend([(t + Fraction(1, 2)) % 1] * max(-c, 0))
        return sorted(out)

    def __str__(self) -> str:
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c:+d}*e({Fraction(j, self.order)})")
        return " ".join(terms) or "0"


def is_zero(s: CycloSum) -> bool:
    if not any(s.coeffs):
        return True
    _, rem = _poly_divmod(list(s.coeffs), cyclotomic_polynomial(s.order))
    return not any(rem)


def equals_constant(s: CycloSum, c: int) -> bool:
    return is_zero(s - CycloSum.constant(c, s.order))


@dataclass(frozen=True)
class ExactVerdict:
    extreme: bool
    witness: Element | None = None
    coefficient: CycloSum | None = None
    order: int = 1

    def __bool__(self) -> bool:
        return self.extreme

    def describe(self) -> str:
        if self.extreme:
            return "Extreme"
        exps = ", ".join(str(t) for t in self.coefficient.exponents())
        return f"NotExtreme at {format_element(self.witness)}: sum of e(t) for t in [{exps}]"


def convolution_coefficients(mu: PhaseMeasure) -> tuple[int, dict[Element, CycloSum]]:
    """Every coefficient of mu * mu~ as an exact sum of M-th roots of unity."""
    G = mu.group
    M = math.lcm(1, *(t.denominator for t in mu.turns))
    if M > DENOMINATOR_CAP:
        raise ValueError(f"common denominator {M} exceeds the cap {DENOMINATOR_CAP}")
    scaled = [int(t * M) for t in mu.turns]
    coeffs: dict[Element, list[int]] = {}
    for x, a in zip(mu.points, scaled):
        for y, b in zip(mu.points, scaled):
            h = sub(G, x, y)
            row = coeffs.setdefault(h, [0] * M)
            row[(a - b) % M] += 1
    ordered = sorted(coeffs, key=G.index)
    return M, {h: CycloSum(M, tuple(coeffs[h])) for h in ordered}


def exact_extremality_check(mu: PhaseMeasure) -> ExactVerdict:
    """Decide mu * mu~ = N delta_0 with integer arithmetic only."""
    if not mu.is_unimodular:
        raise ValueError("exact check needs unimodular masses")
    if mu.size == 0:
        raise ValueError("zero measure")
    G = mu.group
    M, coeffs = convolution_coefficients(mu)
    origin = G.reduce([0] * G.rank)
    for h, s in coeffs.items():
        target = mu.size if h == origin else 0
        if not equals_constant(s, target):
            return ExactVerdict(False, h, s, M)
    return ExactVerdict(True, order=M)


def snap_turn(angle: float, max_denominator: int) -> Fraction:
    """Nearest turn p/q with q <= max_denominator to angle / (2 pi)."""
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    x = Fraction((angle / (2 * math.pi)) % 1.0)
    best = x.limit_denominator(max_denominator)
    gap = abs(best - x)
    # an equally close fraction with a smaller denominator wins the tie
    for q in range(1, best.denominator):
        p = round(x * q)
        if abs(Fraction(p, q) - x) == gap:
            return Fraction(p, q) % 1
    return best % 1
