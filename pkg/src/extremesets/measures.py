"""Finitely supported measures, their transforms and the numeric extremality screens."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .groups import Element, GroupSpec, format_element, neg, pairing_turn

DEFAULT_TOL = 1e-9


def as_turn(x: Fraction | int | str) -> Fraction:
    return Fraction(x) % 1


@dataclass(frozen=True)
class PhaseMeasure:
    """Masses ``magnitude * exp(2 pi i turn)`` on finitely many points.

    Points are kept in enumeration order and zero magnitudes are dropped, so
    two equal measures compare equal.
    """

    group: GroupSpec
    points: tuple[Element, ...]
    turns: tuple[Fraction, ...]
    magnitudes: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        G = self.group
        mags = self.magnitudes or (Fraction(1),) * len(self.points)
        if not (len(self.points) == len(self.turns) == len(mags)):
            raise ValueError("points, turns and magnitudes must have equal length")
        merged: dict[Element, tuple[Fraction, Fraction]] = {}
        for p, t, m in zip(self.points, self.turns, mags):
            p = G.reduce(p)
            m = Fraction(m)
            if m < 0:
                raise ValueError("magnitudes must be nonnegative")
            if p in merged:
                raise ValueError(f"point {format_element(p)} given twice")
            if m:
                merged[p] = (as_turn(t), m)
        keys = sorted(merged, key=G.index)
        object.__setattr__(self, "points", tuple(keys))
        object.__setattr__(self, "turns", tuple(merged[k][0] for k in keys))
        object.__setattr__(self, "magnitudes", tuple(merged[k][1] for k in keys))

    @classmethod
    def unimodular(cls, G: GroupSpec, points: Iterable[Element], turns: Iterable) -> "PhaseMeasure":
        return cls(G, tuple(points), tuple(as_turn(t) for t in turns))

    @classmethod
    def from_mapping(cls, G: GroupSpec, masses: Mapping[Element, Fraction]) -> "PhaseMeasure":
        return cls.unimodular(G, masses.keys(), masses.values())

    @property
    def support(self) -> tuple[Element, ...]:
        return self.points

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def is_unimodular(self) -> bool:
        return all(m == 1 for m in self.magnitudes)

    def masses(self) -> dict[Element, tuple[Fraction, Fraction]]:
        return {p: (m, t) for p, t, m in zip(self.points, self.turns, self.magnitudes)}

    def vector(self) -> np.ndarray:
        v = np.zeros(self.group.order, dtype=np.complex128)
        for p, t, m in zip(self.points, self.turns, self.magnitudes):
            v[self.group.index(p)] = float(m) * np.exp(2j * np.pi * float(t))
        return v

    def translate(self, g: Element) -> "PhaseMeasure":
        G = self.group
        pts = tuple(tuple(x + y for x, y in zip(p, g)) for p in self.points)
        return PhaseMeasure(G, pts, self.turns, self.magnitudes)

    def modulate(self, gamma: Element) -> "PhaseMeasure":
        """Multiply by the character gamma."""
        turns = tuple(t + pairing_turn(self.group, gamma, p) for p, t in zip(self.points, self.turns))
        return PhaseMeasure(self.group, self.points, turns, self.magnitudes)

    def rotate(self, turn: Fraction) -> "PhaseMeasure":
        return PhaseMeasure(self.group, self.points, tuple(t + turn for t in self.turns), self.magnitudes)

    def __str__(self) -> str:
        terms = []
        for p, t, m in zip(self.points, self.turns, self.magnitudes):
            coef = "" if m == 1 else f"{m}*"
            terms.append(f"{coef}e({t})d{format_element(p)}")
        return " + ".join(terms) or "0"


@dataclass(frozen=True)
class ComplexMeasure:
    """A measure with arbitrary complex masses, stored densely by element index."""

    group: GroupSpec
    values: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def vector(self) -> np.ndarray:
        return self.values

    @property
    def support(self) -> tuple[Element, ...]:
        idx = np.flatnonzero(np.abs(self.values) > 1e-12)
        return tuple(self.group.element(int(i)) for i in idx)

    def mass(self, g: Element) -> complex:
        return complex(self.values[self.group.index(self.group.reduce(g))])


AnyMeasure = Union[PhaseMeasure, ComplexMeasure]


@dataclass(frozen=True)
class Spectrum:
    group: GroupSpec
    values: np.ndarray

    def __getitem__(self, gamma: Element) -> complex:
        return complex(self.values[self.group.index(self.group.reduce(gamma))])

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


def _vector(mu: AnyMeasure) -> np.ndarray:
    return mu.vector()


def adjoint(mu: AnyMeasure) -> AnyMeasure:
    """mu~({g}) = conj(mu({-g}))."""
    G = mu.group
    if isinstance(mu, PhaseMeasure):
        return PhaseMeasure(
            G,
            tuple(neg(G, p) for p in mu.points),
            tuple(-t for t in mu.turns),
            mu.magnitudes,
        )
    return ComplexMeasure(G, np.conj(mu.values[G.negation]))


def convolve(mu: AnyMeasure, nu: AnyMeasure) -> ComplexMeasure:
    if mu.group != nu.group:
        raise ValueError("measures live on different groups")
    G = mu.group
    a, b = _vector(mu), _vector(nu)
    out = np.zeros(G.order, dtype=np.complex128)
    table = G.addition_table
    for i in np.flatnonzero(a):
        np.add.at(out, table[i], a[i] * b)
    return ComplexMeasure(G, out)


def transform(mu: AnyMeasure) -> Spectrum:
    G = mu.group
    return Spectrum(G, G.character_matrix @ _vector(mu))


def total_variation(mu: AnyMeasure) -> float:
    return float(np.abs(_vector(mu)).sum())


def sup_transform(mu: AnyMeasure) -> float:
    return float(transform(mu).magnitudes.max())


def _support_size(mu: AnyMeasure) -> int:
    return len(mu.support)


def is_extreme_numeric(mu: AnyMeasure, tol: float = DEFAULT_TOL) -> bool:
    n = _support_size(mu)
    if n == 0:
        raise ValueError("zero measure")
    return abs(sup_transform(mu) - total_variation(mu) / np.sqrt(n)) <= tol


def is_tcav_numeric(mu: AnyMeasure, tol: float = DEFAULT_TOL) -> bool:
    """Flat |transform|, up to tol."""
    if _support_size(mu) == 0:
        raise ValueError("zero measure")
    mags = transform(mu).magnitudes
    return float(mags.max() - mags.min()) <= tol


def tcav_residual(mu: AnyMeasure) -> float:
    """Total variation of mu*mu~ - c delta_0 with c = sum |mu(g)|^2."""
    v = convolve(mu, adjoint(mu)).values.copy()
    v[0] -= np.sum(np.abs(_vector(mu)) ** 2)
    return float(np.abs(v).sum())


def is_tcav_by_convolution(mu: AnyMeasure, tol: float = DEFAULT_TOL) -> bool:
    if _support_size(mu) == 0:
        raise ValueError("zero measure")
    return tcav_residual(mu) <= tol


def dual_measure(mu: AnyMeasure) -> ComplexMeasure:
    """The transform of a full-support measure, viewed as a measure on the dual.

    Masses are mu^(gamma) / sqrt(#G), which are unimodular exactly when mu is
    extreme for G.  The scale factor is recorded in ``metadata``.
    """
    G = mu.group
    if _support_size(mu) != G.order:
        raise ValueError("dual measure needs a measure supported on the whole group")
    scale = 1.0 / np.sqrt(G.order)
    return ComplexMeasure(G, transform(mu).values * scale, {"scale": scale, "scale_text": f"1/sqrt({G.order})"})


def measure_from_vector(G: GroupSpec, values: Sequence[complex]) -> ComplexMeasure:
    return ComplexMeasure(G, np.asarray(values, dtype=np.complex128))


def parse_masses(text: str) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Parse ``0/1,1/2`` turns, or ``mag:turn`` pairs, into (turns, magnitudes)."""
    turns, mags = [], []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        mag, sep, turn = tok.rpartition(":")
        try:
            turns.append(as_turn(turn))
            mags.append(Fraction(mag) if sep else Fraction(1))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad mass {tok!r}") from exc
    return tuple(turns), tuple(mags)


def format_turn(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"
